"""Finite covers from voltage assignments, kernel operators, summation and pushdown.

A cover with ``k`` sheets has total vertices ``v * k + i`` over base vertex
``v``.  Base edge ``e`` and sheet ``i`` give total edge ``e * k + i`` from
``(tail(2e), i)`` to ``(head(2e), pi_2e(i))``.  Group covers use
``pi_d(h) = h * voltage(d)`` and the deck group acts by left multiplication.

Lifted local systems carry the base voltage on every lift of a dart, so the
deck group acts on stalks by the identity in this trivialization.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from . import fields
from .errors import BudgetExceeded, ValidationError
from .graph import Multigraph, spanning_tree
from .local_system import DART, HALF_EDGE, VERTEX, LocalSystem, TwistedOperator


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class FiniteGroup:
    """Group given by its multiplication table on element indices ``0..order-1``."""

    labels: tuple
    table: tuple[tuple[int, ...], ...]
    identity: int = 0

    def __post_init__(self):
        n = len(self.labels)
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise ValidationError("multiplication table has the wrong shape")
        e = self.identity
        if any(self.table[e][g] != g or self.table[g][e] != g for g in range(n)):
            raise ValidationError("identity element is not neutral")

    @property
    def order(self) -> int:
        return len(self.labels)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    @cached_property
    def inverses(self) -> tuple[int, ...]:
        inv = []
        for g in range(self.order):
            hits = [h for h in range(self.order) if self.table[g][h] == self.identity]
            if len(hits) != 1:
                raise ValidationError(f"element {self.labels[g]!r} has no unique inverse")
            inv.append(hits[0])
        return tuple(inv)

    def inverse(self, g: int) -> int:
        return self.inverses[g]

    def is_associative(self) -> bool:
        t, n = self.table, self.order
        return all(t[t[a][b]][c] == t[a][t[b][c]]
                   for a in range(n) for b in range(n) for c in range(n))

    def generated_subgroup(self, gens: Sequence[int]) -> list[int]:
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            g = queue.popleft()
            for s in gens:
                h = self.table[g][s]
                if h not in seen:
                    seen.add(h)
                    queue.append(h)
        return sorted(seen)


def trivial_group() -> FiniteGroup:
    return FiniteGroup(((),), ((0,),))


def cyclic_group(p: int) -> FiniteGroup:
    return FiniteGroup(tuple((i,) for i in range(p)),
                       tuple(tuple((a + b) % p for b in range(p)) for a in range(p)))


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    pairs = list(itertools.product(range(g.order), range(h.order)))
    index = {pair: i for i, pair in enumerate(pairs)}
    labels = tuple(g.labels[a] + h.labels[b] for a, b in pairs)
    table = tuple(tuple(index[(g.mul(a1, a2), h.mul(b1, b2))] for a2, b2 in pairs)
                  for a1, b1 in pairs)
    return FiniteGroup(labels, table, index[(g.identity, h.identity)])


def elementary_abelian(p: int, k: int) -> FiniteGroup:
    """``(Z/p)^k``; element labels are coordinate tuples."""
    group = trivial_group()
    for _ in range(k):
        group = direct_product(group, cyclic_group(p))
    return group


def parse_group(spec: str) -> FiniteGroup:
    """``"Z2^3"`` -> (Z/2)^3, ``"Z5"`` -> Z/5."""
    text = spec.strip()
    if not text.startswith("Z"):
        raise ValidationError(f"unsupported group {spec!r}")
    base, _, power = text[1:].partition("^")
    try:
        p = int(base)
        k = int(power) if power else 1
    except ValueError as exc:
        raise ValidationError(f"unsupported group {spec!r}") from exc
    if p < 1 or k < 0:
        raise ValidationError(f"unsupported group {spec!r}")
    return elementary_abelian(p, k)


# ---------------------------------------------------------------------------
# covers


@dataclass(frozen=True, eq=False)
class CoverGraph:
    base: Multigraph
    sheets: int
    perms: tuple[tuple[int, ...], ...]
    total: Multigraph
    group: FiniteGroup | None = None
    voltage: tuple[int, ...] | None = None
    retries: int = 0
    note: str = ""

    @property
    def index(self) -> int:
        return self.sheets

    @property
    def is_normal(self) -> bool:
        return self.group is not None

    def vertex_lift(self, v: int, i: int) -> int:
        return v * self.sheets + i

    def vertex_projection(self, x: int) -> tuple[int, int]:
        return divmod(x, self.sheets)

    def dart_lift(self, d: int, i: int) -> int:
        """Total dart over base dart ``d`` starting on sheet ``i``."""
        k, e = self.sheets, d // 2
        if d % 2 == 0:
            return 2 * (e * k + i)
        return 2 * (e * k + self.perms[d][i]) + 1

    def dart_projection(self, t: int) -> tuple[int, int]:
        """Base dart and tail sheet of total dart ``t``."""
        e, i = divmod(t // 2, self.sheets)
        if t % 2 == 0:
            return 2 * e, i
        return 2 * e + 1, self.perms[2 * e][i]

    def site_projection(self, sites: str) -> list[int]:
        if sites == VERTEX:
            return [x // self.sheets for x in range(self.total.n)]
        return [self.dart_projection(t)[0] for t in range(self.total.dart_count)]

    def site_lift(self, sites: str, y: int, i: int) -> int:
        return self.vertex_lift(y, i) if sites == VERTEX else self.dart_lift(y, i)

    def deck(self, h: int, sites: str, x: int) -> int:
        """Action of group element ``h`` on a total site."""
        if self.group is None:
            raise ValidationError("permutation covers carry no deck group")
        if sites == VERTEX:
            v, g = self.vertex_projection(x)
            return self.vertex_lift(v, self.group.mul(h, g))
        d, g = self.dart_projection(x)
        return self.dart_lift(d, self.group.mul(h, g))


def _total_graph(base: Multigraph, perms) -> tuple[Multigraph, list[int]]:
    k = len(perms[0]) if perms else 1
    tails = []
    for e in range(base.m):
        pi = perms[2 * e]
        for i in range(k):
            tails += [base.tail(2 * e) * k + i, base.head(2 * e) * k + pi[i]]
    g = Multigraph(base.n * k, tuple(tails), base.mode)
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for d in g.out_darts(v):
            w = g.head(d)
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    reached_fiber = [i for i in range(k) if seen[i]]
    return g, reached_fiber


def build_cover(g: Multigraph, group: FiniteGroup, voltage: Mapping[int, int]) -> CoverGraph:
    """Normal cover from group voltages on darts (missing edges carry the identity)."""
    volt = [group.identity] * g.dart_count
    given = set()
    for d, h in voltage.items():
        if not 0 <= d < g.dart_count:
            raise ValidationError(f"dart {d} out of range")
        if not 0 <= h < group.order:
            raise ValidationError(f"group element {h} out of range")
        volt[d] = h
        given.add(d)
    for d in given:
        if d ^ 1 in given:
            if volt[d ^ 1] != group.inverse(volt[d]):
                raise ValidationError(f"inconsistent voltage on darts {d} and {d ^ 1}")
        else:
            volt[d ^ 1] = group.inverse(volt[d])
    perms = tuple(tuple(group.mul(h, volt[d]) for h in range(group.order)) for d in range(g.dart_count))
    total, fiber = _total_graph(g, perms)
    if len(fiber) != group.order:
        labels = [group.labels[h] for h in fiber]
        raise ValidationError(f"voltages do not generate the group; reached subgroup {labels}")
    return CoverGraph(g, group.order, perms, total, group, tuple(volt))


def trivial_cover(g: Multigraph) -> CoverGraph:
    return build_cover(g, trivial_group(), {})


def random_cover(g: Multigraph, degree: int, seed: int, max_retries: int = 100) -> CoverGraph:
    """Seeded permutation-voltage cover; generally not normal.

    Each edge carries a uniform permutation drawn from ``default_rng([seed, attempt])``;
    disconnected draws are retried with the next sub-seed.
    """
    if degree < 1:
        raise ValidationError("cover degree must be >= 1")
    for attempt in range(max_retries):
        rng = np.random.default_rng([seed, attempt])
        perms: list[tuple[int, ...]] = []
        for _ in range(g.m):
            pi = tuple(int(x) for x in rng.permutation(degree))
            inv = [0] * degree
            for i, j in enumerate(pi):
                inv[j] = i
            perms += [pi, tuple(inv)]
        total, fiber = _total_graph(g, perms)
        if len(fiber) == degree:
            return CoverGraph(g, degree, tuple(perms), total, None, None, attempt,
                              note="permutation cover (not normal)")
    raise ValidationError(f"no connected cover after {max_retries} retries")


def random_group_cover(g: Multigraph, group: FiniteGroup, seed: int, max_retries: int = 100) -> CoverGraph:
    """Normal cover with seeded uniform voltages on the non-tree edges."""
    tree, _ = spanning_tree(g)
    non_tree = [e for e in range(g.m) if 2 * e not in tree]
    for attempt in range(max_retries):
        rng = np.random.default_rng([seed, attempt])
        volt = {2 * e: int(rng.integers(group.order)) for e in non_tree}
        try:
            cover = build_cover(g, group, volt)
        except ValidationError:
            continue
        return CoverGraph(cover.base, cover.sheets, cover.perms, cover.total, cover.group,
                          cover.voltage, attempt)
    raise ValidationError(f"no connected cover after {max_retries} retries")


def homology_cover(g: Multigraph, p: int) -> CoverGraph:
    """Cover with deck group ``H_1(g; Z/p)``: non-tree edge ``i`` carries basis vector ``i``."""
    tree, rank = spanning_tree(g)
    group = elementary_abelian(p, rank)
    index = {label: i for i, label in enumerate(group.labels)}
    non_tree = [e for e in range(g.m) if 2 * e not in tree]
    volt = {}
    for i, e in enumerate(non_tree):
        vec = [0] * rank
        vec[i] = 1
        volt[2 * e] = index[tuple(vec)]
    return build_cover(g, group, volt)


def homology_tower(g: Multigraph, p: int, levels: int, index_cap: int) -> list[CoverGraph]:
    """Iterated mod-``p`` homology covers; level ``j+1`` covers the total graph of level ``j``."""
    if p < 2 or any(p % k == 0 for k in range(2, int(p ** 0.5) + 1)):
        raise ValidationError(f"{p} is not prime")
    out: list[CoverGraph] = []
    current = g
    for level in range(1, levels + 1):
        rank = current.m - current.n + 1
        if p ** rank > index_cap:
            raise BudgetExceeded(
                f"index cap {index_cap} exceeded at level {level}: index {p}^{rank}; "
                f"reached level {level - 1}")
        cover = homology_cover(current, p)
        out.append(cover)
        current = cover.total
    return out


def compose_covers(covers: Sequence[CoverGraph]) -> CoverGraph:
    """Collapse a tower into a single (permutation) cover of the bottom graph."""
    base = covers[0].base
    if len(covers) == 1:
        return covers[0]
    top = covers[-1].total
    k = top.n // base.n
    # follow each total vertex/dart down the tower
    def down_vertex(x):
        for c in reversed(covers):
            x = c.vertex_projection(x)[0]
        return x

    fibers: dict[int, list[int]] = {v: [] for v in range(base.n)}
    for x in range(top.n):
        fibers[down_vertex(x)].append(x)
    sheet_of = {x: i for v in fibers for i, x in enumerate(fibers[v])}

    def down_dart(t):
        for c in reversed(covers):
            t = c.dart_projection(t)[0]
        return t

    perms = [[0] * k for _ in range(base.dart_count)]
    for t in range(top.dart_count):
        d = down_dart(t)
        perms[d][sheet_of[top.tail(t)]] = sheet_of[top.head(t)]
    perms_t = tuple(tuple(p) for p in perms)
    total, _ = _total_graph(base, perms_t)
    return CoverGraph(base, k, perms_t, total, None, None, note="composed tower")


def lift_local_system(ls: LocalSystem, cover: CoverGraph) -> LocalSystem:
    """Pullback: each lifted dart carries the voltage of its projection."""
    if cover.base is not ls.base and cover.base != ls.base:
        raise ValidationError("local system lives on a different base graph")
    volts = tuple(ls.voltage(cover.dart_projection(t)[0]) for t in range(cover.total.dart_count))
    return LocalSystem(cover.total, ls.dim, volts, ls.kind, None)


def cover_to_json(cover: CoverGraph) -> dict:
    data = cover.total.to_json()
    data["fiber"] = [list(cover.vertex_projection(x)) for x in range(cover.total.n)]
    data["index"] = cover.index
    data["normal"] = cover.is_normal
    data["retries"] = cover.retries
    return data


# ---------------------------------------------------------------------------
# kernel operators


def site_distances(g: Multigraph, sites: str) -> np.ndarray:
    """All-pairs distance between sites.

    Vertices use graph distance.  Darts are adjacent when one follows the
    other (``head(d) = tail(e)`` or ``head(e) = tail(d)``).  Half-edges are
    adjacent when they share a vertex of the barycentric subdivision.
    """
    if sites == VERTEX:
        rows, cols = zip(*[(g.tail(d), g.head(d)) for d in range(g.dart_count)])
        size = g.n
    elif sites == DART:
        pairs = [(d, e) for d in range(g.dart_count) for e in g.out_darts(g.head(d))]
        rows, cols = zip(*(pairs + [(e, d) for d, e in pairs]))
        size = g.dart_count
    elif sites == HALF_EDGE:
        pairs = [(a, b) for v in range(g.n) for a in g.out_darts(v) for b in g.out_darts(v)]
        pairs += [(a, a ^ 1) for a in range(g.dart_count)]
        rows, cols = zip(*pairs)
        size = g.dart_count
    else:
        raise ValidationError(f"unknown site kind {sites!r}")
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))
    dist = shortest_path(adj, unweighted=True, directed=False)
    return dist


def _is_zero_block(block: np.ndarray) -> bool:
    if block.dtype == object:
        return all(x == 0 for x in block.flat)
    return not np.any(block)


@dataclass(frozen=True, eq=False)
class KernelOperator:
    """Finitely supported block kernel ``<x|D|y>`` on the sites of a graph."""

    graph: Multigraph
    sites: str
    dim: int
    kind: str
    kernel: dict = field(default_factory=dict)

    @classmethod
    def from_matrix(cls, graph: Multigraph, sites: str, dim: int, kind: str,
                    matrix: np.ndarray) -> "KernelOperator":
        r = dim
        count = matrix.shape[0] // r if r else 0
        kernel = {}
        for x in range(count):
            for y in range(count):
                block = matrix[x * r:(x + 1) * r, y * r:(y + 1) * r]
                if not _is_zero_block(block):
                    kernel[(x, y)] = block.copy()
        return cls(graph, sites, dim, kind, kernel)

    @classmethod
    def from_twisted(cls, op: TwistedOperator, kind: str) -> "KernelOperator":
        return cls.from_matrix(op.graph, op.sites, op.dim, kind, op.matrix)

    @property
    def site_count(self) -> int:
        return self.graph.n if self.sites == VERTEX else self.graph.dart_count

    def block(self, x: int, y: int) -> np.ndarray:
        b = self.kernel.get((x, y))
        return b if b is not None else fields.zeros((self.dim, self.dim), self.kind)

    def to_matrix(self) -> np.ndarray:
        r, n = self.dim, self.site_count
        out = fields.zeros((n * r, n * r), self.kind)
        for (x, y), b in self.kernel.items():
            out[x * r:(x + 1) * r, y * r:(y + 1) * r] = b
        return out

    @cached_property
    def distances(self) -> np.ndarray:
        return site_distances(self.graph, self.sites)

    @property
    def radius(self) -> int:
        return check_propagation(self).radius

    def __matmul__(self, other: "KernelOperator") -> "KernelOperator":
        if (other.graph, other.sites, other.dim) != (self.graph, self.sites, self.dim):
            raise ValidationError("operators act on different sheaves")
        out = KernelOperator.from_matrix(self.graph, self.sites, self.dim, self.kind,
                                         self.to_matrix() @ other.to_matrix())
        assert out.radius <= self.radius + other.radius
        return out

    def equals(self, other: "KernelOperator") -> bool:
        keys = set(self.kernel) | set(other.kernel)
        return all(fields.matrices_equal(self.block(*k), other.block(*k)) for k in keys)


@dataclass(frozen=True)
class Propagation:
    radius: int
    per_site: tuple[int, ...]


def check_propagation(op: KernelOperator) -> Propagation:
    """Per-site reach ``F(y) = max d(x, y)`` over nonzero ``<x|D|y>``, and its maximum."""
    dist = op.distances
    reach = [0] * op.site_count
    for (x, y) in op.kernel:
        reach[y] = max(reach[y], int(dist[x, y]))
    return Propagation(max(reach, default=0), tuple(reach))


def summation_map(cover: CoverGraph, section: np.ndarray, sites: str = VERTEX) -> np.ndarray:
    """``S phi(y) = sum over the fiber of y``; ``section`` has shape ``(total sites, r)``."""
    proj = cover.site_projection(sites)
    count = cover.base.n if sites == VERTEX else cover.base.dart_count
    out = np.zeros((count,) + section.shape[1:], dtype=section.dtype)
    if section.dtype == object:
        out.fill(0)
    for t, y in enumerate(proj):
        out[y] = out[y] + section[t]
    return out


def summation_matrix(cover: CoverGraph, sites: str, dim: int, kind: str) -> np.ndarray:
    proj = cover.site_projection(sites)
    count = cover.base.n if sites == VERTEX else cover.base.dart_count
    s = fields.zeros((count * dim, len(proj) * dim), kind)
    one = fields.convert(1, kind)
    for t, y in enumerate(proj):
        for i in range(dim):
            s[y * dim + i, t * dim + i] = one
    return s


def check_deck_invariance(op: KernelOperator, cover: CoverGraph) -> bool:
    """``<hx|D|hy> = <x|D|y>`` for every deck transformation ``h``."""
    if cover.group is None:
        return True
    for (x, y), b in op.kernel.items():
        for h in range(cover.group.order):
            if not fields.matrices_equal(op.block(cover.deck(h, op.sites, x),
                                                  cover.deck(h, op.sites, y)), b):
                return False
    return True


def pushdown(op: KernelOperator, cover: CoverGraph) -> KernelOperator:
    """Kernel-sum pushdown ``<x|D_G|y> = sum_h h^-1 <h x0|D|y0>``.

    ``x0, y0`` are the lifts on the identity sheet.  For permutation covers
    the sum runs over the whole fiber of ``x`` instead.
    """
    if op.graph is not cover.total and op.graph != cover.total:
        raise ValidationError("operator does not live on the cover's total graph")
    if not check_deck_invariance(op, cover):
        raise ValidationError("operator is not deck-invariant")
    base_count = cover.base.n if op.sites == VERTEX else cover.base.dart_count
    e = cover.group.identity if cover.group is not None else 0
    proj = cover.site_projection(op.sites)
    kernel: dict = {}
    for y in range(base_count):
        y0 = cover.site_lift(op.sites, y, e)
        for x in range(base_count):
            x0 = cover.site_lift(op.sites, x, e)
            if cover.group is not None:
                lifts = [cover.deck(h, op.sites, x0) for h in range(cover.group.order)]
            else:
                lifts = [t for t in range(len(proj)) if proj[t] == x]
            acc = None
            for xt in lifts:
                b = op.kernel.get((xt, y0))
                if b is not None:
                    acc = b.copy() if acc is None else acc + b
            if acc is not None and not _is_zero_block(acc):
                kernel[(x, y)] = acc
    return KernelOperator(cover.base, op.sites, op.dim, op.kind, kernel)


def pushdown_via_summation(op: KernelOperator, cover: CoverGraph) -> KernelOperator:
    """Pushdown from the commuting square ``S D = D_G S``.

    ``D_G = S D L`` with ``L`` the lift to the identity sheet; the square is
    then checked on every basis section of the cover.
    """
    r, kind = op.dim, op.kind
    s = summation_matrix(cover, op.sites, r, kind)
    base_count = s.shape[0] // r if r else 0
    e = cover.group.identity if cover.group is not None else 0
    lift = fields.zeros((s.shape[1], s.shape[0]), kind)
    one = fields.convert(1, kind)
    for y in range(base_count):
        t = cover.site_lift(op.sites, y, e)
        for i in range(r):
            lift[t * r + i, y * r + i] = one
    d = op.to_matrix()
    sd = s @ d
    pushed = sd @ lift
    if not fields.matrices_equal(sd, pushed @ s):
        raise ValidationError("summation square does not commute: operator not invariant")
    return KernelOperator.from_matrix(cover.base, op.sites, r, kind, pushed)
