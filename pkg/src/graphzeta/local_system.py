"""Unitary local systems as voltage assignments on darts, and the twisted operators.

Voltage ``V(d)`` is parallel transport from the stalk at ``tail(d)`` to the
stalk at ``head(d)``.  Transport along a walk ``d1, ..., dl`` is therefore
``V(dl) @ ... @ V(d1)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import fields
from .errors import ValidationError
from .graph import Multigraph, barycentric_subdivide, spanning_tree, tree_parent_darts

VERTEX = "vertex"
DART = "dart"
HALF_EDGE = "half-edge"


@dataclass(frozen=True, eq=False)
class LocalSystem:
    base: Multigraph
    dim: int
    voltages: tuple[np.ndarray, ...]
    kind: str
    gauge_tree: frozenset[int] | None = None

    def voltage(self, d: int) -> np.ndarray:
        return self.voltages[d]

    def identity(self) -> np.ndarray:
        return fields.identity(self.dim, self.kind)

    def validate(self, tol: float = 1e-12) -> None:
        g = self.base
        one = self.identity()
        for d in range(g.dart_count):
            v = self.voltages[d]
            if v.shape != (self.dim, self.dim):
                raise ValidationError(f"voltage on dart {d} has shape {v.shape}")
            if self.dim and not fields.is_unitary(v, tol):
                raise ValidationError(f"voltage on dart {d} not unitary")
            if self.dim and not fields.matrices_equal(v @ self.voltages[d ^ 1], one, tol):
                raise ValidationError(f"voltage on dart {d ^ 1} is not the inverse of dart {d}")
        if self.gauge_tree is not None:
            for d in self.gauge_tree:
                if not fields.matrices_equal(self.voltages[d], one, tol):
                    raise ValidationError(f"tree dart {d} does not carry the identity")


@dataclass(frozen=True, eq=False)
class TwistedOperator:
    """Square block matrix indexed by (site, stalk coordinate)."""

    graph: Multigraph
    sites: str
    dim: int
    matrix: np.ndarray

    @property
    def site_count(self) -> int:
        return self.matrix.shape[0] // self.dim if self.dim else 0

    def block(self, x: int, y: int) -> np.ndarray:
        r = self.dim
        return self.matrix[x * r:(x + 1) * r, y * r:(y + 1) * r]


def _kind_of_generators(generators: Mapping[int, np.ndarray]) -> str:
    values = [x for m in generators.values() for x in np.asarray(m, dtype=object).flat]
    return fields.kind_of(values)


def from_voltages(g: Multigraph, voltages: Sequence, kind: str | None = None,
                  gauge_tree: frozenset[int] | None = None) -> LocalSystem:
    """Local system with an explicit voltage on every dart."""
    if len(voltages) != g.dart_count:
        raise ValidationError("need one voltage per dart")
    arrays = [np.asarray(v, dtype=object if kind != fields.FLOAT else complex) for v in voltages]
    if kind is None:
        kind = fields.kind_of([x for a in arrays for x in a.flat])
    arrays = [fields.as_matrix(a.tolist(), kind) if a.size else fields.zeros(a.shape, kind)
              for a in arrays]
    dim = arrays[0].shape[0] if arrays else 0
    ls = LocalSystem(g, dim, tuple(arrays), kind, gauge_tree)
    ls.validate()
    return ls


def make_local_system(g: Multigraph, generators: Mapping[int, object], dim: int | None = None,
                      kind: str | None = None) -> LocalSystem:
    """Gauge-normalized local system from generators on the non-tree edges.

    ``generators`` maps an edge index to the matrix carried by its first dart
    (``2 * edge``).  Tree darts carry the identity; non-tree edges without a
    generator carry the identity too.
    """
    tree, _ = spanning_tree(g)
    mats = {}
    for e, m in generators.items():
        e = int(e)
        if not 0 <= e < g.m:
            raise ValidationError(f"edge index {e} out of range")
        if 2 * e in tree:
            raise ValidationError(f"edge {e} belongs to the spanning tree")
        mats[e] = np.array(m, dtype=object if kind != fields.FLOAT else complex, ndmin=2)
    dims = {a.shape for a in mats.values()}
    if len(dims) > 1:
        raise ValidationError(f"dimension mismatch among generators: {sorted(dims)}")
    if mats:
        shape = dims.pop()
        if shape[0] != shape[1]:
            raise ValidationError(f"generator of shape {shape} is not square")
        r = shape[0]
        if dim is not None and dim != r:
            raise ValidationError(f"generators have dimension {r}, expected {dim}")
    elif dim is None:
        raise ValidationError("dimension unknown: no generators and no dim given")
    else:
        r = dim
    if kind is None:
        kind = _kind_of_generators(mats) if mats else fields.RATIONAL
    gens = {e: fields.as_matrix(a.tolist(), kind) for e, a in mats.items()}
    for e, a in gens.items():
        if not fields.is_unitary(a):
            raise ValidationError(f"generator on edge {e} not unitary")
    one = fields.identity(r, kind)
    volts = []
    for d in range(g.dart_count):
        a = gens.get(d // 2)
        if a is None:
            volts.append(one)
        else:
            volts.append(a if d % 2 == 0 else fields.dagger(a))
    ls = LocalSystem(g, r, tuple(volts), kind, tree)
    ls.validate()
    return ls


def trivial_local_system(g: Multigraph, dim: int = 1, kind: str = fields.RATIONAL) -> LocalSystem:
    return make_local_system(g, {}, dim=dim, kind=kind)


def sign_local_system(g: Multigraph, signs: Mapping[int, int]) -> LocalSystem:
    """Rank-one system with a +-1 character on the given non-tree edges."""
    return make_local_system(g, {e: [[Fraction(s)]] for e, s in signs.items()}, dim=1)


def random_sign_local_system(g: Multigraph, seed: int) -> LocalSystem:
    tree, _ = spanning_tree(g)
    rng = np.random.default_rng(seed)
    non_tree = [e for e in range(g.m) if 2 * e not in tree]
    return sign_local_system(g, {e: int(rng.choice([-1, 1])) for e in non_tree})


def regauge(ls: LocalSystem, root: int = 0) -> LocalSystem:
    """Equivalent system normalized on the BFS spanning tree rooted at ``root``.

    Uses the vertex gauge ``g(root) = I`` and ``V'(d) = g(head) V(d) g(tail)^-1``.
    """
    g = ls.base
    tree, _ = spanning_tree(g, root)
    parent = tree_parent_darts(g, tree, root)
    gauge: list[np.ndarray | None] = [None] * g.n
    gauge[root] = ls.identity()
    order = [root]
    for v in order:
        for d in g.out_darts(v):
            w = g.head(d)
            if parent[w] == d:
                # V'(d) = I  =>  g(w) = g(v) V(d)^-1
                gauge[w] = gauge[v] @ fields.dagger(ls.voltage(d))
                order.append(w)
    volts = [gauge[g.head(d)] @ ls.voltage(d) @ fields.dagger(gauge[g.tail(d)])
             for d in range(g.dart_count)]
    out = LocalSystem(g, ls.dim, tuple(volts), ls.kind, tree)
    out.validate()
    return out


def conjugate_generators(ls: LocalSystem, u: np.ndarray) -> LocalSystem:
    """Replace every voltage V by U V U^-1 for a fixed unitary U."""
    ud = fields.dagger(u)
    volts = [u @ v @ ud for v in ls.voltages]
    return LocalSystem(ls.base, ls.dim, tuple(volts), ls.kind, ls.gauge_tree)


def load_local_system(source, g: Multigraph) -> LocalSystem:
    """Read ``{"dim": r, "generators": {"edge": [[[re, im], ...], ...]}}``.

    Exact entries are ``"p/q"`` strings or JSON integers; any JSON float
    switches the system to float mode.
    """
    if isinstance(source, dict):
        data = source
    else:
        try:
            data = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed local-system JSON: {exc}") from exc
    if "dim" not in data:
        raise ValidationError("local-system JSON needs 'dim'")
    dim = data["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 0:
        raise ValidationError(f"invalid dim {dim!r}")
    float_mode = False
    gens = {}
    for key, rows in data.get("generators", {}).items():
        try:
            e = int(key)
        except ValueError as exc:
            raise ValidationError(f"invalid edge index {key!r}") from exc
        mat = []
        for row in rows:
            out_row = []
            for entry in row:
                re, im = (entry, 0) if not isinstance(entry, list) else entry
                if isinstance(re, float) or isinstance(im, float):
                    float_mode = True
                    out_row.append(complex(float(re), float(im)))
                else:
                    pr, pi = fields.parse_rational(re), fields.parse_rational(im)
                    out_row.append(pr if pi == 0 else fields.GaussianRational(pr, pi))
            mat.append(out_row)
        gens[e] = mat
    kind = fields.FLOAT if float_mode else None
    return make_local_system(g, gens, dim=dim, kind=kind)


def monodromy(ls: LocalSystem, walk) -> np.ndarray:
    """Transport around a closed dart walk: ``V(dl) @ ... @ V(d1)``."""
    darts = list(getattr(walk, "darts", walk))
    g = ls.base
    if not darts:
        raise ValidationError("empty walk")
    for a, b in zip(darts, darts[1:]):
        if g.head(a) != g.tail(b):
            raise ValidationError(f"darts {a} and {b} are not consecutive")
    if g.head(darts[-1]) != g.tail(darts[0]):
        raise ValidationError("walk is not closed")
    m = ls.identity()
    for d in darts:
        m = ls.voltage(d) @ m
    return m


def twisted_adjacency(ls: LocalSystem) -> TwistedOperator:
    g, r = ls.base, ls.dim
    a = fields.zeros((g.n * r, g.n * r), ls.kind)
    for d in range(g.dart_count):
        x, y = g.head(d), g.tail(d)
        a[x * r:(x + 1) * r, y * r:(y + 1) * r] += ls.voltage(d)
    return TwistedOperator(g, VERTEX, r, a)


def degree_operator(ls: LocalSystem, shift: int = 0) -> np.ndarray:
    """Blockwise ``(deg(x) + shift) * Identity``."""
    g, r = ls.base, ls.dim
    out = fields.zeros((g.n * r, g.n * r), ls.kind)
    one = fields.convert(1, ls.kind)
    for x in range(g.n):
        for i in range(r):
            out[x * r + i, x * r + i] = one * (g.degree(x) + shift)
    return out


def twisted_laplacian(ls: LocalSystem) -> TwistedOperator:
    """``deg(x) * Id - A_rho``; equals ``q + 1 - A_rho`` on regular graphs."""
    if ls.base.mode == "regular":
        from .graph import check_regular

        check_regular(ls.base)
    a = twisted_adjacency(ls).matrix
    return TwistedOperator(ls.base, VERTEX, ls.dim, degree_operator(ls) - a)


def _require_min_degree(g: Multigraph) -> None:
    low = [v for v in range(g.n) if g.degree(v) < 2]
    if low:
        raise ValidationError(f"vertex {low[0]} has degree {g.degree(low[0])} < 2")


def dart_operator(ls: LocalSystem) -> TwistedOperator:
    """Non-backtracking operator: block ``(d', d) = V(d')`` when ``d -> d'`` is a step."""
    g, r = ls.base, ls.dim
    _require_min_degree(g)
    b = fields.zeros((g.dart_count * r, g.dart_count * r), ls.kind)
    for d in range(g.dart_count):
        for e in g.successors(d):
            b[e * r:(e + 1) * r, d * r:(d + 1) * r] = ls.voltage(e)
    return TwistedOperator(g, DART, r, b)


def t0_t1(ls: LocalSystem) -> tuple[TwistedOperator, TwistedOperator]:
    """The pair of half-edge operators on the barycentric subdivision.

    Half-edge ``h`` (at original vertex ``tail(h)``) has its stalk at that
    vertex.  T1 crosses the midpoint to the partner half-edge, transporting by
    the voltage; T0 moves to the other half-edges at the same original vertex
    with trivial transport.  ``b = a`` is excluded in both.
    """
    g, r = ls.base, ls.dim
    _require_min_degree(g)
    sub = barycentric_subdivide(g)
    size = g.dart_count * r
    t0 = fields.zeros((size, size), ls.kind)
    t1 = fields.zeros((size, size), ls.kind)
    one = ls.identity()
    for a in range(g.dart_count):
        partner = a ^ 1
        t1[partner * r:(partner + 1) * r, a * r:(a + 1) * r] = ls.voltage(a)
        for b in sub.half_edges_at(g.tail(a)):
            if b != a:
                t0[b * r:(b + 1) * r, a * r:(a + 1) * r] = one
    return TwistedOperator(g, HALF_EDGE, r, t0), TwistedOperator(g, HALF_EDGE, r, t1)


def half_edge_gauge(ls: LocalSystem) -> np.ndarray:
    """Block-diagonal ``P`` with ``T0 T1 = P B P^-1``; block ``d`` is ``V(d)^-1``."""
    g, r = ls.base, ls.dim
    p = fields.zeros((g.dart_count * r, g.dart_count * r), ls.kind)
    for d in range(g.dart_count):
        p[d * r:(d + 1) * r, d * r:(d + 1) * r] = ls.voltage(d ^ 1)
    return p
