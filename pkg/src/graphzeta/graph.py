"""Dart-based finite multigraphs.

Edge ``i`` of the input list yields darts ``2i`` (tail = first endpoint) and
``2i + 1`` (tail = second endpoint); ``opposite(d) = d ^ 1``.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError

REGULAR = "regular"
GENERAL = "general"


@dataclass(frozen=True)
class Multigraph:
    vertex_count: int
    tails: tuple[int, ...]
    mode: str = GENERAL
    _out: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        out = [[] for _ in range(self.vertex_count)]
        for d, t in enumerate(self.tails):
            out[t].append(d)
        object.__setattr__(self, "_out", tuple(tuple(ds) for ds in out))

    @property
    def n(self) -> int:
        return self.vertex_count

    @property
    def m(self) -> int:
        return len(self.tails) // 2

    @property
    def dart_count(self) -> int:
        return len(self.tails)

    @staticmethod
    def opposite(d: int) -> int:
        return d ^ 1

    def tail(self, d: int) -> int:
        return self.tails[d]

    def head(self, d: int) -> int:
        return self.tails[d ^ 1]

    def out_darts(self, v: int) -> tuple[int, ...]:
        """Darts with tail ``v``, in id order."""
        return self._out[v]

    def degree(self, v: int) -> int:
        return len(self._out[v])

    def degrees(self) -> list[int]:
        return [len(ds) for ds in self._out]

    def edges(self) -> list[tuple[int, int]]:
        return [(self.tails[2 * e], self.tails[2 * e + 1]) for e in range(self.m)]

    def successors(self, d: int) -> list[int]:
        """Non-backtracking continuations of dart ``d``."""
        back = d ^ 1
        return [e for e in self._out[self.head(d)] if e != back]

    def to_json(self) -> dict:
        return {"vertices": self.n, "edges": [list(e) for e in self.edges()]}


@dataclass(frozen=True)
class BarycentricGraph:
    """Barycentric subdivision: V0 = original vertices ``0..n-1``, V1 = midpoints ``n..n+m-1``.

    Half-edge ``h`` joins original vertex ``tail(h)`` to the midpoint of edge
    ``h // 2``; it corresponds to dart ``h`` of the original graph.
    """

    graph: Multigraph
    original: Multigraph

    @property
    def v0(self) -> range:
        return range(self.original.n)

    @property
    def v1(self) -> range:
        return range(self.original.n, self.original.n + self.original.m)

    def half_edge_to_edge(self, h: int) -> int:
        return h // 2

    def half_edges_at(self, v: int) -> list[int]:
        """Half-edges (= original darts) incident to subdivision vertex ``v``."""
        if v < self.original.n:
            return list(self.original.out_darts(v))
        e = v - self.original.n
        return [2 * e, 2 * e + 1]


def _connected(n: int, tails, out) -> bool:
    if n == 0:
        return False
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for d in out[v]:
            w = tails[d ^ 1]
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    return all(seen)


def parse_graph(edge_list, mode: str = GENERAL, vertex_count: int | None = None) -> Multigraph:
    """Build a connected multigraph from a list of vertex pairs."""
    if mode not in (REGULAR, GENERAL):
        raise ValidationError(f"unknown mode {mode!r}")
    edges = list(edge_list)
    if not edges:
        raise ValidationError("empty edge list")
    tails = []
    for pair in edges:
        if len(pair) != 2:
            raise ValidationError(f"edge {pair!r} is not a vertex pair")
        for v in pair:
            if isinstance(v, bool) or not isinstance(v, int):
                if isinstance(v, float) and v.is_integer():
                    continue
                raise ValidationError(f"vertex index {v!r} is not an integer")
            if v < 0:
                raise ValidationError(f"negative vertex index {v}")
        u, v = int(pair[0]), int(pair[1])
        if mode == REGULAR and u == v:
            raise ValidationError(f"loop at vertex {u}")
        tails += [u, v]
    top = max(tails) + 1
    n = top if vertex_count is None else vertex_count
    if top > n:
        raise ValidationError(f"vertex index {top - 1} out of range for {n} vertices")
    g = Multigraph(n, tuple(tails), mode)
    if not _connected(n, g.tails, g._out):
        raise ValidationError("disconnected graph")
    return g


def load_graph(source, mode: str = GENERAL) -> Multigraph:
    """Read the ``{"vertices": n, "edges": [[u, v], ...]}`` format from a path, str or dict."""
    if isinstance(source, dict):
        data = source
    else:
        text = Path(source).read_text() if not str(source).lstrip().startswith("{") else str(source)
        try:
            data = json.loads(text, parse_constant=lambda c: math.nan)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed graph JSON: {exc}") from exc
    if not isinstance(data, dict) or "edges" not in data:
        raise ValidationError("graph JSON needs an 'edges' field")
    n = data.get("vertices")
    if n is not None and (isinstance(n, bool) or not isinstance(n, int) or n <= 0):
        raise ValidationError(f"invalid vertex count {n!r}")
    for pair in data["edges"]:
        for v in pair if isinstance(pair, list) else [pair]:
            if isinstance(v, float) and (math.isnan(v) or not v.is_integer()):
                raise ValidationError(f"invalid vertex index {v!r}")
    return parse_graph(data["edges"], mode, vertex_count=n)


def check_regular(g: Multigraph) -> int:
    """Return ``q`` when every vertex has degree ``q + 1`` and no edge is a loop."""
    if any(g.tails[2 * e] == g.tails[2 * e + 1] for e in range(g.m)):
        raise ValidationError("not regular: graph has a loop")
    degs = set(g.degrees())
    if len(degs) != 1:
        raise ValidationError(f"not regular: degrees {sorted(degs)}")
    q = degs.pop() - 1
    if q < 1:
        raise ValidationError(f"not regular: valency {q + 1} < 2")
    return q


def euler_characteristic(g: Multigraph, r: int = 1) -> int:
    chi = (g.n - g.m) * r
    degs = set(g.degrees())
    if len(degs) == 1:
        q = degs.pop() - 1
        assert 2 * chi == g.n * (1 - q) * r
    return chi


def spanning_tree(g: Multigraph, root: int = 0) -> tuple[frozenset[int], int]:
    """BFS spanning tree from ``root`` scanning darts in id order.

    Returns the set of tree darts (both orientations of each tree edge) and the
    rank ``m - n + 1``.
    """
    seen = [False] * g.n
    seen[root] = True
    tree: set[int] = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for d in g.out_darts(v):
            w = g.head(d)
            if not seen[w]:
                seen[w] = True
                tree.update((d, d ^ 1))
                queue.append(w)
    return frozenset(tree), g.m - g.n + 1


def tree_parent_darts(g: Multigraph, tree: frozenset[int], root: int = 0) -> list[int | None]:
    """For each vertex, the tree dart pointing into it from the root side."""
    parent: list[int | None] = [None] * g.n
    seen = [False] * g.n
    seen[root] = True
    order = deque([root])
    while order:
        v = order.popleft()
        for d in g.out_darts(v):
            if d in tree and not seen[g.head(d)]:
                seen[g.head(d)] = True
                parent[g.head(d)] = d
                order.append(g.head(d))
    return parent


def girth(g: Multigraph) -> int:
    """Length of the shortest closed geodesic, i.e. the shortest cycle."""
    if g.m - g.n + 1 <= 0:
        raise ValidationError("infinite girth: graph is a tree")
    best = math.inf
    for e in range(g.m):
        if g.tails[2 * e] == g.tails[2 * e + 1]:
            return 1
    for root in range(g.n):
        dist = [-1] * g.n
        via = [-1] * g.n
        dist[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            if 2 * dist[v] + 1 >= best:
                break
            for d in g.out_darts(v):
                if d ^ 1 == via[v]:
                    continue
                w = g.head(d)
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    via[w] = d
                    queue.append(w)
                else:
                    best = min(best, dist[v] + dist[w] + 1)
    return int(best)


def barycentric_subdivide(g: Multigraph) -> BarycentricGraph:
    edges = []
    for d in range(g.dart_count):
        edges.append((g.tail(d), g.n + d // 2))
    sub = Multigraph(g.n + g.m, tuple(v for pair in edges for v in pair), GENERAL)
    return BarycentricGraph(sub, g)


# ---------------------------------------------------------------------------
# standard graphs

def complete_graph(n: int) -> Multigraph:
    return parse_graph([(i, j) for i in range(n) for j in range(i + 1, n)], REGULAR)


def k4() -> Multigraph:
    """K4 with the edge order used throughout the docs and tests."""
    return parse_graph([[0, 1], [1, 2], [2, 0], [0, 3], [1, 3], [2, 3]], REGULAR)


def cycle_graph(n: int) -> Multigraph:
    return parse_graph([(i, (i + 1) % n) for i in range(n)], REGULAR)


def complete_bipartite_graph(a: int, b: int) -> Multigraph:
    return parse_graph([(i, a + j) for i in range(a) for j in range(b)], REGULAR)


def petersen_graph() -> Multigraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return parse_graph(outer + spokes + inner, REGULAR)


def random_regular_graph(degree: int, n: int, seed: int) -> Multigraph:
    """Seeded connected simple ``degree``-regular graph on ``n`` vertices."""
    import networkx as nx

    for attempt in range(100):
        h = nx.random_regular_graph(degree, n, seed=seed + attempt)
        if nx.is_connected(h):
            return parse_graph(sorted(tuple(sorted(e)) for e in h.edges()), REGULAR)
    raise ValidationError("could not draw a connected regular graph")
