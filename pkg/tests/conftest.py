import json

import pytest

from graphzeta.graph import (
    complete_bipartite_graph,
    cycle_graph,
    k4,
    parse_graph,
    petersen_graph,
    random_regular_graph,
)
from graphzeta.local_system import sign_local_system


K4_NON_TREE = (1, 4, 5)


def k4_sign(g=None):
    """Sign character with -1 on every non-tree edge of K4."""
    return sign_local_system(g or k4(), {e: -1 for e in K4_NON_TREE})


def k4_minus_edge():
    return parse_graph([[0, 1], [1, 2], [2, 0], [0, 3], [1, 3]])


def a1_graphs():
    return {
        "K4": k4(),
        "C4": cycle_graph(4),
        "K33": complete_bipartite_graph(3, 3),
        "Petersen": petersen_graph(),
        "R3_10": random_regular_graph(3, 10, seed=11),
    }


def brute_closed_walks(g, length):
    """Marked closed non-backtracking tailless dart walks, by brute force."""
    out = []
    for start in range(g.dart_count):
        stack = [(start,)]
        while stack:
            w = stack.pop()
            if len(w) == length:
                if g.head(w[-1]) == g.tail(w[0]) and w[0] != w[-1] ^ 1:
                    out.append(w)
                continue
            for d in range(g.dart_count):
                if g.tail(d) == g.head(w[-1]) and d != w[-1] ^ 1:
                    stack.append(w + (d,))
    return out


def tree_ball_deltas(q, order):
    """<root|((q+1) - A)^k|root> on an explicit ball of the (q+1)-regular tree."""
    # radius ceil(order/2) suffices: a k-step walk back to the root stays within k/2
    radius = (order + 1) // 2 + 1
    parent = [-1]
    frontier = [0]
    for _ in range(radius):
        nxt = []
        for v in frontier:
            kids = q + 1 if v == 0 else q
            for _ in range(kids):
                parent.append(v)
                nxt.append(len(parent) - 1)
        frontier = nxt
    nbrs = [[] for _ in parent]
    for v in range(1, len(parent)):
        nbrs[v].append(parent[v])
        nbrs[parent[v]].append(v)
    vec = [0] * len(parent)
    vec[0] = 1
    out = []
    for _ in range(order + 1):
        out.append(vec[0])
        vec = [(q + 1) * vec[v] - sum(vec[w] for w in nbrs[v]) for v in range(len(vec))]
    return out


@pytest.fixture
def write_json(tmp_path):
    def _write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)
    return _write


@pytest.fixture
def k4_path(write_json):
    return write_json("k4.json", {"vertices": 4, "edges": [[0, 1], [1, 2], [2, 0], [0, 3], [1, 3], [2, 3]]})


@pytest.fixture
def c4_path(write_json):
    return write_json("c4.json", {"vertices": 4, "edges": [[0, 1], [1, 2], [2, 3], [3, 0]]})


@pytest.fixture
def k33_path(write_json):
    g = complete_bipartite_graph(3, 3)
    return write_json("k33.json", g.to_json())




ACCEPTANCE_LINES: list[str] = []


def record_acceptance(criterion, ok, detail, elapsed):
    line = f"{criterion} {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s) {detail}"
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
