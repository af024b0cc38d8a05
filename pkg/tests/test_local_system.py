
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import K4_NON_TREE, a1_graphs, k4_sign
from graphzeta import fields
from graphzeta.errors import ValidationError
from graphzeta.fields import GaussianRational
from graphzeta.geodesics import enumerate_primitive
from graphzeta.graph import cycle_graph, k4, petersen_graph
from graphzeta.local_system import (
    conjugate_generators,
    dart_operator,
    half_edge_gauge,
    load_local_system,
    make_local_system,
    monodromy,
    random_sign_local_system,
    regauge,
    t0_t1,
    trivial_local_system,
    twisted_adjacency,
    twisted_laplacian,
)
from graphzeta.poly import matrix_poly_det

I = GaussianRational(0, 1)


def _rank2_system(g):
    """Exact Gaussian rank-2 system: a quarter turn, a phase and a swap."""
    tree_free = [e for e in range(g.m) if e in (1, 4, 5)]
    gens = {
        tree_free[0]: [[0, 1], [-1, 0]],
        tree_free[1]: [[I, 0], [0, -I]],
        tree_free[2]: [[0, 1], [1, 0]],
    }
    return make_local_system(g, gens, dim=2)


def _charpoly(m):
    size = m.shape[0]
    kind = fields.kind_of(m.ravel()) if size else fields.RATIONAL
    return matrix_poly_det([fields.identity(size, kind), -m], size)


def test_trivial_voltages_are_one():
    ls = make_local_system(k4(), {e: [[1]] for e in K4_NON_TREE})
    assert all(v[0, 0] == 1 for v in ls.voltages)


def test_sign_character_unitary():
    ls = k4_sign()
    assert sorted({int(v[0, 0]) for v in ls.voltages}) == [-1, 1]
    ls.validate()


def test_non_unitary_generator_rejected():
    with pytest.raises(ValidationError, match="not unitary"):
        make_local_system(k4(), {1: [[2]]})


def test_tree_edge_generator_rejected():
    with pytest.raises(ValidationError):
        make_local_system(k4(), {0: [[-1]]})


def test_dimension_mismatch_rejected():
    with pytest.raises(ValidationError):
        make_local_system(k4(), {1: [[1, 0], [0, 1]], 4: [[1]]})


def test_kind_detection():
    assert _rank2_system(k4()).kind == fields.GAUSSIAN
    assert k4_sign().kind == fields.RATIONAL
    assert make_local_system(k4(), {1: [[1j]]}).kind == fields.FLOAT


@pytest.mark.parametrize("ls", [trivial_local_system(k4()), k4_sign(), _rank2_system(k4()),
                                random_sign_local_system(petersen_graph(), 5)])
def test_unitarity_of_opposites(ls):
    for d in range(ls.base.dart_count):
        assert fields.matrices_equal(ls.voltage(d) @ ls.voltage(d ^ 1), ls.identity())


def test_monodromy_trivial_is_identity():
    ls = trivial_local_system(k4(), dim=2)
    for geo in enumerate_primitive(k4(), 4):
        assert fields.matrices_equal(monodromy(ls, geo), ls.identity())


def test_monodromy_sign_triangle():
    # triangle 0 -> 1 -> 2 -> 0 uses darts 0, 2, 4; only edge 1 is off the tree
    assert monodromy(k4_sign(), [0, 2, 4])[0, 0] == -1


def test_monodromy_rejects_open_walk():
    with pytest.raises(ValidationError):
        monodromy(k4_sign(), [0, 2])


def test_rotation_conjugates_monodromy():
    ls = _rank2_system(k4())
    for geo in enumerate_primitive(k4(), 5):
        base = _charpoly(monodromy(ls, geo))
        for rot in geo.rotations():
            assert _charpoly(monodromy(ls, rot)) == base


def test_spanning_tree_change_invariance():
    ls = _rank2_system(k4())
    for root in range(4):
        other = regauge(ls, root)
        for geo in enumerate_primitive(k4(), 5):
            assert _charpoly(monodromy(other, geo)) == _charpoly(monodromy(ls, geo))


def test_adjacency_examples():
    a = twisted_adjacency(trivial_local_system(k4())).matrix
    assert (np.array(a, dtype=int) == np.ones((4, 4), int) - np.eye(4, dtype=int)).all()
    c = np.array(twisted_adjacency(trivial_local_system(cycle_graph(4))).matrix, dtype=int)
    expected = np.roll(np.eye(4, dtype=int), 1, axis=1) + np.roll(np.eye(4, dtype=int), -1, axis=1)
    assert (c == expected).all()


@pytest.mark.parametrize("ls", [k4_sign(), _rank2_system(k4()), random_sign_local_system(petersen_graph(), 1)])
def test_adjacency_square_diagonal_blocks(ls):
    a = twisted_adjacency(ls).matrix
    a2 = a @ a
    r = ls.dim
    for x in range(ls.base.n):
        block = a2[x * r:(x + 1) * r, x * r:(x + 1) * r]
        assert fields.matrices_equal(block, ls.identity() * ls.base.degree(x))


def test_laplacian_spectra():
    ev = np.linalg.eigvalsh(np.array(twisted_laplacian(trivial_local_system(k4())).matrix, dtype=float))
    assert np.allclose(ev, [0, 4, 4, 4])
    ev = np.linalg.eigvalsh(np.array(twisted_laplacian(k4_sign()).matrix, dtype=float))
    assert ev.min() >= -1e-12 and ev.max() <= 6 + 1e-12
    ev = np.linalg.eigvalsh(np.array(twisted_laplacian(trivial_local_system(cycle_graph(4))).matrix, dtype=float))
    assert np.allclose(ev, sorted(2 - 2 * np.cos(2 * np.pi * np.arange(4) / 4)))


def test_dart_operator_k4():
    b = np.array(dart_operator(trivial_local_system(k4())).matrix, dtype=int)
    assert b.shape == (12, 12)
    assert set(b.ravel()) <= {0, 1}
    assert (b.sum(axis=0) == 2).all() and (b.sum(axis=1) == 2).all()
    assert np.trace(np.linalg.matrix_power(b, 3)) == 24


def test_dart_operator_c4_traces():
    b = np.array(dart_operator(trivial_local_system(cycle_graph(4))).matrix, dtype=int)
    for k in range(1, 13):
        tr = np.trace(np.linalg.matrix_power(b, k))
        assert tr == (8 if k % 4 == 0 else 0)


def test_t0_t1_shapes():
    t0, t1 = t0_t1(trivial_local_system(k4()))
    m1 = np.array(t1.matrix, dtype=int)
    assert (m1 @ m1 == np.eye(12, dtype=int)).all()
    assert (m1.sum(axis=0) == 1).all() and (m1.sum(axis=1) == 1).all()
    assert (np.array(t0.matrix, dtype=int).sum(axis=1) == 2).all()


@pytest.mark.parametrize("ls", [trivial_local_system(k4()), k4_sign(), _rank2_system(k4())])
def test_t0t1_is_gauge_conjugate_of_dart_operator(ls):
    t0, t1 = t0_t1(ls)
    p = half_edge_gauge(ls)
    b = dart_operator(ls).matrix
    assert fields.matrices_equal((t0.matrix @ t1.matrix) @ p, p @ b)
    if ls.dim == 1 and all(v[0, 0] == 1 for v in ls.voltages):
        assert fields.matrices_equal(t0.matrix @ t1.matrix, b)


@pytest.mark.parametrize("name", ["K4", "C4", "K33"])
def test_t0t1_charpoly_matches_dart_operator(name):
    g = a1_graphs()[name]
    ls = random_sign_local_system(g, 3)
    t0, t1 = t0_t1(ls)
    assert _charpoly(t0.matrix @ t1.matrix) == _charpoly(dart_operator(ls).matrix)


def _random_unitary(rng, r):
    z = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    q, rr = np.linalg.qr(z)
    return q * (np.diag(rr) / abs(np.diag(rr)))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=3))
def test_gauge_independence_of_adjacency_spectrum(seed, r):
    rng = np.random.default_rng(seed)
    g = k4()
    gens = {e: _random_unitary(rng, r) for e in K4_NON_TREE}
    ls = make_local_system(g, gens, dim=r)
    u = _random_unitary(rng, r)
    conj = conjugate_generators(ls, u)
    a = np.array(twisted_adjacency(ls).matrix, dtype=complex)
    b = np.array(twisted_adjacency(conj).matrix, dtype=complex)
    assert np.allclose(np.poly(a), np.poly(b), atol=1e-9)


def test_load_local_system_exact(write_json):
    path = write_json("ls.json", {"dim": 1, "generators": {"1": [["-1"]], "4": [[["0", "1"]]]}})
    ls = load_local_system(path, k4())
    assert ls.kind == fields.GAUSSIAN
    assert ls.voltage(2)[0, 0] == -1
    assert ls.voltage(8)[0, 0] == I


def test_load_local_system_float():
    ls = load_local_system({"dim": 1, "generators": {"1": [[[0.0, 1.0]]]}}, k4())
    assert ls.kind == fields.FLOAT


def test_load_local_system_rejects_bad_dim():
    with pytest.raises(ValidationError):
        load_local_system({"dim": -1}, k4())


def test_rank_zero():
    ls = trivial_local_system(k4(), dim=0)
    assert twisted_adjacency(ls).matrix.shape == (0, 0)
