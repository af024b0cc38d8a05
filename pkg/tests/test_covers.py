import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import K4_NON_TREE, k4_sign
from graphzeta import fields
from graphzeta.covers import (
    KernelOperator,
    build_cover,
    check_deck_invariance,
    check_propagation,
    compose_covers,
    cover_to_json,
    cyclic_group,
    elementary_abelian,
    homology_cover,
    homology_tower,
    lift_local_system,
    parse_group,
    pushdown,
    pushdown_via_summation,
    random_cover,
    random_group_cover,
    summation_map,
    trivial_cover,
)
from graphzeta.errors import BudgetExceeded, ValidationError
from graphzeta.geodesics import enumerate_primitive
from graphzeta.graph import (
    check_regular,
    cycle_graph,
    euler_characteristic,
    girth,
    k4,
    petersen_graph,
)
from graphzeta.local_system import (
    DART,
    VERTEX,
    dart_operator,
    monodromy,
    random_sign_local_system,
    trivial_local_system,
    twisted_laplacian,
)
from graphzeta.zeta import bass_zeta


def _is_cycle(g, n):
    return g.n == n and g.m == n and set(g.degrees()) == {2} and girth(g) == n


def _k4_z2_all_nontree():
    return build_cover(k4(), cyclic_group(2), {2 * e: 1 for e in K4_NON_TREE})


def test_groups():
    g = elementary_abelian(2, 3)
    assert g.order == 8 and g.is_associative()
    assert all(g.mul(x, x) == g.identity for x in range(8))
    assert parse_group("Z2^3").order == 8
    assert parse_group("Z5").order == 5
    with pytest.raises(ValidationError):
        parse_group("S3")


def test_trivial_cover_is_base():
    c = trivial_cover(k4())
    assert c.total.edges() == k4().edges()
    assert c.index == 1


def test_c4_z2_gives_c8():
    c = build_cover(cycle_graph(4), cyclic_group(2), {0: 1})
    assert _is_cycle(c.total, 8)


def test_k4_z2_cover():
    c = _k4_z2_all_nontree()
    assert c.total.n == 8 and check_regular(c.total) == 2
    assert girth(c.total) == 4


def test_inconsistent_voltage():
    with pytest.raises(ValidationError, match="inconsistent"):
        build_cover(k4(), cyclic_group(3), {2: 1, 3: 1})


def test_non_generating_voltage_reports_subgroup():
    with pytest.raises(ValidationError, match="reached subgroup"):
        build_cover(k4(), elementary_abelian(2, 2), {2: 1})


def test_homology_tower_examples():
    (c,) = homology_tower(k4(), 2, 1, 100)
    assert (c.index, c.total.n) == (8, 32)
    (c,) = homology_tower(cycle_graph(4), 2, 1, 100)
    assert _is_cycle(c.total, 8)
    with pytest.raises(BudgetExceeded, match=r"level 2.*2\^17"):
        homology_tower(k4(), 2, 2, 100)


def test_homology_tower_rejects_composite():
    with pytest.raises(ValidationError):
        homology_tower(k4(), 4, 1, 100)


def test_composed_cycle_tower():
    tower = homology_tower(cycle_graph(4), 2, 3, 100)
    c = compose_covers(tower)
    assert c.index == 8 and _is_cycle(c.total, 32)


def test_random_cover_examples():
    assert random_cover(k4(), 1, seed=3).total.edges() == k4().edges()
    c = random_cover(k4(), 4, seed=5)
    assert c.total.n == 16 and check_regular(c.total) == 2 and girth(c.total) >= 3
    assert cover_to_json(c) == cover_to_json(random_cover(k4(), 4, seed=5))


@pytest.mark.parametrize("cover", [
    _k4_z2_all_nontree(),
    homology_cover(k4(), 2),
    random_cover(k4(), 3, seed=1),
    random_group_cover(petersen_graph(), elementary_abelian(3, 1), seed=2),
])
def test_cover_invariants(cover):
    base = cover.base
    assert euler_characteristic(cover.total) == cover.index * euler_characteristic(base)
    assert check_regular(cover.total) == check_regular(base)
    proj = cover.site_projection(DART)
    for t in range(cover.total.dart_count):
        # local bijection: projection commutes with tail and opposite
        d = proj[t]
        assert cover.vertex_projection(cover.total.tail(t))[0] == base.tail(d)
        assert proj[t ^ 1] == d ^ 1
    for v in range(base.n):
        lifts = [x for x in range(cover.total.n) if cover.vertex_projection(x)[0] == v]
        assert len(lifts) == cover.index


@pytest.mark.parametrize("cover", [_k4_z2_all_nontree(), homology_cover(k4(), 2),
                                   random_group_cover(k4(), elementary_abelian(3, 2), seed=4)])
def test_deck_action_free_transitive_and_equivariant(cover):
    grp = cover.group
    for x in range(cover.total.n):
        orbit = {cover.deck(h, VERTEX, x) for h in range(grp.order)}
        assert len(orbit) == grp.order
        assert {cover.vertex_projection(y)[0] for y in orbit} == {cover.vertex_projection(x)[0]}
    g = cover.total
    for h in range(grp.order):
        for t in range(g.dart_count):
            s = cover.deck(h, DART, t)
            assert g.tail(s) == cover.deck(h, VERTEX, g.tail(t))


def test_lift_trivial_and_rank_zero():
    c = homology_cover(k4(), 2)
    ls = lift_local_system(trivial_local_system(k4()), c)
    assert all(v[0, 0] == 1 for v in ls.voltages)
    assert lift_local_system(trivial_local_system(k4(), dim=0), c).dim == 0


def _lift_closes(cover, walk):
    sheet = 0
    for d in walk:
        sheet = cover.perms[d][sheet]
    return sheet == 0


def test_sign_lift_closed_loops_have_trivial_monodromy():
    cover = _k4_z2_all_nontree()
    sign = k4_sign()
    for geo in enumerate_primitive(k4(), 6):
        m = monodromy(sign, geo)[0, 0]
        assert (m == 1) == _lift_closes(cover, geo.darts)


def test_summation_examples():
    c = homology_cover(k4(), 2)
    sec = np.zeros((c.total.n, 1))
    sec[c.vertex_lift(2, 5)] = 1
    out = summation_map(c, sec)
    assert out[2, 0] == 1 and out.sum() == 1
    fiber = np.zeros((c.total.n, 1))
    for i in range(c.index):
        fiber[c.vertex_lift(1, i)] = 1
    assert summation_map(c, fiber)[1, 0] == c.index
    base = np.arange(4.0).reshape(4, 1)
    assert (summation_map(trivial_cover(k4()), base) == base).all()


def _ops(ls):
    return [(KernelOperator.from_twisted(twisted_laplacian(ls), ls.kind), twisted_laplacian),
            (KernelOperator.from_twisted(dart_operator(ls), ls.kind), dart_operator)]


COVERS = [trivial_cover(k4()), homology_cover(k4(), 2), _k4_z2_all_nontree(),
          random_cover(k4(), 4, seed=9), random_cover(cycle_graph(4), 3, seed=1)]


@pytest.mark.parametrize("cover", COVERS)
@pytest.mark.parametrize("signed", [False, True])
def test_pushdown_of_lift_is_base(cover, signed):
    base_ls = random_sign_local_system(cover.base, 6) if signed else trivial_local_system(cover.base)
    lifted = lift_local_system(base_ls, cover)
    for op, build in _ops(lifted):
        expected = KernelOperator.from_twisted(build(base_ls), base_ls.kind)
        assert check_deck_invariance(op, cover)
        a = pushdown(op, cover)
        b = pushdown_via_summation(op, cover)
        assert a.equals(expected) and b.equals(expected) and a.equals(b)


def test_trivial_cover_pushdown_is_identity():
    ls = k4_sign()
    op = KernelOperator.from_twisted(twisted_laplacian(ls), ls.kind)
    assert pushdown(op, trivial_cover(k4())).equals(op)


def test_non_invariant_operator_rejected():
    c = homology_cover(k4(), 2)
    mat = fields.zeros((c.total.n, c.total.n), fields.RATIONAL)
    mat[0, 0] = fields.convert(1, fields.RATIONAL)
    op = KernelOperator.from_matrix(c.total, VERTEX, 1, fields.RATIONAL, mat)
    with pytest.raises(ValidationError):
        pushdown(op, c)
    with pytest.raises(ValidationError):
        pushdown_via_summation(op, c)


def test_propagation_radii():
    ls = trivial_local_system(petersen_graph())
    lap = KernelOperator.from_twisted(twisted_laplacian(ls), ls.kind)
    dart = KernelOperator.from_twisted(dart_operator(ls), ls.kind)
    assert lap.radius == 1 and dart.radius == 1
    assert (lap @ lap).radius == 2
    prop = check_propagation(lap)
    assert len(prop.per_site) == 10 and max(prop.per_site) == 1


@pytest.mark.parametrize("base, cover", [(k4(), _k4_z2_all_nontree()),
                                         (cycle_graph(4), build_cover(cycle_graph(4), cyclic_group(2), {0: 1}))])
def test_zeta_divisibility(base, cover):
    zb = bass_zeta(trivial_local_system(base))
    zc = bass_zeta(lift_local_system(trivial_local_system(base), cover))
    _, rem = zc.divmod(zb)
    assert rem.degree <= 0 and rem[0] == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=10**6))
def test_random_cover_seed_determinism(degree, seed):
    a = random_cover(k4(), degree, seed)
    b = random_cover(k4(), degree, seed)
    assert a.perms == b.perms
    assert a.total.n == 4 * degree
