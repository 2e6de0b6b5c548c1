import pytest
from hypothesis import given
from hypothesis import strategies as st

from ggtool.cliffordspin import SpinModule, random_unit_pure
from ggtool.exteriorcore import MetricData, MultiForm, exp_wedge, mukai_pair
from ggtool.genalg import (
    GenVector,
    b_transform,
    build_su_m,
    gcs_from_pure,
    gen_act,
    inner,
    is_spin_pure,
    rr_annihilator_space,
    rr_conditions,
    rr_space,
    validate_structure,
)
from ggtool.scalars import GaussRat, RationalRandom
from ggtool.verify import _rand_form, _rand_vec

seeds = st.integers(0, 10**6)


@given(seeds, st.sampled_from([2, 3, 4, 6]))
def test_generalised_clifford_relation(seed, n):
    r = RationalRandom(seed)
    v = GenVector.of(_rand_vec(r, n), _rand_vec(r, n))
    rho = _rand_form(r, n)
    assert gen_act(v, gen_act(v, rho)).equals(rho * (-inner(v, v)))


@given(seeds, st.sampled_from([2, 4, 6]))
def test_b_transform_equivariance(seed, n):
    r = RationalRandom(seed)
    B = _rand_form(r, n, 2)
    v = GenVector.of(_rand_vec(r, n), _rand_vec(r, n))
    rho = _rand_form(r, n)
    lhs = b_transform(B, gen_act(v, rho))
    rhs = gen_act(b_transform(B, v), b_transform(B, rho))
    assert lhs.equals(rhs)


def test_exp_b_is_pure():
    B = MultiForm(4, {0b11: GaussRat(2), 0b1100: GaussRat(-1, 1)})
    assert is_spin_pure(exp_wedge(B))


def _random_structure(seed):
    r = RationalRandom(seed)
    mod = SpinModule(6)
    psiL = random_unit_pure(mod, r)
    psiR = random_unit_pure(mod, r)
    B = MultiForm(6, {K: r.real() for K in (0b11, 0b1100, 0b110000, 0b100001)})
    return build_su_m(MetricData.identity(6), B, None, GaussRat(r.integer(1, 4)), psiL, psiR)


@pytest.mark.parametrize("seed", [1, 2])
def test_structure_validates(seed):
    rep = validate_structure(_random_structure(seed))
    assert rep.rho0_pure and rep.rho1_pure and rep.commute and rep.metric_recovered and rep.length_ok


def test_reducible_flag_for_orthogonal_pair():
    mod = SpinModule(6)
    v = mod.fock_vacuum()
    w = None
    for b in range(mod.dim):
        cand = mod.basis(b)
        if cand.chirality() == 1 and not cand.equals(v):
            w = cand
            break
    s = build_su_m(MetricData.identity(6), None, None, 1, v, w)
    assert s.flags == ("straight-reducible to SU(2)",)
    assert validate_structure(s).ok


def test_build_rejects_bad_input():
    mod = SpinModule(6)
    v = mod.fock_vacuum()
    with pytest.raises(ValueError):
        build_su_m(MetricData.identity(6), None, None, 1, v * 2, v)
    with pytest.raises(ValueError):
        build_su_m(MetricData.identity(6), None, None, -1, v, v)


def test_rr_space_matches_annihilators():
    s = _random_structure(7)
    for parity in ("even", "odd"):
        sp = rr_space(s, parity)
        ann = rr_annihilator_space(s, parity)
        assert sp.dim == len(ann) == 18
        assert all(sp.contains(F) for F in ann)
        for F in sp.basis:
            assert all(x.is_zero() for x in rr_conditions(s, F))


def test_rr_projection_is_idempotent():
    s = _random_structure(3)
    sp = rr_space(s, "odd")
    F = _rand_form(RationalRandom(4), 6)
    P = sp.project(F.odd())
    assert sp.project(P).equals(P)
    assert sp.is_rr(P)


def test_pure_forms_pair_nontrivially():
    s = _random_structure(5)
    nu = s.g.volume_element()
    assert mukai_pair(s.rho0, s.rho0.conjugate(), nu) != 0
    J0 = gcs_from_pure(s.rho0)
    assert J0.squares_to_minus_one() and J0.is_isometry()
