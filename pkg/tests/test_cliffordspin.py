import pytest
from hypothesis import given
from hypothesis import strategies as st

from ggtool.cliffordspin import (
    SpinModule,
    a_form,
    charge_conj,
    chiral_projection,
    clifford_act,
    fierz,
    fierz_inverse,
    fierz_tensor,
    purity_test,
    q,
    random_spinor,
    random_unit_pure,
    su_basis,
    vector_act,
)
from ggtool.exteriorcore import MultiForm, parse_form
from ggtool.scalars import FLOAT, GaussRat, RationalRandom
from ggtool.verify import _rand_vec

seeds = st.integers(0, 10**6)
even_dims = st.sampled_from([2, 4, 6])


@given(seeds, st.sampled_from([2, 3, 4, 5, 6]))
def test_clifford_relation(seed, n):
    mod = SpinModule(n)
    r = RationalRandom(seed)
    X = _rand_vec(r, n)
    psi = random_spinor(mod, r)
    norm = sum(x * x for x in X)
    assert vector_act(X, vector_act(X, psi)).equals(psi * (-norm))


@pytest.mark.parametrize("n,expected", [(2, -1), (4, -1), (6, 1), (8, 1)])
def test_charge_conjugation_square(n, expected):
    mod = SpinModule(n)
    psi = random_spinor(mod, RationalRandom(n))
    assert charge_conj(charge_conj(psi)).equals(psi * expected)


def test_volume_eigenvalue_n6():
    mod = SpinModule(6)
    vol = MultiForm(6, {63: GaussRat(1)})
    psi = chiral_projection(random_spinor(mod, RationalRandom(3)), 1)
    assert clifford_act(vol, psi).equals(psi * GaussRat(0, -1))


def test_fock_vacuum_is_pure_positive():
    mod = SpinModule(6)
    v = mod.fock_vacuum()
    assert v.chirality() == 1
    assert purity_test(v).is_pure
    assert q(v, v) == 1


@given(seeds)
def test_every_chiral_spinor_pure_in_dim6(seed):
    mod = SpinModule(6)
    psi = chiral_projection(random_spinor(mod, RationalRandom(seed)), 1)
    if not psi.is_zero():
        res = purity_test(psi)
        assert res.is_pure and res.annihilator_dimension == 3


def test_impure_in_dim8():
    mod = SpinModule(8)
    v = mod.fock_vacuum()
    w = v + vector_act([1, 0, 0, 0, 0, 0, 0, 0], vector_act([0, 0, 1, 0, 0, 0, 0, 0], vector_act([0, 0, 0, 0, 1, 0, 0, 0], vector_act([0, 0, 0, 0, 0, 0, 1, 0], v))))
    assert not purity_test(w).is_pure


@given(seeds, even_dims)
def test_a_form_laws(seed, n):
    mod = SpinModule(n)
    r = RationalRandom(seed)
    p, f = random_spinor(mod, r), random_spinor(mod, r)
    X = _rand_vec(r, n)
    assert a_form(p, f) == a_form(f, p) * mod.m_hat
    assert a_form(vector_act(X, p), f) == a_form(p, vector_act(X, f)) * (-1) ** mod.m


@given(seeds, even_dims)
def test_fierz_round_trip(seed, n):
    mod = SpinModule(n)
    r = RationalRandom(seed)
    F = fierz(random_spinor(mod, r), random_spinor(mod, r))
    assert fierz_tensor(fierz_inverse(F, mod), mod).equals(F)


def test_su_basis_dimensions_dim6():
    b = su_basis(SpinModule(6).fock_vacuum())
    dims = b.dims()
    assert sum(dims.values()) == 8


def test_float_mode_matches_exact():
    exact = SpinModule(4)
    flt = SpinModule(4, FLOAT)
    p = random_spinor(exact, RationalRandom(5))
    pf = flt.spinor([complex(x) for x in p.v])
    F, Ff = fierz(p, p), fierz(pf, pf)
    for k, v in F.c.items():
        assert abs(complex(v) - Ff.c.get(k, 0)) < 1e-12


def test_random_unit_pure_has_unit_norm():
    mod = SpinModule(6)
    psi = random_unit_pure(mod, RationalRandom(11))
    assert q(psi, psi) == 1 and purity_test(psi).is_pure


def test_clifford_act_by_form_literal():
    mod = SpinModule(4)
    psi = random_spinor(mod, RationalRandom(2))
    e12 = parse_form("e12", 4)
    lhs = clifford_act(e12, psi)
    rhs = vector_act([1, 0, 0, 0], vector_act([0, 1, 0, 0], psi))
    assert lhs.equals(rhs)
