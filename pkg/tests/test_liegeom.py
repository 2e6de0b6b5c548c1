import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from ggtool import liegeom as lg
from ggtool.cliffordspin import SpinModule, clifford_act, random_spinor, random_unit_pure
from ggtool.exteriorcore import (
    MetricData,
    MultiForm,
    all_masks,
    exp_wedge,
    hodge_star,
    parse_form,
    wedge,
)
from ggtool.genalg import build_su_m
from ggtool.scalars import GaussRat, RationalRandom
from ggtool.verify import _rand_form

seeds = st.integers(0, 10**6)
HEIS = "0,0,0,0,0,12"


def blade(text, n=6):
    return parse_form(text, n)


# models


def test_torus_has_zero_differential():
    M = lg.parse_model("0,0,0,0,0,0")
    assert all(M.d_blade(K).is_zero() for K in all_masks(6))


def test_heisenberg_differential():
    M = lg.parse_model(HEIS)
    assert M.d(blade("e6")).equals(blade("e12"))
    assert M.is_nilpotent() and M.is_unimodular()


def test_jacobi_violation_reports_component():
    with pytest.raises(lg.ModelError, match="e\\^6"):
        lg.parse_model("0,0,0,12,13,45")


def test_rational_multipliers_and_round_trip():
    M = lg.parse_model("0,0,(1/2)*12,2*13")
    assert M.d(parse_form("e3", 4)).equals(parse_form("(1/2)*e12", 4))
    assert lg.parse_model(M.salamon) == M


def test_relabel_and_non_nilpotent():
    M = lg.parse_model("0,0,0,0,12,13").relabel((0, 3, 1, 2, 4, 5))
    assert M.salamon == "0,0,0,0,13,14"
    su2 = lg.parse_model("23,-13,12,0,0,0")
    assert su2.is_unimodular() and not su2.is_nilpotent()


@given(seeds)
def test_d_squared_vanishes(seed):
    M = lg.parse_model("0,0,0,0,13-24,14+23")
    a = _rand_form(RationalRandom(seed), 6)
    assert M.d(M.d(a)).is_zero()


@given(seeds)
def test_d_hat_identity(seed):
    from ggtool.exteriorcore import hat, tilde

    M = lg.parse_model("0,0,0,12,13,23")
    a = _rand_form(RationalRandom(seed), 6)
    assert hat(M.d(a)).equals(-M.d(hat(tilde(a))))


# twisted differential


def test_twisted_differential_on_torus():
    T = lg.parse_model("0,0,0,0,0,0")
    H = blade("e123")
    one = MultiForm.scalar(6, GaussRat(1))
    assert lg.d_H(T, H, one).equals(H)
    assert lg.d_H(T, H, H).is_zero()


def test_twisted_square_on_heisenberg():
    M = lg.parse_model(HEIS)
    H = blade("e345")
    assert lg.d_H_squared_defect(M, H) is None
    for K in all_masks(6):
        e = MultiForm(6, {K: GaussRat(1)})
        assert lg.d_H(M, H, lg.d_H(M, H, e)).is_zero()


def test_nonclosed_flux_flagged():
    M = lg.parse_model(HEIS)
    bad = blade("e346")
    assert lg.d_H_squared_defect(M, bad) is not None


@pytest.mark.parametrize(
    "salamon,H,dims",
    [
        ("0,0,0,0,0,0", "0", (32, 32)),
        ("0,0,0,0,0,0", "e123", (24, 24)),
        (HEIS, "0", (24, 24)),
        (HEIS, "e345", (18, 18)),
    ],
)
def test_twisted_cohomology_dims(salamon, H, dims):
    res = lg.twisted_cohomology(lg.parse_model(salamon), blade(H), harmonic=False)
    assert (res.dim_ev, res.dim_od) == dims


def test_cohomology_invariant_under_exact_shift():
    M = lg.parse_model(HEIS)
    H = blade("e345")
    B = blade("e36 + 2*e45")
    a = lg.twisted_cohomology(M, H, harmonic=False)
    b = lg.twisted_cohomology(M, H + M.d(B), harmonic=False)
    assert (a.dim_ev, a.dim_od) == (b.dim_ev, b.dim_od)
    eB = exp_wedge(B)
    rho = _rand_form(RationalRandom(1), 6)
    assert lg.d_H(M, H, wedge(eB, rho)).equals(wedge(eB, lg.d_H(M, H + M.d(B), rho)))


def test_harmonic_representatives():
    M = lg.parse_model(HEIS)
    H = blade("e345")
    res = lg.twisted_cohomology(M, H)
    for tau in res.harmonic_ev + res.harmonic_od:
        assert lg.d_H(M, H, tau).is_zero()
        assert lg.codifferential(M, H, None, tau).is_zero()


@given(seeds)
def test_codifferential_adjoint(seed):
    M = lg.parse_model(HEIS)
    H = blade("e345")
    g = MetricData.from_matrix([[4 if i == j == 0 else int(i == j) for j in range(6)] for i in range(6)])
    r = RationalRandom(seed)
    s, t = _rand_form(r, 6), _rand_form(r, 6)
    lhs = lg.l2_pairing(lg.d_H(M, H, s), t, g)
    rhs = lg.l2_pairing(s, lg.codifferential(M, H, g, t), g)
    assert lhs == rhs


@given(seeds)
def test_codifferential_matches_classical_formula(seed):
    M = lg.parse_model(HEIS)
    n = 6
    r = RationalRandom(seed)
    for p in range(1, n + 1):
        a = _rand_form(r, n, p)
        classical = hodge_star(None, M.d(hodge_star(None, a))) * (-1) ** (n * (p + 1) + 1)
        assert lg.codifferential(M, None, None, a).equals(classical)


def test_codifferential_of_one():
    M = lg.parse_model(HEIS)
    assert lg.codifferential(M, None, None, MultiForm.scalar(6, GaussRat(1))).is_zero()


# connections and curvature


def test_flat_torus_spinors_parallel():
    T = lg.parse_model("0,0,0,0,0,0")
    psi = random_spinor(SpinModule(6), RationalRandom(0))
    for sign in (-1, 1):
        conn = lg.connection(T, None, None, sign)
        assert all(lg.nabla_spinor_frame(conn, i, psi).is_zero() for i in range(6))


def test_torsion_term_on_torus():
    T = lg.parse_model("0,0,0,0,0,0")
    psi = random_spinor(SpinModule(6), RationalRandom(4))
    conn = lg.connection(T, None, blade("e123"), 1)
    expected = clifford_act(blade("e23"), psi) / 4
    assert lg.nabla_spinor(conn, [1, 0, 0, 0, 0, 0], psi).equals(expected)


@pytest.mark.parametrize("sign", [-1, 0, 1])
def test_metricity_and_torsion(sign):
    M = lg.parse_model(HEIS)
    conn = lg.connection(M, None, blade("e345"), sign)
    assert not conn.metricity_defect()
    assert conn.torsion_is_skew()
    assert conn.torsion().equals(blade("e345") * sign)


def test_heisenberg_scalar_curvature():
    M = lg.parse_model(HEIS)
    conn = lg.connection(M, None, None, 0)
    assert lg.scalar_curvature(conn) == GaussRat(mpq(-1, 2))
    assert lg.nilpotent_scalar_curvature(M) == GaussRat(mpq(-1, 2))
    Ric = lg.ricci(conn)
    assert [Ric[i][i] for i in range(6)] == [GaussRat(mpq(-1, 2))] * 2 + [0] * 3 + [GaussRat(mpq(1, 2))]


def test_bismut_scalar_curvature():
    M = lg.parse_model(HEIS)
    conn = lg.connection(M, None, blade("e345"), 1)
    assert lg.scalar_curvature(conn) == -2


# field equations


def _straight(model_text, H="0", alpha="0"):
    M = lg.parse_model(model_text)
    v = SpinModule(6).fock_vacuum()
    s = build_su_m(MetricData.identity(6), None, blade(alpha), 1, v, v)
    return lg.Background(M, s, blade(H))


def test_dilatino_on_torus():
    bg = _straight("0,0,0,0,0,0", alpha="e1")
    L, R = lg.modified_dilatino_residual(bg)
    psi = bg.structure.psiL
    assert L.equals(-clifford_act(blade("e1"), psi))
    assert R.equals(-clifford_act(blade("e1"), psi))


def test_calabi_yau_torus_residuals_vanish():
    bg = _straight("0,0,0,0,0,0")
    zero = MultiForm.zero(6)
    summ = lg.residual_summary(bg, zero, zero)
    assert summ.form_side_zero and summ.spinor_side_zero()


def test_w3_witness_corrected_versus_flipped():
    bg = _straight("0,0,0,0,13,14")
    F0, F1 = lg.rr_fields_of(bg)
    assert F1.is_zero() and not F0.is_zero()
    good = lg.residual_summary(bg, F0, F1)
    bad = lg.residual_summary(bg, F0, F1, "flipped")
    assert good.form_side_zero and good.spinor_side_zero()
    assert not bad.spinor_side_zero()


def test_b_field_covariance():
    M = lg.parse_model("0,0,0,0,13,14")
    r = RationalRandom(9)
    mod = SpinModule(6)
    psiL, psiR = random_unit_pure(mod, r), random_unit_pure(mod, r)
    B = blade("e12 - (1/2)*e35")
    H = MultiForm.zero(6)
    s0 = build_su_m(MetricData.identity(6), None, None, 1, psiL, psiR)
    s1 = build_su_m(MetricData.identity(6), B, None, 1, psiL, psiR)
    bg0, bg1 = lg.Background(M, s0, H), lg.Background(M, s1, H - M.d(B))
    F0, F1 = _rand_form(r, 6).odd(), _rand_form(r, 6).even()
    eB = exp_wedge(B)
    a0, a1 = lg.dh_residual(bg0, F0, F1)
    b0, b1 = lg.dh_residual(bg1, wedge(eB, F0), wedge(eB, F1))
    assert b0.equals(wedge(eB, a0)) and b1.equals(wedge(eB, a1))
    g0 = lg.gravitino_residual(bg0, F0, F1)
    g1 = lg.gravitino_residual(bg1, wedge(eB, F0), wedge(eB, F1))
    assert all(x.equals(y) for p, q in zip(g0, g1) for x, y in zip(p, q))


# classification and critical points


@pytest.mark.parametrize(
    "salamon,flag",
    [
        ("0,0,0,0,0,0", "CalabiYau"),
        ("0,0,0,0,13,14", "W3"),
        ("0,0,0,13,16,0", "W2+"),
        ("0,0,0,15,0,13", "W2-"),
    ],
)
def test_classification(salamon, flag):
    bg = _straight(salamon)
    assert flag in lg.classify_special_types(bg.model, bg.structure).flags


def test_classification_requires_straight():
    M = lg.parse_model("0,0,0,0,0,0")
    r = RationalRandom(2)
    mod = SpinModule(6)
    s = build_su_m(MetricData.identity(6), None, None, 1, random_unit_pure(mod, r), random_unit_pure(mod, r))
    with pytest.raises(ValueError):
        lg.classify_special_types(M, s)


def test_constrained_critical_point_example():
    M = lg.parse_model("0,0,0,0,13,14")
    om = blade("-e12 - e34 - e56")
    tau = MultiForm.scalar(6, GaussRat(1)) - wedge(om, om) / 2
    res = lg.constrained_critical_check(M, None, None, tau, om)
    assert res.critical and res.lam == 1 and res.residual == 0


def test_random_closed_form_not_critical():
    M = lg.parse_model("0,0,0,0,13,14")
    r = RationalRandom(3)
    tau = MultiForm.scalar(6, GaussRat(1)) + M.d(_rand_form(r, 6).odd())
    res = lg.constrained_critical_check(M, None, None, tau, _rand_form(r, 6).even())
    assert not res.critical and res.residual > 0


def test_critical_rejects_nonclosed():
    M = lg.parse_model("0,0,0,0,13,14")
    with pytest.raises(ValueError):
        lg.constrained_critical_check(M, None, None, blade("e5"), blade("e12"))


def test_harmonic_form_is_unconstrained_critical():
    M = lg.parse_model("0,0,0,0,0,0")
    res = lg.constrained_critical_check(M, None, None, blade("e12"), blade("e34"))
    assert res.critical and res.lam is None


# no-go


def test_gravdil_kernel_torus():
    T = lg.parse_model("0,0,0,0,0,0")
    mod = SpinModule(6)
    assert len(lg.gravdil_kernel(T, None, None, None, mod)) == 8
    assert lg.gravdil_kernel(T, None, blade("e123"), None, mod) == []


def test_linear_dilaton_breaks_flux_identity():
    M = lg.parse_model("23,-13,12,0,0,0")
    H, alpha = blade("e123"), blade("(1/2)*e4")
    mod = SpinModule(6)
    ker = lg.gravdil_kernel(M, None, H, alpha, mod)
    assert len(ker) == 4
    rep = lg.curvature_report(M, None, H, alpha, ker)
    assert rep.scalar_plus == 0 and rep.laplacian_proxy == 0
    assert rep.scal_identity and not rep.dilH_identity
    assert lg.gravdil_kernel(M, None, -H, alpha, mod) == []
