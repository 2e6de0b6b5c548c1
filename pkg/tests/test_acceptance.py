"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run ``python tests/test_acceptance.py`` for the bare summary lines.
"""

from __future__ import annotations

import sys

import pytest
from gmpy2 import mpq

from ggtool import liegeom as lg
from ggtool.cliffordspin import (
    SpinModule,
    chiral_projection,
    clifford_act,
    fierz,
    fierz_trace,
    random_spinor,
    random_unit_pure,
)
from ggtool.exteriorcore import MetricData, MultiForm, g_tilde, parse_form, wedge
from ggtool.genalg import build_su_m, rr_annihilator_space, rr_space, validate_structure
from ggtool.linalg import rank
from ggtool.scalars import FLOAT, GaussRat, RationalRandom
from ggtool.verify import builtin_scenarios, no_go_probe, run_identity_suite, susy_roundtrip

TOL = 1e-10
HEIS = "0,0,0,0,0,12"


def _line(num: int, title: str, checks: dict[str, bool], note: str = "") -> bool:
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    text = f"criterion {num} {title}: {'PASS' if ok else 'FAIL'}"
    if failed:
        text += " (failing: " + ", ".join(failed) + ")"
    if note:
        text += f" [{note}]"
    print(text, file=sys.__stdout__, flush=True)
    return ok


# 1 -------------------------------------------------------------------------


def criterion_1() -> dict[str, bool]:
    checks = {}
    for n in (4, 6):
        rep = run_identity_suite(n, seed=1, trials=100)
        for c in rep.checks:
            checks[f"n={n} {c.name}"] = c.passed and c.residual == 0 and c.trials == 100
    flt = run_identity_suite(6, seed=2, trials=10, arith=FLOAT)
    checks["float mode"] = all(c.passed and c.residual <= TOL for c in flt.checks)
    m4, m6 = SpinModule(4), SpinModule(6)
    checks["A^2 = -Id (m=2)"] = m4.m_hat == -1
    checks["A^2 = +Id (m=3)"] = m6.m_hat == 1
    vol = MultiForm(6, {63: GaussRat(1)})
    r = RationalRandom(5)
    psi = chiral_projection(random_spinor(m6, r), 1)
    checks["volume -i on Delta+"] = clifford_act(vol, psi).equals(psi * GaussRat(0, -1))
    phi = chiral_projection(random_spinor(m6, r), 1)
    F = fierz(random_spinor(m6, r), phi)
    checks["selfdual eigenvalue +i"] = g_tilde(None, F).equals(F * GaussRat(0, 1))
    return checks


def test_criterion_1_identity_suite():
    assert _line(1, "identity suite", criterion_1())


# 2 -------------------------------------------------------------------------


def criterion_2() -> dict[str, bool]:
    mod = SpinModule(6)
    r = RationalRandom(2024)
    ok = True
    for _ in range(100):
        p, f = random_spinor(mod, r), random_spinor(mod, r)
        ok &= fierz(p, f).equals(fierz_trace(p, f))
    return {"coefficientwise = trace route (100 pairs)": ok}


def test_criterion_2_fierz_oracle():
    assert _line(2, "fierz oracle equivalence", criterion_2())


# 3 -------------------------------------------------------------------------


def _random_structures(count: int = 20):
    mod = SpinModule(6)
    r = RationalRandom(33)
    out = []
    for _ in range(count):
        psiL, psiR = random_unit_pure(mod, r), random_unit_pure(mod, r)
        B = MultiForm(6, {K: r.real() for K in (0b11, 0b1100, 0b110000, 0b100001, 0b1010)})
        c_phi = GaussRat(mpq(r.integer(1, 9), r.integer(1, 9)))
        out.append(build_su_m(MetricData.identity(6), B, None, c_phi, psiL, psiR))
    return out


def criterion_3() -> tuple[dict[str, bool], dict[str, bool], str]:
    core = {"pure": True, "pairings nonzero": True, "commute": True, "metric recovered": True, "length (-1)^m": True}
    textbook = {"length c = 3/4": True}
    ratios = set()
    for s in _random_structures():
        rep = validate_structure(s)
        core["pure"] &= rep.rho0_pure and rep.rho1_pure
        core["pairings nonzero"] &= rep.pair0 != 0 and rep.pair1 != 0
        core["commute"] &= rep.commute
        core["metric recovered"] &= rep.metric_recovered
        core["length (-1)^m"] &= rep.length_ok
        textbook["length c = 3/4"] &= rep.textbook_length_ok
        ratios.add(str(rep.length_ratio))
    return core, textbook, "observed length ratio " + ",".join(sorted(ratios))


def test_criterion_3_structure_core():
    core, _, _ = criterion_3()
    assert all(core.values()), core


@pytest.mark.xfail(strict=True, reason="pairing ratio is (-1)^m for unit spinors, never 3/4; see decisions ledger")
def test_criterion_3_structure_equivalence():
    core, textbook, note = criterion_3()
    assert _line(3, "structure equivalence", {**core, **textbook}, note)


# 4 -------------------------------------------------------------------------


def criterion_4() -> dict[str, bool]:
    checks = {}
    torus = lg.twisted_cohomology(lg.parse_model("0,0,0,0,0,0"), None, harmonic=False)
    checks["torus (32,32)"] = (torus.dim_ev, torus.dim_od) == (32, 32)
    M = lg.parse_model(HEIS)
    H = parse_form("e345", 6)
    r = RationalRandom(4)
    from ggtool.verify import _rand_form

    adj = True
    for _ in range(100):
        s, t = _rand_form(r, 6), _rand_form(r, 6)
        adj &= lg.l2_pairing(lg.d_H(M, H, s), t) == lg.l2_pairing(s, lg.codifferential(M, H, None, t))
    checks["adjointness (100 pairs)"] = adj
    res = lg.twisted_cohomology(M, H)
    harm = True
    for tau in res.harmonic_ev + res.harmonic_od:
        harm &= lg.d_H(M, H, tau).is_zero() and lg.d_H(M, H, g_tilde(None, tau)).is_zero()
    checks["harmonic representatives"] = harm and len(res.harmonic_ev) == res.dim_ev
    return checks


def test_criterion_4_hodge_theory():
    assert _line(4, "Hodge theory", criterion_4())


# 5 -------------------------------------------------------------------------


def criterion_5() -> dict[str, bool]:
    cat = builtin_scenarios()
    checks = {}
    cy = cat["torus_cy"]
    bg = cy.background
    z = MultiForm.zero(6)
    summ = lg.residual_summary(bg, z, z)
    checks["(a) torus CY residuals 0"] = summ.form_side_zero and summ.spinor_side_zero()
    w3 = cat["w3_nilmanifold"]
    rep = susy_roundtrip(w3, probes=40, seed=0)
    D0, D1 = lg.rr_fields_of(w3.background)
    F0, _ = w3.fluxes()
    checks["(b) d rho1 = 0"] = D1.is_zero()
    checks["(b) IIB phase option"] = rep.get("IIB-constraint").passed
    sp = rr_space(w3.structure, "odd")
    checks["(b) F0 in 18-dim RR space"] = sp.dim == 18 and sp.contains(F0)
    checks["(b) spinor residuals <= tol"] = float(rep.values["spinor-residual"]) <= TOL
    checks["(c) 40 probes break both sides"] = rep.get("probe-both-break").passed and rep.get("probe-both-break").trials == 40
    return checks


def test_criterion_5_integrability_round_trip():
    assert _line(5, "integrability round trip", criterion_5())


# 6 -------------------------------------------------------------------------


def criterion_6() -> dict[str, bool]:
    checks = {}
    mod = SpinModule(6)
    v = mod.fock_vacuum()
    r = RationalRandom(6)
    structures = {
        "straight": build_su_m(MetricData.identity(6), None, None, 1, v, v),
        "generic": build_su_m(MetricData.identity(6), None, None, 1, random_unit_pure(mod, r), random_unit_pure(mod, r)),
    }
    for name, s in structures.items():
        for parity in ("even", "odd"):
            sp = rr_space(s, parity)
            ann = rr_annihilator_space(s, parity)
            a = [F.dense() for F in sp.basis]
            b = [F.dense() for F in ann]
            ra, rb, rab = rank(a), rank(b), rank(a + b)
            checks[f"{name} {parity}"] = ra == rb == rab == 18
    return checks


def test_criterion_6_rr_characterisation():
    assert _line(6, "RR characterisation", criterion_6())


# 7 -------------------------------------------------------------------------


def criterion_7() -> tuple[dict[str, bool], dict[str, bool]]:
    cat = builtin_scenarios()
    scal, dil = {}, {}
    for name, sc in sorted(cat.items()):
        rep = no_go_probe(sc, TOL)
        if int(rep.values["witness-dim"]) > 0:
            scal[f"{name} S+ = 2 laplacian"] = rep.get("S+ = 2 laplacian").passed
            dil[f"{name} S+ = -3|H|^2"] = rep.get("S+ = -3|H|^2").passed
    torus_h = no_go_probe(cat["torus_h"], TOL)
    scal["torus H=e123 kernel empty"] = torus_h.get("kernel-empty").passed
    return scal, dil


def test_criterion_7_scal_identity_and_kernel():
    scal, dil = criterion_7()
    assert all(scal.values()), scal
    assert dil["torus_cy S+ = -3|H|^2"] and dil["torus6 S+ = -3|H|^2"]


@pytest.mark.xfail(strict=True, reason="su(2)+R^3 linear dilaton has witnesses with S+ = 0 but |H|^2 = 1; see decisions ledger")
def test_criterion_7_no_go_identities():
    scal, dil = criterion_7()
    assert _line(7, "no-go identities", {**scal, **dil}, "su2_linear_dilaton: S+ = 0, -3|H|^2 = -3")


# 8 -------------------------------------------------------------------------


def criterion_8() -> dict[str, bool]:
    M = lg.parse_model("0,0,0,0,13,14")
    omega = parse_form("-e12 - e34 - e56", 6)
    tau0 = MultiForm.scalar(6, GaussRat(1)) - wedge(omega, omega) / 2
    ex = lg.constrained_critical_check(M, None, None, tau0, omega, TOL)
    from ggtool.verify import _rand_form

    r = RationalRandom(8)
    tau = MultiForm.scalar(6, GaussRat(1)) + M.d(_rand_form(r, 6).odd())
    rnd = lg.constrained_critical_check(M, None, None, tau, _rand_form(r, 6).even(), TOL)
    return {
        "example critical": ex.critical and ex.residual <= TOL,
        "random residual > 0": rnd.residual > 0,
    }


def test_criterion_8_constrained_critical_points():
    assert _line(8, "constrained critical points", criterion_8())


if __name__ == "__main__":
    _line(1, "identity suite", criterion_1())
    _line(2, "fierz oracle equivalence", criterion_2())
    core, textbook, note = criterion_3()
    _line(3, "structure equivalence", {**core, **textbook}, note)
    _line(4, "Hodge theory", criterion_4())
    _line(5, "integrability round trip", criterion_5())
    _line(6, "RR characterisation", criterion_6())
    scal, dil = criterion_7()
    _line(7, "no-go identities", {**scal, **dil}, "su2_linear_dilaton: S+ = 0, -3|H|^2 = -3")
    _line(8, "constrained critical points", criterion_8())
