import pytest
from hypothesis import given
from hypothesis import strategies as st

from ggtool.cliffordspin import SpinModule, random_unit_pure
from ggtool.exteriorcore import MetricData, MultiForm, parse_form
from ggtool.genalg import build_su_m
from ggtool import liegeom as lg
from ggtool.scalars import FLOAT, GaussRat, RationalRandom
from ggtool.verify import (
    CHECK_NAMES,
    NILPOTENT_6D,
    Report,
    Scenario,
    ScenarioError,
    builtin_scenario_texts,
    classify_scenario,
    dump_scenario,
    gravdil_flux_solutions,
    merge_reports,
    no_go_probe,
    parse_scenario,
    run_identity_suite,
    susy_roundtrip,
)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_identity_suite_passes(n):
    rep = run_identity_suite(n, seed=3, trials=4)
    assert rep.ok, rep.render()
    assert all(c.residual == 0 for c in rep.checks)


def test_identity_suite_dim8_smoke():
    assert run_identity_suite(8, seed=0, trials=1).ok


def test_identity_suite_float_mode():
    rep = run_identity_suite(4, seed=1, trials=3, arith=FLOAT)
    assert rep.ok
    assert all(c.residual <= 1e-10 for c in rep.checks)


def test_suite_is_deterministic():
    a = run_identity_suite(4, seed=7, trials=3).render()
    b = run_identity_suite(4, seed=7, trials=3).render()
    assert a == b and a.startswith("ggtool-report/1\n")


@pytest.mark.parametrize("name", CHECK_NAMES)
def test_every_check_is_mutation_sensitive(name):
    rep = run_identity_suite(6, seed=2, trials=2, mutations=[f"flip:{name}"], only=[name])
    assert len(rep.checks) == 1 and not rep.checks[0].passed


def test_hat_sign_mutation_breaks_form_identity():
    rep = run_identity_suite(6, seed=0, trials=3, mutations=["hat-sign"])
    assert not rep.get("d-hat").passed
    assert rep.get("commut-left").passed


def test_flipped_sign_laws_fail():
    rep = run_identity_suite(6, seed=0, trials=3, mutations=["flipped-signs"])
    failed = {c.name for c in rep.checks if not c.passed}
    assert {"commut-left", "commut-right", "action-wedge", "action-contract", "dirac-vs-d"} <= failed


def test_unknown_mutation_rejected():
    with pytest.raises(ValueError):
        run_identity_suite(4, mutations=["bogus"])


# scenarios


def test_catalog_entries_are_valid_nilpotent():
    assert len(NILPOTENT_6D) == len(set(NILPOTENT_6D)) == 32
    for text in NILPOTENT_6D:
        M = lg.parse_model(text)
        assert M.is_nilpotent() and M.is_unimodular()


@pytest.mark.parametrize("name", sorted(builtin_scenario_texts()))
def test_scenario_round_trip(catalog, name):
    sc = catalog[name]
    again = parse_scenario(dump_scenario(sc), name)
    assert again.same_as(sc)
    assert dump_scenario(again) == dump_scenario(sc)


@given(st.integers(0, 10**6), st.sampled_from(NILPOTENT_6D))
def test_random_scenario_round_trip(seed, salamon):
    r = RationalRandom(seed)
    mod = SpinModule(6)
    model = lg.parse_model(salamon)
    B = MultiForm(6, {0b11: r.real(), 0b110000: r.real()})
    psiL, psiR = random_unit_pure(mod, r), random_unit_pure(mod, r)
    g = MetricData.identity(6)
    sc = Scenario("rand", model, g, B, parse_form("e123", 6), MultiForm.zero(6), GaussRat(2), psiL, psiR, expect=("witness",))
    sc.F0 = parse_form("(1,2)*e135", 6)
    assert parse_scenario(dump_scenario(sc), "rand").same_as(sc)


@pytest.mark.parametrize(
    "text",
    [
        "[metric]\ng = identity\n",
        "[algebra]\nsalamon = 0,0,0,12,13,45\n",
        "[algebra]\nsalamon = 0,0\n[bogus]\nx = 1\n",
        "[algebra]\nsalamon = 0,0\n[spinors]\npsiL = [ (1,0) ]\npsiR = none\n",
        "[algebra]\nsalamon = 0,0,0,0,0,0\n[spinors]\npsiL = [ (2,0), (0,0), (0,0), (0,0), (0,0), (0,0), (0,0), (0,0) ]\npsiR = auto-pure\n",
        "[algebra]\nsalamon = 0,0\nno equals here\n",
    ],
)
def test_malformed_scenarios(text):
    with pytest.raises(ScenarioError):
        parse_scenario(text)


def test_inline_section_syntax_and_metric_forms():
    sc = parse_scenario("[algebra] salamon = 0,0,0,0,0,12\n[metric] g = diag(4,1,1,1,1,1)\n[flux] H = e345\n")
    assert sc.model.salamon == "0,0,0,0,0,12"
    assert sc.g.g[0][0] == 4
    assert sc.structure is None


def test_catalog_integrity(catalog):
    for name, sc in catalog.items():
        reports = [no_go_probe(sc)]
        if sc.structure is not None:
            reports += [classify_scenario(sc), susy_roundtrip(sc, probes=8)]
        for rep in reports:
            for c in rep.checks:
                if c.name.startswith("expect-") or c.name in ("witness-exists", "kernel-empty", "equivalence"):
                    assert c.passed, f"{name}: {c.line()}"


def test_susy_probes_w3(catalog):
    rep = susy_roundtrip(catalog["w3_nilmanifold"])
    assert rep.ok, rep.render()
    assert rep.get("probe-both-break").trials == 40


def test_susy_detects_wrong_flux(catalog):
    sc = catalog["w3_nilmanifold"]
    sc2 = parse_scenario(dump_scenario(sc).replace("F0 = (0,1)*e136 + (0,-1)*e145", "F0 = (0,1)*e136"), "broken")
    rep = susy_roundtrip(sc2, probes=0)
    assert not rep.get("rr-F0").passed
    assert rep.get("equivalence").passed


def test_linear_dilaton_no_go_finding(catalog):
    rep = no_go_probe(catalog["su2_linear_dilaton"])
    assert rep.get("witness-exists").passed
    assert rep.get("S+ = 2 laplacian").passed
    assert not rep.get("S+ = -3|H|^2").passed
    assert rep.values["dilaton"] == "local dilaton"


def test_flux_solver_recovers_linear_dilaton():
    model = lg.parse_model("23,-13,12,0,0,0")
    (H, alpha), ker = gravdil_flux_solutions(model, SpinModule(6).fock_vacuum())
    assert H.equals(parse_form("e123", 6)) and alpha.equals(parse_form("(1/2)*e4", 6))
    assert ker == []
    assert gravdil_flux_solutions(lg.parse_model("0,0,0,0,0,12"), SpinModule(6).fock_vacuum()) is None


def test_merge_orders_by_name_then_seed():
    a, b, c = Report("b", 1), Report("a", 2), Report("a", 1)
    text = merge_reports([a, b, c])
    assert text.index("suite: a\nseed: 1") < text.index("suite: a\nseed: 2") < text.index("suite: b")
    assert text.count("ggtool-report/1") == 1


def test_structure_from_scenario_matches_builder(catalog):
    sc = catalog["w3_nilmanifold"]
    v = SpinModule(6).fock_vacuum()
    s = build_su_m(MetricData.identity(6), None, None, 1, v, v)
    assert sc.structure.rho0.equals(s.rho0)
