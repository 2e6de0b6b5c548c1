import pathlib

import pytest

from ggtool.cli import main
from ggtool.verify import load_scenario

SCN = pathlib.Path(__file__).resolve().parent.parent / "scenarios"


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def test_check_identities(capsys):
    status, out, _ = run(capsys, "check-identities", "--n", "6", "--seed", "1", "--trials", "3")
    assert status == 0
    assert out.startswith("ggtool-report/1\n")
    assert "seed=1" in out and "summary: pass=" in out


def test_mutation_flag_fails(capsys):
    status, out, _ = run(capsys, "check-identities", "--n", "4", "--trials", "2", "--mutation", "hat-sign")
    assert status == 1
    assert "check d-hat status=FAIL" in out


def test_cohomology_torus(capsys):
    status, out, _ = run(capsys, "cohomology", str(SCN / "torus6.scn"))
    assert status == 0 and "ev=32 od=32" in out


def test_susy_check_torus(capsys):
    status, out, _ = run(capsys, "susy-check", str(SCN / "torus_cy.scn"), "--probes", "4")
    assert status == 0
    assert "value dh-residual = 0.000e+00" in out


def test_classify_emit_round_trip(capsys, tmp_path):
    dest = tmp_path / "out.scn"
    status, out, _ = run(capsys, "classify", str(SCN / "w3_nilmanifold.scn"), "--emit", str(dest))
    assert status == 0 and "flags = W3" in out
    original = load_scenario(str(SCN / "w3_nilmanifold.scn"))
    emitted = load_scenario(str(dest))
    assert emitted.same_as(original)
    assert load_scenario(str(dest)).same_as(emitted)


def test_no_go_exit_status(capsys):
    assert run(capsys, "no-go", "builtin:torus_h")[0] == 0
    assert run(capsys, "no-go", "builtin:su2_linear_dilaton")[0] == 1


def test_critical(capsys):
    status, out, _ = run(
        capsys, "critical", "builtin:w3_nilmanifold", "--tau", "1 - e1234 - e1256 - e3456", "--gamma", "-e12 - e34 - e56"
    )
    assert status == 0 and "value lambda = 1" in out


def test_parallel_jobs_merge(capsys, tmp_path):
    out_file = tmp_path / "r.txt"
    args = ["cohomology", "builtin:torus6", "builtin:heisenberg_h", "-o", str(out_file)]
    assert main(args + ["--jobs", "2"]) == 0
    assert main(args) == 0
    text = out_file.read_text()
    first, second = text[: len(text) // 2], text[len(text) // 2 :]
    assert first == second
    assert first.index("cohomology heisenberg_h") < first.index("cohomology torus6")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["check-identities", "--n", "12"],
        ["check-identities", "--trials", "0"],
        ["cohomology", "missing.scn"],
        ["cohomology", "builtin:nope"],
        ["critical", "builtin:w3_nilmanifold", "--tau", "e9", "--gamma", "0"],
    ],
)
def test_usage_errors(capsys, argv):
    assert main(argv) == 2
    capsys.readouterr()


def test_malformed_scenario_file(capsys, tmp_path):
    bad = tmp_path / "bad.scn"
    bad.write_text("[algebra]\nsalamon = 0,0,0,12,13,45\n")
    status, _, err = run(capsys, "cohomology", str(bad))
    assert status == 2 and "Jacobi" in err
