"""Command-line entry point: ``ggtool <subcommand> ...``.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import liegeom as lg
from . import verify as vf
from .exteriorcore import parse_form
from .scalars import EXACT, Arith

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    subcommand: str
    inputs: tuple = ()
    n: int = 6
    seed: int = 0
    trials: int = 100
    arithmetic: str = "exact"
    tol: float = 1e-10
    output: str | None = None
    jobs: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def arith(self) -> Arith:
        return EXACT if self.arithmetic == "exact" else Arith("float", self.tol)

    def tags(self) -> dict:
        return {"seed": self.seed, "arithmetic": self.arithmetic, "tol": f"{self.tol:g}"}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ggtool", description="Generalised geometry checks on Lie-algebra models.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--arith", choices=("exact", "float"), default=None, help="arithmetic mode (default exact for n <= 6)")
    common.add_argument("--tol", type=float, default=1e-10, help="float-mode tolerance")
    common.add_argument("-o", "--output", help="append the report to this file instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent evaluations")
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("check-identities", parents=[common], help="randomised identity suite")
    s.add_argument("--n", type=int, default=6)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--mutation", action="append", default=[], help="sign mutation (repeatable)")

    for name, hlp in (
        ("cohomology", "twisted cohomology and harmonic representatives"),
        ("susy-check", "form/spinor equation round trip"),
        ("classify", "special torsion type of a straight structure"),
        ("no-go", "witness kernel and curvature identities"),
    ):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("scenario", nargs="+", help="scenario file or builtin:<name>")
        if name == "susy-check":
            s.add_argument("--probes", type=int, default=40)
        if name == "classify":
            s.add_argument("--emit", help="write the scenario with its computed flags to this path")

    s = sub.add_parser("critical", parents=[common], help="constrained critical point test")
    s.add_argument("scenario", nargs="+")
    s.add_argument("--tau", required=True, help="closed form literal")
    s.add_argument("--gamma", required=True, help="form literal")
    return p


def config_from_args(ns: argparse.Namespace) -> CliConfig:
    n = getattr(ns, "n", 6)
    if ns.subcommand == "check-identities" and not 2 <= n <= 8:
        raise UsageError("--n must lie in 2..8")
    if getattr(ns, "trials", 1) < 1:
        raise UsageError("--trials must be positive")
    if ns.jobs < 1:
        raise UsageError("--jobs must be positive")
    if ns.tol <= 0:
        raise UsageError("--tol must be positive")
    arith = ns.arith or ("exact" if n <= 6 else "float")
    extra = {k: getattr(ns, k) for k in ("probes", "emit", "tau", "gamma", "mutation") if hasattr(ns, k)}
    return CliConfig(
        ns.subcommand,
        tuple(getattr(ns, "scenario", ())),
        n,
        ns.seed,
        getattr(ns, "trials", 1),
        arith,
        ns.tol,
        ns.output,
        ns.jobs,
        extra,
    )


def resolve_scenario(ref: str, arith: Arith) -> vf.Scenario:
    if ref.startswith("builtin:"):
        texts = vf.builtin_scenario_texts()
        key = ref.split(":", 1)[1]
        if key not in texts:
            raise UsageError(f"unknown builtin scenario {key!r}; known: {', '.join(sorted(texts))}")
        return vf.parse_scenario(texts[key], key, arith)
    if not os.path.exists(ref):
        raise UsageError(f"no such scenario file: {ref}")
    return vf.load_scenario(ref, arith)


def _run_one(cfg: CliConfig, ref: str) -> vf.Report:
    sc = resolve_scenario(ref, cfg.arith)
    cmd = cfg.subcommand
    if cmd == "cohomology":
        rep, _ = vf.cohomology_report(sc)
    elif cmd == "susy-check":
        rep = vf.susy_roundtrip(sc, cfg.extra.get("probes", 40), cfg.seed)
    elif cmd == "classify":
        rep = vf.classify_scenario(sc)
        if cfg.extra.get("emit") and "flags" in rep.values:
            flags = tuple(f for f in rep.values["flags"].split(",") if f)
            keep = tuple(f for f in sc.expect if f not in ("CalabiYau", "W3", "W2+", "W2-", "other"))
            sc.expect = flags + keep
            with open(cfg.extra["emit"], "w", encoding="utf-8") as fh:
                fh.write(vf.dump_scenario(sc))
    elif cmd == "no-go":
        rep = vf.no_go_probe(sc, cfg.tol)
    elif cmd == "critical":
        try:
            tau = parse_form(cfg.extra["tau"], sc.n, sc.arith)
            gamma = parse_form(cfg.extra["gamma"], sc.n, sc.arith)
        except ValueError as exc:
            raise UsageError(f"bad form literal: {exc}") from exc
        rep = vf.critical_check(sc, tau, gamma)
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(cmd)
    rep.conventions.update(cfg.tags())
    return rep


def _guarded(args):
    cfg, ref = args
    try:
        return _run_one(cfg, ref), None
    except (UsageError, vf.ScenarioError, lg.ModelError) as exc:
        return None, f"{ref}: {exc}"


def run(cfg: CliConfig) -> tuple[str, int]:
    if cfg.subcommand == "check-identities":
        muts = cfg.extra.get("mutation") or []
        try:
            rep = vf.run_identity_suite(cfg.n, cfg.seed, cfg.trials, cfg.arith, muts)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        rep.conventions.update(cfg.tags())
        rep.values["trials"] = str(cfg.trials)
        return rep.render(), EXIT_OK if rep.ok else EXIT_FAIL
    jobs = [(cfg, ref) for ref in cfg.inputs]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_guarded, jobs))
    else:
        results = [_guarded(j) for j in jobs]
    errors = [e for _, e in results if e]
    if errors:
        raise UsageError("; ".join(errors))
    reports = [r for r, _ in results]
    text = vf.merge_reports(reports) if len(reports) > 1 else reports[0].render()
    return text, EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        text, status = run(cfg)
    except UsageError as exc:
        print(f"ggtool: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.output:
        with open(cfg.output, "a", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
