"""Randomised identity suites, scenarios and the supersymmetry round-trip harness."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

from gmpy2 import mpq

from . import cliffordspin as cs
from . import liegeom as lg
from .cliffordspin import (
    CONVENTION,
    SpinModule,
    Spinor,
    a_form,
    bilinear_contractions,
    charge_conj,
    chiral_projection,
    clifford_act,
    fierz,
    fierz_trace,
    q,
    random_spinor,
    vector_act,
)
from .exteriorcore import (
    MetricData,
    MultiForm,
    all_masks,
    contract,
    format_form,
    g_tilde,
    hat,
    hat_sign,
    hodge_star,
    parse_form,
    popcount,
    tilde,
    wedge,
)
from .genalg import (
    B_CONVENTION,
    STRUCTURE_METRIC_SIGN,
    GenVector,
    SUmStructure,
    build_su_m,
    gen_act,
    hodge_dual_partner,
    inner,
    rr_space,
)
from .scalars import EXACT, FLOAT, Arith, GaussRat, RationalRandom, format_scalar

REPORT_VERSION = "ggtool-report/1"

# ---------------------------------------------------------------------------
# reports


@dataclass
class CheckResult:
    name: str
    passed: bool
    trials: int = 1
    residual: float = 0.0
    detail: str = ""

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        out = f"check {self.name} status={status} trials={self.trials} residual={self.residual:.3e}"
        if self.detail:
            out += f" detail={self.detail}"
        return out


@dataclass
class Report:
    suite: str
    seed: int | None = None
    conventions: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, residual: float = 0.0, detail: str = "", trials: int = 1) -> CheckResult:
        c = CheckResult(name, bool(passed), trials, float(residual), detail)
        self.checks.append(c)
        return c

    def get(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def render(self, header: bool = True) -> str:
        lines = [REPORT_VERSION] if header else []
        lines.append(f"suite: {self.suite}")
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        if self.conventions:
            lines.append("conventions: " + "; ".join(f"{k}={v}" for k, v in sorted(self.conventions.items())))
        for k, v in self.values.items():
            lines.append(f"value {k} = {v}")
        lines.extend(c.line() for c in self.checks)
        npass = sum(c.passed for c in self.checks)
        lines.append(f"summary: pass={npass} fail={len(self.checks) - npass}")
        return "\n".join(lines) + "\n"


def merge_reports(reports: Iterable[Report]) -> str:
    """Deterministic concatenation ordered by suite name, then seed."""
    rs = sorted(reports, key=lambda r: (r.suite, -1 if r.seed is None else r.seed))
    return REPORT_VERSION + "\n" + "".join(r.render(header=False) for r in rs)


def conventions(arith: Arith = EXACT, **extra) -> dict:
    out = {
        "gamma": CONVENTION,
        "charge-conjugation": "C conj, C.ph[0]=0",
        "B-action": B_CONVENTION,
        "arithmetic": arith.mode if arith.exact else f"float(tol={arith.tol:g})",
        "gravitino": "corrected",
        "structure-metric": f"G={'+' if STRUCTURE_METRIC_SIGN > 0 else '-'}J0J1",
    }
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# identity suite

# Flip each identity's right-hand side by registering "flip:<check name>";
# "hat-sign" swaps the sign-changing operator for (-1)^{p(p-1)/2};
# "flipped-signs" uses the opposite overall signs in the commutation, action and Dirac laws for the spinor/form dictionary.
MUTATIONS = ("hat-sign", "flipped-signs")

# Small nilpotent models per dimension used for the derivative identities.
SUITE_MODELS = {
    2: "0,0",
    3: "0,0,12",
    4: "0,0,0,12",
    5: "0,0,0,12,13",
    6: "0,0,0,0,13-24,14+23",
    7: "0,0,0,0,0,12,13",
    8: "0,0,0,0,0,0,12,34",
}


class _Ctx:
    def __init__(self, n: int, arith: Arith, mutations: set[str]):
        self.n = n
        self.arith = arith
        self.mod = SpinModule(n, arith)
        self.m = n // 2
        self.mut = mutations

    def sign(self, check: str) -> int:
        return -1 if f"flip:{check}" in self.mut else 1

    def hat(self, a: MultiForm) -> MultiForm:
        if "hat-sign" not in self.mut:
            return hat(a)
        return MultiForm(a.n, {k: v if hat_sign(popcount(k) - 1) > 0 else -v for k, v in a.c.items()})

    @property
    def flipped(self) -> bool:
        return "flipped-signs" in self.mut


def _rand_form(rng: RationalRandom, n: int, degree: int | None = None, density: float = 0.5) -> MultiForm:
    r = random.Random(rng.rng.random())
    c = {}
    for K in all_masks(n):
        if degree is not None and popcount(K) != degree:
            continue
        if r.random() < density:
            c[K] = rng.complex()
    return MultiForm(n, c)


def _rand_vec(rng: RationalRandom, n: int) -> list:
    return [rng.real() for _ in range(n)]


def _res_form(x: MultiForm, arith: Arith) -> tuple[bool, float]:
    return x.is_zero(arith), x.max_abs()


def _res_spinor(x: Spinor, arith: Arith) -> tuple[bool, float]:
    return x.is_zero(arith), x.max_abs()


def _res_scalar(x, arith: Arith) -> tuple[bool, float]:
    return arith.is_zero(x), abs(complex(x))


# each check returns (ok, residual) or None when not applicable


def _chk_clifford(c: _Ctx, rng):
    n = c.n
    v = GenVector.of(_rand_vec(rng, n), _rand_vec(rng, n))
    rho = _rand_form(rng, n)
    lhs = gen_act(v, gen_act(v, rho))
    return _res_form(lhs + rho * (inner(v, v) * c.sign("clifford-relation")), c.arith)


def _chk_a_square(c: _Ctx, rng):
    psi = random_spinor(c.mod, rng)
    return _res_spinor(charge_conj(charge_conj(psi)) - psi * (c.mod.m_hat * c.sign("charge-conjugation-square")), c.arith)


def _chk_a_equiv(c: _Ctx, rng):
    psi = random_spinor(c.mod, rng)
    X = _rand_vec(rng, c.n)
    s = (-1) ** (c.m + 1) * c.sign("charge-conjugation-equivariance")
    return _res_spinor(charge_conj(vector_act(X, psi)) - vector_act(X, charge_conj(psi)) * s, c.arith)


def _chk_bilinear(c: _Ctx, rng):
    p, f = random_spinor(c.mod, rng), random_spinor(c.mod, rng)
    X = _rand_vec(rng, c.n)
    s = c.sign("bilinear-form-symmetry")
    r1 = a_form(p, f) - a_form(f, p) * (c.mod.m_hat * s)
    r2 = a_form(vector_act(X, p), f) - a_form(p, vector_act(X, f)) * ((-1) ** c.m * s)
    ok1, x1 = _res_scalar(r1, c.arith)
    ok2, x2 = _res_scalar(r2, c.arith)
    return ok1 and ok2, max(x1, x2)


def _chk_q_adjoint(c: _Ctx, rng):
    p, f = random_spinor(c.mod, rng), random_spinor(c.mod, rng)
    a = MultiForm(c.n, {K: rng.real() for K in all_masks(c.n) if rng.rng.random() < 0.3})
    r = q(clifford_act(a, p), f) - q(p, clifford_act(c.hat(a) * c.sign("hermitian-adjoint"), f))
    return _res_scalar(r, c.arith)


def _chk_volume(c: _Ctx, rng):
    if c.n % 2:
        return None
    worst = 0.0
    ok = True
    vol = MultiForm(c.n, {(1 << c.n) - 1: c.arith.one})
    for sgn in (1, -1):
        psi = chiral_projection(random_spinor(c.mod, rng), sgn)
        lam = c.mod.chirality_eigenvalue(sgn) * c.sign("volume-action")
        o, x = _res_spinor(clifford_act(vol, psi) - psi * lam, c.arith)
        ok &= o
        worst = max(worst, x)
    return ok, worst


def _chk_star_hat(c: _Ctx, rng):
    n, m = c.n, c.m
    worst, ok = 0.0, True
    for p in range(n + 1):
        a = _rand_form(rng, n, p, 0.7)
        if n % 2 == 0:
            s = (-1) ** (m + p)
        else:
            s = (-1) ** (m + 1)
        s *= c.sign("star-hat")
        o, x = _res_form(hodge_star(None, c.hat(a)) - c.hat(hodge_star(None, a)) * s, c.arith)
        ok &= o
        worst = max(worst, x)
    return ok, worst


def _chk_star_wedge(c: _Ctx, rng):
    n = c.n
    a = _rand_form(rng, n)
    X = _rand_vec(rng, n)
    lhs = hodge_star(None, wedge(MultiForm.one_form(X), a))
    rhs = contract(X, hodge_star(None, tilde(a))) * c.sign("star-wedge")
    return _res_form(lhs - rhs, c.arith)


def _chk_d_hat(c: _Ctx, rng):
    model = lg.parse_model(SUITE_MODELS[c.n])
    a = _rand_form(rng, c.n)
    r = c.hat(model.d(a)) + model.d(c.hat(tilde(a))) * c.sign("d-hat")
    return _res_form(r, c.arith)


def _commut_signs(c: _Ctx) -> tuple[int, int]:
    if c.flipped:
        return (-1) ** (c.n * (c.n - 1) // 2), 1
    return (-1) ** (c.m + 1), -1


def _chk_commut_left(c: _Ctx, rng):
    p, f = random_spinor(c.mod, rng), random_spinor(c.mod, rng)
    X = _rand_vec(rng, c.n)
    F = fierz(p, f)
    s = _commut_signs(c)[0] * c.sign("commut-left")
    rhs = (wedge(MultiForm.one_form(X), F) - contract(X, F)) * s
    return _res_form(fierz(vector_act(X, p), f) - rhs, c.arith)


def _chk_commut_right(c: _Ctx, rng):
    p, f = random_spinor(c.mod, rng), random_spinor(c.mod, rng)
    Y = _rand_vec(rng, c.n)
    Ft = tilde(fierz(p, f))
    s = _commut_signs(c)[1] * c.sign("commut-right")
    rhs = (wedge(MultiForm.one_form(Y), Ft) + contract(Y, Ft)) * s
    return _res_form(fierz(p, vector_act(Y, f)) - rhs, c.arith)


def _chk_selfdual(c: _Ctx, rng):
    if c.n % 2:
        return None
    p, f = random_spinor(c.mod, rng), random_spinor(c.mod, rng)
    lam = c.mod.m_check * c.arith.ipow[c.m % 4] * c.sign("selfduality")
    worst, ok = 0.0, True
    for sgn in (1, -1):
        F = fierz(p, chiral_projection(f, sgn))
        o, x = _res_form(g_tilde(None, F) - F * (lam * sgn), c.arith)
        ok &= o
        worst = max(worst, x)
    return ok, worst


def _chk_faction(c: _Ctx, rng):
    if c.n % 2:
        return None
    p, f, xi = (random_spinor(c.mod, rng) for _ in range(3))
    lhs = clifford_act(c.hat(fierz(p, f)), xi) / c.mod.dim
    rhs = f * (q(charge_conj(p), xi) * c.sign("trace-action"))
    return _res_spinor(lhs - rhs, c.arith)


def _chk_hatbar(c: _Ctx, rng):
    if c.n % 2:
        return None
    p, f = random_spinor(c.mod, rng), random_spinor(c.mod, rng)
    tgt = fierz(p, f) if c.m % 2 else tilde(fierz(p, f))
    return _res_form(c.hat(fierz(f, p)) - tgt * (c.mod.m_hat * c.sign("hat-bar")), c.arith)


def _chk_contraction(which: int):
    name = ("contraction-first", "contraction-second")[which]

    def run(c: _Ctx, rng):
        if c.n % 2:
            return None
        p, f, xi = (random_spinor(c.mod, rng) for _ in range(3))
        if "hat-sign" in c.mut:
            d = c.mod.dim
            Axi = charge_conj(xi)
            got = (
                clifford_act(c.hat(fierz(p, f)), Axi) / d
                if which == 0
                else clifford_act(fierz(p, f) if c.m % 2 else tilde(fierz(p, f)), Axi) * c.mod.m_hat / d
            )
        else:
            got = bilinear_contractions(p, f, xi)[which]
        tgt = f * q(xi, p) if which == 0 else p * q(xi, f)
        return _res_spinor(got - tgt * c.sign(name), c.arith)

    return run


def _chk_action(which: int):
    name = ("action-wedge", "action-contract")[which]

    def run(c: _Ctx, rng):
        if c.n % 2:
            return None
        p, f = random_spinor(c.mod, rng), random_spinor(c.mod, rng)
        X = _rand_vec(rng, c.n)
        F = fierz(p, f)
        left = fierz(vector_act(X, p), f)
        right = tilde(fierz(p, vector_act(X, f)))
        sm = (-1) ** c.m
        if which == 0:
            lhs = wedge(MultiForm.one_form(X), F)
            rhs = (left * sm - right) / 2
        else:
            lhs = contract(X, F)
            rhs = (left * (-sm) - right) / 2
        overall = 1 if c.flipped else -1
        return _res_form(lhs - rhs * (overall * c.sign(name)), c.arith)

    return run


def _chk_diracvsd(c: _Ctx, rng):
    """Twisted Dirac operators against d and d* on the flat torus and a nilpotent model."""
    if c.n % 2:
        return None
    ok, worst = True, 0.0
    s1 = (-1) ** c.m if c.flipped else (-1) ** (c.m + 1)
    s2 = 1 if c.flipped else -1
    s = c.sign("dirac-vs-d")
    for text in (",".join(["0"] * c.n), SUITE_MODELS[c.n]):
        model = lg.parse_model(text)
        conn = lg.connection(model, MetricData.identity(c.n, c.arith), None, 0)
        p, f = random_spinor(c.mod, rng), random_spinor(c.mod, rng)
        F = fierz(p, f)
        dF = model.d(F)
        dsF = lg.codifferential(model, None, None, F)
        r1 = lg.twisted_dirac(conn, p, f) - (dsF + dF) * (s1 * s)
        r2 = lg.twisted_dirac_tilde(conn, p, f) - tilde(dsF - dF) * (s2 * s)
        for o, x in (_res_form(r1, c.arith), _res_form(r2, c.arith)):
            ok &= o
            worst = max(worst, x)
    return ok, worst


def _chk_fierz_oracle(c: _Ctx, rng):
    if c.n % 2:
        return None
    p, f = random_spinor(c.mod, rng), random_spinor(c.mod, rng)
    other = fierz_trace(p, f)
    if "hat-sign" in c.mut:
        other = hat(c.hat(other))
    return _res_form(fierz(p, f) - other * c.sign("fierz-trace-oracle"), c.arith)


IDENTITY_CHECKS: list[tuple[str, Callable]] = [
    ("clifford-relation", _chk_clifford),
    ("charge-conjugation-square", _chk_a_square),
    ("charge-conjugation-equivariance", _chk_a_equiv),
    ("bilinear-form-symmetry", _chk_bilinear),
    ("hermitian-adjoint", _chk_q_adjoint),
    ("volume-action", _chk_volume),
    ("star-hat", _chk_star_hat),
    ("star-wedge", _chk_star_wedge),
    ("d-hat", _chk_d_hat),
    ("commut-left", _chk_commut_left),
    ("commut-right", _chk_commut_right),
    ("selfduality", _chk_selfdual),
    ("trace-action", _chk_faction),
    ("hat-bar", _chk_hatbar),
    ("contraction-first", _chk_contraction(0)),
    ("contraction-second", _chk_contraction(1)),
    ("action-wedge", _chk_action(0)),
    ("action-contract", _chk_action(1)),
    ("dirac-vs-d", _chk_diracvsd),
    ("fierz-trace-oracle", _chk_fierz_oracle),
]

CHECK_NAMES = tuple(name for name, _ in IDENTITY_CHECKS)


def run_identity_suite(
    n: int,
    seed: int = 0,
    trials: int = 100,
    arith: Arith = EXACT,
    mutations: Iterable[str] = (),
    only: Sequence[str] | None = None,
) -> Report:
    """Every identity checked ``trials`` times on seeded random inputs."""
    if not 2 <= n <= 8:
        raise ValueError("identity suite supports 2 <= n <= 8")
    muts = set(mutations)
    unknown = {x for x in muts if x not in MUTATIONS and not (x.startswith("flip:") and x[5:] in CHECK_NAMES)}
    if unknown:
        raise ValueError(f"unknown mutations {sorted(unknown)}")
    ctx = _Ctx(n, arith, muts)
    rep = Report(f"identities n={n}", seed, conventions(arith, mutations=",".join(sorted(muts)) or "none"))
    for idx, (name, fn) in enumerate(IDENTITY_CHECKS):
        if only is not None and name not in only:
            continue
        rng = RationalRandom(seed * 1009 + idx, arith)
        ok, worst, ran = True, 0.0, 0
        for _ in range(trials):
            got = fn(ctx, rng)
            if got is None:
                break
            o, x = got
            ran += 1
            ok &= bool(o)
            worst = max(worst, x)
        if ran:
            rep.add(name, ok, worst, trials=ran)
    return rep


# ---------------------------------------------------------------------------
# scenarios

# Six-dimensional nilpotent Lie algebras in Salamon notation (32 entries that
# pass the Jacobi check; see scripts/find_witnesses.py).
NILPOTENT_6D = (
    "0,0,0,0,0,0",
    "0,0,0,0,0,12",
    "0,0,0,0,12,13",
    "0,0,0,0,13-24,14+23",
    "0,0,0,0,13+42,14+23",
    "0,0,0,0,12,34",
    "0,0,0,0,12,14+23",
    "0,0,0,0,12,14+25",
    "0,0,0,12,13,14",
    "0,0,0,12,13,23",
    "0,0,0,12,13,24",
    "0,0,0,12,13,14+23",
    "0,0,0,12,14,15",
    "0,0,0,12,14,15+23",
    "0,0,0,12,14,15+24",
    "0,0,0,12,14,15+23+24",
    "0,0,0,12,14,24",
    "0,0,0,12,14,13+42",
    "0,0,0,12,14-23,15+34",
    "0,0,0,12,13,14+35",
    "0,0,0,12,23,14+35",
    "0,0,0,12,23,14-35",
    "0,0,0,12,14,23+24",
    "0,0,12,13,14,15",
    "0,0,12,13,14,34+52",
    "0,0,12,13,14,23+15",
    "0,0,12,13,23,14",
    "0,0,12,13,23,14-25",
    "0,0,12,13,23,14+25",
    "0,0,12,13,14+23,24+15",
    "0,0,12,13,14+23,34+52",
    "0,0,0,0,0,12+34",
)


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    name: str
    model: lg.LieAlgebraModel
    g: MetricData
    B: MultiForm
    H: MultiForm
    alpha: MultiForm
    c_phi: object
    psiL: Spinor | None
    psiR: Spinor | None
    F0: MultiForm | None = None
    F1: MultiForm | None = None
    expect: tuple = ()
    notes: str = ""

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def arith(self) -> Arith:
        return self.g.arith

    @cached_property
    def structure(self) -> SUmStructure | None:
        if self.psiL is None or self.psiR is None:
            return None
        return build_su_m(self.g, self.B, self.alpha, self.c_phi, self.psiL, self.psiR)

    @cached_property
    def background(self) -> lg.Background | None:
        s = self.structure
        return None if s is None else lg.Background(self.model, s, self.H)

    def fluxes(self) -> tuple[MultiForm, MultiForm]:
        z = MultiForm.zero(self.n)
        return (self.F0 if self.F0 is not None else z, self.F1 if self.F1 is not None else z)

    def same_as(self, other: "Scenario") -> bool:
        def feq(a, b):
            if a is None or b is None:
                return a is None and b is None
            return (a - b).is_zero()

        def seq(a, b):
            if a is None or b is None:
                return a is None and b is None
            return a.v == b.v

        return (
            self.name == other.name
            and self.model == other.model
            and self.g.g == other.g.g
            and feq(self.B, other.B)
            and feq(self.H, other.H)
            and feq(self.alpha, other.alpha)
            and self.c_phi == other.c_phi
            and seq(self.psiL, other.psiL)
            and seq(self.psiR, other.psiR)
            and feq(self.F0, other.F0)
            and feq(self.F1, other.F1)
            and tuple(self.expect) == tuple(other.expect)
        )



_SECTION = re.compile(r"^\s*\[(\w+)\]\s*(.*)$")
_NUM = r"[+-]?\d+(?:/\d+)?(?:\.\d*)?(?:[eE][+-]?\d+)?"
_PAIR = re.compile(r"\(\s*(" + _NUM + r")\s*,\s*(" + _NUM + r")\s*\)")


def _num(tok: str):
    tok = tok.strip()
    if re.fullmatch(r"[+-]?\d+(?:/\d+)?", tok):
        return mpq(tok)
    return float(tok)


def _parse_matrix(text: str, n: int, arith: Arith) -> MetricData:
    t = text.strip()
    if t in ("identity", "id", "Id"):
        return MetricData.identity(n, arith)
    mt = re.fullmatch(r"diag\((.*)\)", t)
    if mt:
        vals = [_num(x) for x in mt.group(1).split(",")]
        if len(vals) != n:
            raise ScenarioError(f"diag needs {n} entries")
        rows = [[vals[i] if i == j else 0 for j in range(n)] for i in range(n)]
    else:
        rows = [[_num(x) for x in r.split(",")] for r in t.split(";")]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ScenarioError(f"metric must be {n}x{n}")
    exact = all(not isinstance(x, float) for r in rows for x in r)
    a = EXACT if exact and arith.exact else FLOAT
    rows = [[GaussRat(x) if a.exact else complex(x) for x in r] for r in rows]
    return MetricData.from_matrix(rows, a)


def _parse_spinor(text: str, mod: SpinModule, seed_rng: Callable | None = None) -> Spinor | None:
    t = text.strip()
    if t in ("none", ""):
        return None
    if t == "auto-pure":
        return mod.fock_vacuum()
    mt = re.fullmatch(r"random-pure:(\d+)", t)
    if mt:
        return cs.random_unit_pure(mod, RationalRandom(int(mt.group(1)), mod.arith))
    pairs = _PAIR.findall(t)
    if not t.startswith("[") or len(pairs) != mod.dim:
        raise ScenarioError(f"spinor must list {mod.dim} coefficients as (re,im) pairs")
    vals = []
    for re_, im_ in pairs:
        a, b = _num(re_), _num(im_)
        if mod.arith.exact:
            if isinstance(a, float) or isinstance(b, float):
                raise ScenarioError("float spinor coefficients in an exact scenario")
            vals.append(GaussRat(a, b))
        else:
            vals.append(complex(float(a), float(b)))
    return mod.spinor(vals)


def parse_scenario(text: str, name: str = "scenario", arith: Arith = EXACT) -> Scenario:
    data: dict[str, dict[str, str]] = {}
    sec = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mt = _SECTION.match(line)
        if mt:
            sec = mt.group(1).lower()
            data.setdefault(sec, {})
            line = mt.group(2).strip()
            if not line:
                continue
        if sec is None or "=" not in line:
            raise ScenarioError(f"cannot read line {raw!r}")
        k, v = line.split("=", 1)
        data[sec][k.strip().lower()] = v.strip()
    known = {"scenario", "algebra", "metric", "flux", "spinors", "rr"}
    if set(data) - known:
        raise ScenarioError(f"unknown sections {sorted(set(data) - known)}")
    if "algebra" not in data or "salamon" not in data["algebra"]:
        raise ScenarioError("missing [algebra] salamon = ...")
    try:
        model = lg.parse_model(data["algebra"]["salamon"])
    except lg.ModelError as exc:
        raise ScenarioError(str(exc)) from exc
    n = model.n
    meta = data.get("scenario", {})
    met = data.get("metric", {})
    g = _parse_matrix(met.get("g", "identity"), n, arith)
    a = g.arith

    def form(sec_: dict, key: str, default: str = "0") -> MultiForm:
        try:
            return parse_form(sec_.get(key, default), n, a)
        except ValueError as exc:
            raise ScenarioError(f"{key}: {exc}") from exc

    B = form(met, "b")
    flux = data.get("flux", {})
    H = form(flux, "h")
    alpha = form(flux, "alpha")
    if "c_phi" in flux:
        c_phi = _num(flux["c_phi"])
        c_phi = GaussRat(c_phi) if a.exact and not isinstance(c_phi, float) else c_phi
    else:
        phi0 = _num(flux.get("phi0", "0"))
        if phi0 == 0:
            c_phi = a.one
        else:
            import math

            if a.exact:
                raise ScenarioError("phi0 != 0 needs float arithmetic; use c_phi for exact scales")
            c_phi = math.exp(float(phi0))
    sp = data.get("spinors", {})
    mod = SpinModule(n, a)
    psiL = _parse_spinor(sp.get("psil", "none"), mod)
    psiR = _parse_spinor(sp.get("psir", "none"), mod)
    sc = Scenario(
        meta.get("name", name),
        model,
        g,
        B,
        H,
        alpha,
        c_phi,
        psiL,
        psiR,
        expect=tuple(x for x in re.split(r"[\s,]+", meta.get("expect", "")) if x),
        notes=meta.get("notes", ""),
    )
    rr = data.get("rr", {})
    for key in ("f0", "f1"):
        if key in rr:
            val = rr[key]
            if val == "auto":
                if sc.background is None:
                    raise ScenarioError("F = auto needs spinors")
                F = lg.rr_fields_of(sc.background)[0 if key == "f0" else 1]
            else:
                F = form(rr, key)
            setattr(sc, key.upper(), F)
    if sc.psiL is not None and sc.psiR is not None:
        try:
            sc.structure
        except ValueError as exc:
            raise ScenarioError(f"invalid structure: {exc}") from exc
    return sc


def load_scenario(path: str, arith: Arith = EXACT) -> Scenario:
    import os

    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_scenario(text, os.path.splitext(os.path.basename(path))[0], arith)


def _fmt_matrix(g: MetricData) -> str:
    if g.is_identity():
        return "identity"
    return "; ".join(", ".join(format_scalar(x) for x in r) for r in g.g)


def dump_scenario(sc: Scenario) -> str:
    def sp(p):
        return "none" if p is None else p.serialise()

    lines = [
        "[scenario]",
        f"name = {sc.name}",
    ]
    if sc.expect:
        lines.append("expect = " + ", ".join(sc.expect))
    if sc.notes:
        lines.append(f"notes = {sc.notes}")
    lines += [
        "",
        "[algebra]",
        f"salamon = {sc.model.salamon}",
        "",
        "[metric]",
        f"g = {_fmt_matrix(sc.g)}",
        f"B = {format_form(sc.B)}",
        "",
        "[flux]",
        f"H = {format_form(sc.H)}",
        f"alpha = {format_form(sc.alpha)}",
        f"c_phi = {format_scalar(sc.c_phi)}",
        "",
        "[spinors]",
        f"psiL = {sp(sc.psiL)}",
        f"psiR = {sp(sc.psiR)}",
    ]
    if sc.F0 is not None or sc.F1 is not None:
        lines += ["", "[rr]"]
        if sc.F0 is not None:
            lines.append(f"F0 = {format_form(sc.F0)}")
        if sc.F1 is not None:
            lines.append(f"F1 = {format_form(sc.F1)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# built-in catalog

W3_PERM = (0, 3, 1, 2, 4, 5)
W2P_PERM = (0, 3, 1, 4, 5, 2)
W2M_PERM = (0, 3, 1, 5, 2, 4)


def _auto(name, salamon, expect, H="0", alpha="0", spin="auto-pure", rr=True, g="identity", notes=""):
    text = (
        f"[scenario]\nname = {name}\nexpect = {expect}\n"
        + (f"notes = {notes}\n" if notes else "")
        + f"[algebra]\nsalamon = {salamon}\n[metric]\ng = {g}\n"
        f"[flux]\nH = {H}\nalpha = {alpha}\n[spinors]\npsiL = {spin}\npsiR = {spin}\n"
    )
    if rr and spin != "none":
        text += "[rr]\nF0 = auto\nF1 = auto\n"
    return text


def builtin_scenario_texts() -> dict[str, str]:
    base = lg.parse_model("0,0,0,0,12,13")
    w3 = base.relabel(W3_PERM).salamon
    w2p = base.relabel(W2P_PERM).salamon
    w2m = base.relabel(W2M_PERM).salamon
    return {
        "torus6": _auto("torus6", "0,0,0,0,0,0", "witness", spin="none"),
        "torus_cy": _auto("torus_cy", "0,0,0,0,0,0", "CalabiYau, IIA, IIB, witness"),
        "w3_nilmanifold": _auto("w3_nilmanifold", w3, "W3, IIB"),
        "w3_iwasawa": _auto("w3_iwasawa", "0,0,0,0,13-24,14+23", "W3, IIB"),
        "w2plus_nilmanifold": _auto("w2plus_nilmanifold", w2p, "W2+, IIA"),
        "w2minus_nilmanifold": _auto("w2minus_nilmanifold", w2m, "W2-, IIA"),
        "torus_h": _auto("torus_h", "0,0,0,0,0,0", "no-witness", H="e123", spin="none"),
        "heisenberg_h": _auto("heisenberg_h", "0,0,0,0,0,12", "no-witness", H="e345", spin="none"),
        "su2_linear_dilaton": _auto(
            "su2_linear_dilaton",
            "23,-13,12,0,0,0",
            "witness",
            H="e123",
            alpha="(1/2)*e4",
            spin="none",
            notes="flat nabla+ on su(2)+R^3 with a linear dilaton",
        ),
    }


def builtin_scenarios(arith: Arith = EXACT) -> dict[str, Scenario]:
    return {k: parse_scenario(v, k, arith) for k, v in builtin_scenario_texts().items()}


# ---------------------------------------------------------------------------
# supersymmetry round trip


def _spinor_side(bg: lg.Background, F0, F1) -> float:
    grav = lg.gravitino_residual(bg, F0, F1)
    dil = lg.modified_dilatino_residual(bg)
    return max(lg.spinor_max([x for p in grav for x in p]), lg.spinor_max(dil))


def _zero(x: float, arith: Arith) -> bool:
    return x == 0 if arith.exact else x <= arith.tol


def _perturbations(sc: Scenario, count: int, seed: int):
    """Unit bumps of H, alpha, F0, F1 in turn, on deterministic random blades."""
    r = random.Random(seed)
    n = sc.n
    F0, F1 = sc.fluxes()
    s = sc.structure
    p0 = 1  # rho0 is even, so F0 is odd
    p1 = (s.m + 1) % 2  # rho1 has parity (-1)^m, so F1 has the other one
    kinds = ["H", "alpha", "F0", "F1"]
    out = []
    for i in range(count):
        kind = kinds[i % 4]
        if kind == "H":
            pool = [K for K in all_masks(n) if popcount(K) == 3]
        elif kind == "alpha":
            pool = [1 << k for k in range(n)]
        elif kind == "F0":
            pool = [K for K in all_masks(n) if popcount(K) % 2 == p0]
        else:
            pool = [K for K in all_masks(n) if popcount(K) % 2 == p1]
        K = r.choice(pool)
        sgn = r.choice((1, -1))
        out.append((kind, K, sgn))
    return out


def _iib_iia(sc: Scenario, report: Report) -> set[str]:
    """Type IIB / IIA consistency of the flux pair via a real RR candidate F_b."""
    bg = sc.background
    s = sc.structure
    a = sc.arith
    D0, D1 = lg.rr_fields_of(bg)
    found = set()
    i_ = a.i

    def real(F):
        return F.imag_part().is_zero(a)

    def extconst(Fb):
        r1 = clifford_act(Fb, s.psiL, s.g)
        r2 = clifford_act(hat(Fb), s.psiR, s.g)
        return r1.is_zero(a) and r2.is_zero(a)

    # IIB: d rho1 = 0 and d rho0 in {-hat F_b, i hat F_b}
    if D1.is_zero(a):
        options = [("-hat", -hat(D0)), ("i*hat", hat(D0 * (-i_)))]
        chosen = next(((nm, F) for nm, F in options if real(F)), None)
        if chosen is not None:
            nm, Fb = chosen
            ok = extconst(Fb)
            report.add("IIB-constraint", ok, detail=f"option={nm} F_b={format_form(Fb) or '0'}")
            if ok:
                found.add("IIB")
                _partner(sc, Fb, report, "IIB")
    # IIA: d rho0 = 0 and d rho1 in {-F_b, i F_b}
    if D0.is_zero(a):
        options = [("-", -D1), ("i", D1 * (-i_))]
        chosen = next(((nm, F) for nm, F in options if real(F)), None)
        if chosen is not None:
            nm, Fb = chosen
            ok = extconst(Fb)
            report.add("IIA-constraint", ok, detail=f"option={nm} F_b={format_form(Fb) or '0'}")
            if ok:
                found.add("IIA")
                _partner(sc, Fb, report, "IIA")
    return found


def _partner(sc: Scenario, Fb: MultiForm, report: Report, tag: str):
    gm = sc.structure.gm
    Fa = hodge_dual_partner(Fb, gm)
    ok = True
    for p, Fp in Fb.graded().items():
        s = (-1) ** (sc.structure.m + p)
        lhs = hat(hodge_dual_partner(Fp, gm))
        rhs = -gm.g_tilde(hat(Fp)) * s
        ok &= (lhs - rhs).is_zero(sc.arith)
    inv = (hodge_dual_partner(Fa, gm) - Fb * (-1 if (sc.n * (sc.n + 1) // 2) % 2 else 1)).is_zero(sc.arith)
    report.add(f"{tag}-hodge-partner", ok and inv, detail=f"F_a={format_form(Fa) or '0'}")


def susy_roundtrip(sc: Scenario, probes: int = 40, seed: int = 0) -> Report:
    bg = sc.background
    rep = Report(f"susy {sc.name}", seed, conventions(sc.arith))
    if bg is None:
        rep.add("structure", False, detail="scenario has no spinors")
        return rep
    s = sc.structure
    a = sc.arith
    F0, F1 = sc.fluxes()
    # (a) Ramond-Ramond membership
    if s.m >= 3:
        for nm, F in (("F0", F0), ("F1", F1)):
            if F.is_zero(a):
                rep.add(f"rr-{nm}", True, detail="zero")
                continue
            par = F.parity
            try:
                sp = rr_space(s, par)
            except ValueError as exc:
                rep.add(f"rr-{nm}", False, detail=str(exc))
                continue
            bad = sp.offending_blocks(F)
            ok = not bad and sp.contains(F)
            rep.add(f"rr-{nm}", ok, detail=f"parity={par} dim={sp.dim}" + (f" offending={';'.join(bad)}" if bad else ""))
    # (b) equivalence of the form and spinor equations
    r0, r1 = lg.dh_residual(bg, F0, F1)
    form_res = max(r0.max_abs(), r1.max_abs())
    form_zero = r0.is_zero(a) and r1.is_zero(a)
    spin_res = _spinor_side(bg, F0, F1)
    spin_zero = _zero(spin_res, a)
    rep.values["dh-residual"] = f"{form_res:.3e}"
    rep.values["spinor-residual"] = f"{spin_res:.3e}"
    rep.values["dilaton"] = _dilaton_kind(sc)
    rep.add("equivalence", form_zero == spin_zero, max(form_res, spin_res), detail=f"forms={'0' if form_zero else 'nonzero'} spinors={'0' if spin_zero else 'nonzero'}")
    both = consistent = 0
    plist = _perturbations(sc, probes, seed)
    for kind, K, sgn in plist:
        bump = MultiForm(sc.n, {K: a.one * sgn})
        H, alpha, G0, G1 = sc.H, sc.alpha, F0, F1
        if kind == "H":
            H = H + bump
        elif kind == "alpha":
            alpha = alpha + bump
        elif kind == "F0":
            G0 = G0 + bump
        else:
            G1 = G1 + bump
        s2 = SUmStructure(s.gm, alpha, s.c_phi, s.psiL, s.psiR, s.rho0, s.rho1, s.flags)
        bg2 = lg.Background(sc.model, s2, H)
        q0, q1 = lg.dh_residual(bg2, G0, G1)
        fz = q0.is_zero(a) and q1.is_zero(a)
        sz = _zero(_spinor_side(bg2, G0, G1), a)
        consistent += fz == sz
        both += (not fz) and (not sz)
    if plist:
        rep.add("probe-equivalence", consistent == len(plist), detail=f"{consistent}/{len(plist)} consistent", trials=len(plist))
        rep.add("probe-both-break", both == len(plist), detail=f"{both}/{len(plist)} break both sides", trials=len(plist))
    # (c) type II consistency and (d) Hodge partner
    if s.m == 3 and form_zero:
        found = _iib_iia(sc, rep)
        for flag in ("IIA", "IIB"):
            if flag in sc.expect:
                rep.add(f"expect-{flag}", flag in found)
    return rep


# ---------------------------------------------------------------------------
# classification and the no-go probe


def classify_scenario(sc: Scenario) -> Report:
    rep = Report(f"classify {sc.name}", None, conventions(sc.arith))
    s = sc.structure
    if s is None:
        rep.add("structure", False, detail="scenario has no spinors")
        return rep
    cl = lg.classify_special_types(sc.model, s)
    rep.values["flags"] = ",".join(cl.flags)
    for flag in ("CalabiYau", "W3", "W2+", "W2-"):
        if flag in sc.expect:
            rep.add(f"expect-{flag}", flag in cl.flags)
    if not any(f in sc.expect for f in ("CalabiYau", "W3", "W2+", "W2-")):
        rep.add("classified", True, detail=",".join(cl.flags))
    return rep


def _dilaton_kind(sc: Scenario) -> str:
    # invariant functions are constant, so a nonzero closed alpha is only locally d(phi)
    return "constant" if sc.alpha.is_zero() else "local dilaton"


def no_go_probe(sc: Scenario, tol: float = 1e-10) -> Report:
    """Witness kernel of the gravitino/dilatino system without RR fields and the curvature identities."""
    rep = Report(f"no-go {sc.name}", None, conventions(sc.arith))
    mod = SpinModule(sc.n, sc.arith)
    H = sc.H
    alpha = sc.alpha
    ker = lg.gravdil_kernel(sc.model, sc.g, H, alpha, mod)
    if sc.psiL is not None:
        ker_psi = [sc.psiL] if _in_span(sc.psiL, ker, sc.arith) else []
        witness = ker_psi or ker
    else:
        witness = ker
    cr = lg.curvature_report(sc.model, sc.g, H, alpha, witness, tol)
    rep.values["witness-dim"] = str(len(ker))
    rep.values["S+"] = format_scalar(cr.scalar_plus)
    rep.values["laplacian-proxy"] = format_scalar(cr.laplacian_proxy)
    rep.values["|H|^2"] = format_scalar(cr.h_norm2)
    rep.values["dilaton"] = _dilaton_kind(sc)
    if "witness" in sc.expect:
        rep.add("witness-exists", bool(ker), detail=f"dim={len(ker)}")
    if "no-witness" in sc.expect or (not H.is_zero() and alpha.is_zero()):
        rep.add("kernel-empty", not ker, detail=f"dim={len(ker)}")
    if ker:
        d1 = complex(cr.scalar_plus - 2 * cr.laplacian_proxy)
        d2 = complex(cr.scalar_plus + 3 * cr.h_norm2)
        rep.add("S+ = 2 laplacian", abs(d1) <= tol, abs(d1))
        rep.add("S+ = -3|H|^2", abs(d2) <= tol, abs(d2))
    return rep


def _in_span(psi: Spinor, basis: list[Spinor], a: Arith) -> bool:
    from . import linalg

    if not basis:
        return False
    return linalg.span_contains([b.v for b in basis], [psi.v], a)


def critical_check(sc: Scenario, tau: MultiForm, gamma: MultiForm) -> Report:
    rep = Report(f"critical {sc.name}", None, conventions(sc.arith))
    try:
        res = lg.constrained_critical_check(sc.model, sc.H, sc.g, tau, gamma, sc.arith.tol)
    except ValueError as exc:
        rep.add("tau-closed", False, detail=str(exc))
        return rep
    rep.values["lambda"] = "undetermined" if res.lam is None else format_scalar(res.lam)
    rep.values["status"] = res.status
    rep.add("critical", res.critical, res.residual, detail=res.status)
    return rep


def cohomology_report(sc: Scenario) -> tuple[Report, lg.CohomologyResult]:
    rep = Report(f"cohomology {sc.name}", None, conventions(sc.arith))
    res = lg.twisted_cohomology(sc.model, sc.H, sc.g)
    rep.values["dims"] = res.summary()
    ok = True
    worst = 0.0
    for tau in res.harmonic_ev + res.harmonic_od:
        r1 = lg.d_H(sc.model, sc.H, tau)
        r2 = lg.d_H(sc.model, sc.H, g_tilde(sc.g, tau))
        ok &= r1.is_zero(sc.arith) and r2.is_zero(sc.arith)
        worst = max(worst, r1.max_abs(), r2.max_abs())
    rep.add("harmonic-representatives", ok, worst, detail=f"{len(res.harmonic_ev) + len(res.harmonic_od)} forms")
    return rep, res


# ---------------------------------------------------------------------------
# searches


def straight_vacuum(model: lg.LieAlgebraModel) -> SUmStructure:
    mod = SpinModule(model.n)
    psi = mod.fock_vacuum()
    return build_su_m(MetricData.identity(model.n), None, None, 1, psi, psi)


def find_special_witnesses(catalog: Sequence[str] = NILPOTENT_6D, limit: int | None = None):
    """Scan relabelled catalog algebras for W3 / W2+ / W2- witnesses of the standard structure."""
    from itertools import permutations

    s = None
    found: dict[str, list] = {}
    for text in catalog:
        base = lg.parse_model(text)
        if s is None:
            s = straight_vacuum(base)
        kappa = lg.omega_phase(s.module)
        for perm in permutations(range(base.n)):
            M = base.relabel(perm)
            d0 = M.d(s.rho0)
            d1 = M.d(s.rho1) / kappa
            dw, dp, dm = d0.is_zero(), d1.real_part().is_zero(), d1.imag_part().is_zero()
            kind = None
            if dp and dm and not dw and _rr_quick(s, d0):
                kind = "W3"
            elif dw and dm and not dp and _rr_quick(s, d1):
                kind = "W2+"
            elif dw and dp and not dm and _rr_quick(s, d1):
                kind = "W2-"
            if kind:
                found.setdefault(kind, []).append((text, perm, M.salamon))
        if limit and all(len(found.get(k, [])) >= limit for k in ("W3", "W2+", "W2-")):
            break
    return found


def _rr_quick(s: SUmStructure, F: MultiForm) -> bool:
    return all(x.is_zero() for x in rr_conditions_frame(s, F))


def rr_conditions_frame(s: SUmStructure, F: MultiForm):
    from .genalg import rr_conditions

    return rr_conditions(s, F)


def gravdil_flux_solutions(model: lg.LieAlgebraModel, psi: Spinor, arith: Arith = EXACT):
    """Affine space of real closed (H, alpha) with nabla^+ psi = 0 and (alpha + H/2) psi = 0.

    Returns (particular, kernel) as lists of (H, alpha) pairs, or None when
    the inhomogeneous system is inconsistent.
    """
    from . import linalg

    n = model.n
    B3 = [K for K in all_masks(n) if popcount(K) == 3]
    B1 = [1 << k for k in range(n)]
    lc = lg.connection(model, None, None, 0)
    unknowns = [("H", K) for K in B3] + [("a", K) for K in B1]

    def eqs(H: MultiForm, al: MultiForm, homog: bool) -> list:
        out = []
        for k in range(n):
            e = [0] * n
            e[k] = 1
            v = clifford_act(contract(e, H), psi) / 4
            if not homog:
                v = v + lg.nabla_spinor_frame(lc, k, psi)
            out.extend(v.v)
        out.extend(clifford_act(al + H / 2, psi).v)
        out.extend(model.d(H).dense(arith))
        out.extend(model.d(al).dense(arith))
        return out

    z = MultiForm.zero(n)
    b = eqs(z, z, False)
    cols = []
    for kind, K in unknowns:
        e = MultiForm(n, {K: arith.one})
        cols.append(eqs(e, z, True) if kind == "H" else eqs(z, e, True))
    # unknowns are real, so split every complex equation into two real ones
    def split(row):
        return [arith.coerce(x.real) for x in row] + [arith.coerce(x.imag) for x in row]

    A = [list(r) for r in zip(*(split(c) for c in cols))]
    b = split([arith.coerce(x) for x in b])
    sol = linalg.solve(A, [-x for x in b], arith)
    if sol is None:
        return None
    ker = linalg.nullspace(A, len(unknowns), arith)

    def unpack(v):
        H = MultiForm(n, {K: x for (kind, K), x in zip(unknowns, v) if kind == "H"})
        al = MultiForm(n, {K: x for (kind, K), x in zip(unknowns, v) if kind == "a"})
        return H, al

    return unpack(sol), [unpack(v) for v in ker]


__all__ = [
    "CHECK_NAMES",
    "CheckResult",
    "MUTATIONS",
    "NILPOTENT_6D",
    "REPORT_VERSION",
    "Report",
    "Scenario",
    "ScenarioError",
    "builtin_scenario_texts",
    "builtin_scenarios",
    "classify_scenario",
    "cohomology_report",
    "critical_check",
    "dump_scenario",
    "find_special_witnesses",
    "gravdil_flux_solutions",
    "load_scenario",
    "merge_reports",
    "no_go_probe",
    "parse_scenario",
    "run_identity_suite",
    "straight_vacuum",
    "susy_roundtrip",
]
