"""Generalised geometry on W + W*: Clifford action on forms, B-fields,
generalised metrics, generalised complex structures, SU(m)xSU(m) structures
and Ramond-Ramond field spaces.

Vectors of W + W* are stored as pairs (X, xi) of coordinate lists in the
standard frame.  Endomorphisms of W + W* are 2n x 2n matrices acting on the
column (X, xi).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import factorial
from typing import Sequence

import numpy as np

from . import linalg
from .cliffordspin import (
    SpinModule,
    Spinor,
    SUBasis,
    charge_conj,
    clifford_act,
    fierz,
    fierz_inverse,
    purity_test,
    q,
    su_basis,
)
from .exteriorcore import (
    MetricData,
    MultiForm,
    contract,
    exp_wedge,
    g_tilde,
    hat,
    indices_of,
    mukai_pair,
    popcount,
    wedge,
)
from .scalars import EXACT, Arith, GaussRat, conj

B_CONVENTION = "spinor e^B ^ , vector X + (xi + X _| B)"


# ---------------------------------------------------------------------------
# generalised vectors


@dataclass(frozen=True)
class GenVector:
    X: tuple
    xi: tuple

    def __post_init__(self):
        if len(self.X) != len(self.xi):
            raise ValueError("vector and covector parts differ in dimension")

    @property
    def n(self) -> int:
        return len(self.X)

    @classmethod
    def of(cls, X: Sequence, xi: Sequence) -> "GenVector":
        return cls(tuple(X), tuple(xi))

    def __add__(self, o: "GenVector") -> "GenVector":
        return GenVector(tuple(a + b for a, b in zip(self.X, o.X)), tuple(a + b for a, b in zip(self.xi, o.xi)))

    def __mul__(self, s) -> "GenVector":
        return GenVector(tuple(a * s for a in self.X), tuple(a * s for a in self.xi))

    __rmul__ = __mul__

    def column(self) -> list:
        return list(self.X) + list(self.xi)


def inner(v: GenVector, w: GenVector):
    """(X + xi, Y + eta) = (xi(Y) + eta(X)) / 2, so (v, v) = xi(X)."""
    s = 0
    for a, b in zip(v.xi, w.X):
        s = s + a * b
    for a, b in zip(w.xi, v.X):
        s = s + a * b
    return s / 2


def gen_act(v: GenVector, rho: MultiForm) -> MultiForm:
    """(X + xi) . rho = -X _| rho + xi ^ rho."""
    if v.n != rho.n:
        raise ValueError(f"dimension mismatch {v.n} vs {rho.n}")
    return wedge(MultiForm.one_form(v.xi), rho) - contract(v.X, rho)


def two_form_matrix(B: MultiForm) -> list[list]:
    """Antisymmetric matrix Bm with B = sum_{i<j} Bm[i][j] e^{ij}."""
    n = B.n
    a = B.arith
    Bm = [[a.zero] * n for _ in range(n)]
    for k, v in B.c.items():
        if popcount(k) != 2:
            raise ValueError("B must be a 2-form")
        i, j = indices_of(k)
        Bm[i][j] = v
        Bm[j][i] = -v
    return Bm


def b_transform(B: MultiForm, target):
    """e^B acting on a form (exp-wedge) or on a generalised vector (shear)."""
    if any(popcount(k) != 2 for k in B.c):
        raise ValueError("B must be a 2-form")
    if isinstance(target, MultiForm):
        return wedge(exp_wedge(B), target)
    if isinstance(target, GenVector):
        s = contract(target.X, B)
        return GenVector(target.X, tuple(x + s[1 << j] for j, x in enumerate(target.xi)))
    raise TypeError("b_transform acts on MultiForm or GenVector")


def b_matrix(B: MultiForm) -> list[list]:
    """2n x 2n matrix of the vector B-transform."""
    n = B.n
    a = B.arith
    Bm = two_form_matrix(B)
    M = linalg.identity(2 * n, a)
    for j in range(n):
        for i in range(n):
            # xi_j += (X _| B)_j = sum_i X^i Bm[i][j]
            M[n + j][i] = Bm[i][j]
    return M


def gl_act(A: Sequence[Sequence], rho: MultiForm, arith: Arith | None = None) -> MultiForm:
    """A . rho = sqrt(det A) (A^{-1})^* rho, a left action of GL(n)_+."""
    arith = arith or rho.arith
    detA = linalg.det(A, arith)
    if complex(detA).real <= 0 or complex(detA).imag:
        raise ValueError("A must have positive determinant")
    root = arith.sqrt(detA.re if arith.exact else complex(detA).real)
    Ainv = linalg.inverse(A, arith)
    return pullback(Ainv, rho) * root


def pullback(M: Sequence[Sequence], rho: MultiForm) -> MultiForm:
    """M^* rho for a linear map M, e^j -> sum_i M[j][i] e^i."""
    n = rho.n
    images = [MultiForm(n, {1 << i: M[j][i] for i in range(n)}) for j in range(n)]
    out = MultiForm.zero(n)
    for k, v in rho.c.items():
        t = MultiForm.scalar(n, 1)
        for j in indices_of(k):
            t = wedge(t, images[j])
        out = out + t * v
    return out


# ---------------------------------------------------------------------------
# generalised metrics


@dataclass(frozen=True)
class GenMetric:
    """Generalised metric given by (g, B); lifts X^{+-} = X + (X _| B +- g(X))."""

    g: MetricData
    B: MultiForm

    @property
    def n(self) -> int:
        return self.g.n

    def lift(self, X: Sequence, sign: int) -> GenVector:
        bx = contract(X, self.B)
        gx = self.g.flat(X)
        return GenVector(tuple(X), tuple(bx[1 << j] + (gx[j] if sign > 0 else -gx[j]) for j in range(self.n)))

    def frame_lift(self, a: int, sign: int) -> GenVector:
        """Lift of the a-th orthonormal frame vector."""
        e = [self.g.arith.zero] * self.n
        e[a] = self.g.arith.one
        return self.lift(self.g.vector_from_frame(e), sign)

    def P_matrix(self, sign: int) -> list[list]:
        """Matrix of X -> xi-part of X^{+-}; symmetric part +-g, skew part from B."""
        n = self.n
        cols = []
        for i in range(n):
            e = [self.g.arith.zero] * n
            e[i] = self.g.arith.one
            cols.append(list(self.lift(e, sign).xi))
        return linalg.transpose(cols)

    def g_tilde(self, rho: MultiForm) -> MultiForm:
        if not self.B.c:
            return g_tilde(self.g, rho)
        return b_transform(self.B, g_tilde(self.g, b_transform(-self.B, rho)))

    def matrix(self) -> list[list]:
        """Involution G of W + W* with +1 eigenspace V^+."""
        n = self.n
        a = self.g.arith
        # basis of V+ and V- as columns, then G = S diag(1,-1) S^{-1}
        cols = [self.lift(self._e(i), 1).column() for i in range(n)] + [
            self.lift(self._e(i), -1).column() for i in range(n)
        ]
        S = linalg.transpose(cols)
        D = [[(a.one if i < n else -a.one) if i == j else a.zero for j in range(2 * n)] for i in range(2 * n)]
        return linalg.matmul(linalg.matmul(S, D), linalg.inverse(S, a))

    def _e(self, i):
        e = [self.g.arith.zero] * self.n
        e[i] = self.g.arith.one
        return e


def gen_metric_from(g, B: MultiForm | None = None) -> GenMetric:
    if not isinstance(g, MetricData):
        g = MetricData.from_matrix(g)
    B = B if B is not None else MultiForm.zero(g.n)
    if any(popcount(k) != 2 for k in B.c):
        raise ValueError("B must be a 2-form")
    return GenMetric(g, B)


def act_pm(F: MultiForm, rho: MultiForm, side: int, gm: GenMetric) -> MultiForm:
    """F^{+-} . rho: blade theta^{k1..kr} acts as f_{k1}^{+-} . ... . f_{kr}^{+-} .

    The form is expanded in the orthonormal coframe of g so that blades map
    to Clifford products of orthonormal lifts.
    """
    if F.n != rho.n:
        raise ValueError("dimension mismatch")
    Ff = gm.g.to_frame(F)
    lifts = [gm.frame_lift(a, side) for a in range(gm.n)]
    out = MultiForm.zero(rho.n)
    for K, c in Ff.c.items():
        t = rho
        for k in reversed(indices_of(K)):
            t = gen_act(lifts[k], t)
        out = out + t * c
    return out


# ---------------------------------------------------------------------------
# generalised complex structures


@dataclass(frozen=True)
class GenComplexStructure:
    """Real 2n x 2n matrix J on W + W* (column convention (X, xi))."""

    J: tuple
    arith: Arith = field(default=EXACT, compare=False)

    @property
    def n(self) -> int:
        return len(self.J) // 2

    def matrix(self) -> list[list]:
        return [list(r) for r in self.J]

    def blocks(self):
        n = self.n
        M = self.matrix()
        return (
            [r[:n] for r in M[:n]],
            [r[n:] for r in M[:n]],
            [r[:n] for r in M[n:]],
            [r[n:] for r in M[n:]],
        )

    def squares_to_minus_one(self) -> bool:
        M = self.matrix()
        sq = linalg.matmul(M, M)
        return all(
            self.arith.is_zero(sq[i][j] + (1 if i == j else 0)) for i in range(2 * self.n) for j in range(2 * self.n)
        )

    def is_isometry(self) -> bool:
        return _preserves_pairing(self.matrix(), self.arith)


def _pairing_matrix(n: int, arith: Arith):
    h = arith.one / 2
    return [[h if (i < n) != (j < n) and abs(i - j) == n else arith.zero for j in range(2 * n)] for i in range(2 * n)]


def _preserves_pairing(M, arith: Arith) -> bool:
    n = len(M) // 2
    eta = _pairing_matrix(n, arith)
    lhs = linalg.matmul(linalg.matmul(linalg.transpose(M), eta), M)
    return all(arith.is_zero(lhs[i][j] - eta[i][j]) for i in range(2 * n) for j in range(2 * n))


def spin_annihilator(rho: MultiForm, arith: Arith | None = None) -> list[list]:
    """Basis of {v in (W + W*) (x) C : v . rho = 0} as 2n-columns."""
    arith = arith or rho.arith
    n = rho.n
    cols = []
    for j in range(2 * n):
        e = [arith.zero] * (2 * n)
        e[j] = arith.one
        v = GenVector(tuple(e[:n]), tuple(e[n:]))
        cols.append(gen_act(v, rho).dense(arith))
    rows = [list(r) for r in zip(*cols)]
    return linalg.nullspace(rows, 2 * n, arith)


def is_spin_pure(rho: MultiForm, arith: Arith | None = None) -> bool:
    return len(spin_annihilator(rho, arith)) == rho.n


def gcs_from_pure(rho: MultiForm, arith: Arith | None = None) -> GenComplexStructure:
    """J with +i eigenspace the annihilator of rho."""
    arith = arith or rho.arith
    n = rho.n
    L = spin_annihilator(rho, arith)
    if len(L) != n:
        raise ValueError(f"form is not pure (annihilator dimension {len(L)} != {n})")
    pair = mukai_pair(rho, rho.conjugate())
    if arith.is_zero(pair):
        raise ValueError("<rho, conj rho> = 0: no generalised complex structure")
    Lbar = [[conj(x) for x in v] for v in L]
    S = linalg.transpose(L + Lbar)
    D = [[arith.zero] * (2 * n) for _ in range(2 * n)]
    for i in range(2 * n):
        D[i][i] = arith.i if i < n else -arith.i
    J = linalg.matmul(linalg.matmul(S, D), linalg.inverse(S, arith))
    real = []
    for r in J:
        row = []
        for x in r:
            x = arith.coerce(x)
            if not arith.is_zero(x.im if arith.exact else complex(x).imag):
                raise ValueError("induced structure is not real")
            row.append(GaussRat(x.re) if arith.exact else complex(complex(x).real))
        real.append(tuple(row))
    return GenComplexStructure(tuple(real), arith)


def j_omega(omega: MultiForm) -> GenComplexStructure:
    """((0, -w^{-1}), (w, 0)) with w X = X _| omega, the structure of exp(-i omega)."""
    n = omega.n
    a = omega.arith
    W = linalg.transpose(two_form_matrix(omega))  # W[j][i] = omega_{ij}: (X _| omega)_j
    Winv = linalg.inverse(W, a)
    M = [[a.zero] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            M[i][n + j] = -Winv[i][j]
            M[n + i][j] = W[i][j]
    return GenComplexStructure(tuple(tuple(r) for r in M), a)


def j_complex(J: Sequence[Sequence], arith: Arith = EXACT) -> GenComplexStructure:
    """((-J, 0), (0, J^*)) for a complex structure J on W."""
    n = len(J)
    M = [[arith.zero] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            M[i][j] = -J[i][j]
            M[n + i][n + j] = J[j][i]
    return GenComplexStructure(tuple(tuple(r) for r in M), arith)


def conjugate_by_b(Jc: GenComplexStructure, B: MultiForm) -> GenComplexStructure:
    """e^B J e^{-B} on W + W*."""
    a = Jc.arith
    Mb = b_matrix(B)
    Mbi = b_matrix(-B)
    M = linalg.matmul(linalg.matmul(Mb, Jc.matrix()), Mbi)
    return GenComplexStructure(tuple(tuple(r) for r in M), a)


@dataclass(frozen=True)
class KahlerCheck:
    commute: bool
    metric: GenMetric | None
    reason: str = ""


def check_gen_kahler(J0: GenComplexStructure, J1: GenComplexStructure, sign: int = -1) -> KahlerCheck:
    """Commuting pair with G = sign * J0 J1 a generalised metric; extract (g, B).

    The textbook choice is sign = -1.  Pairs induced by fierzed spinors carry
    the opposite relative orientation and need sign = +1 (see
    ``STRUCTURE_METRIC_SIGN``).
    """
    a = J0.arith
    n = J0.n
    A, B_ = J0.matrix(), J1.matrix()
    AB = linalg.matmul(A, B_)
    BA = linalg.matmul(B_, A)
    N = 2 * n
    comm = all(a.is_zero(AB[i][j] - BA[i][j]) for i in range(N) for j in range(N))
    if not comm:
        return KahlerCheck(False, None, "structures do not commute")
    G = [[-x for x in r] for r in AB] if sign < 0 else AB
    G2 = linalg.matmul(G, G)
    if not all(a.is_zero(G2[i][j] - (1 if i == j else 0)) for i in range(N) for j in range(N)):
        return KahlerCheck(True, None, "G is not an involution")
    if not _preserves_pairing(G, a):
        return KahlerCheck(True, None, "G is not an isometry")
    plus = linalg.nullspace([[G[i][j] - (1 if i == j else 0) for j in range(N)] for i in range(N)], N, a)
    if len(plus) != n:
        return KahlerCheck(True, None, f"+1 eigenspace has dimension {len(plus)}")
    U = [[v[i] for v in plus] for i in range(n)]
    V = [[v[n + i] for v in plus] for i in range(n)]
    try:
        P = linalg.matmul(V, linalg.inverse(U, a))
    except (ZeroDivisionError, np.linalg.LinAlgError):
        return KahlerCheck(True, None, "+1 eigenspace is not a graph over W")
    gmat = [[(P[i][j] + P[j][i]) / 2 for j in range(n)] for i in range(n)]
    skew = [[(P[i][j] - P[j][i]) / 2 for j in range(n)] for i in range(n)]
    try:
        g = MetricData.from_matrix(gmat, a)
    except ValueError as exc:
        return KahlerCheck(True, None, f"+1 eigenspace not positive definite ({exc})")
    # P[j][i] = (X _| B)_j coefficient = Bm[i][j]
    B = MultiForm(n, {(1 << i) | (1 << j): skew[j][i] for i in range(n) for j in range(i + 1, n)})
    return KahlerCheck(True, GenMetric(g, B))


# ---------------------------------------------------------------------------
# generalised SU(m)-structures


@dataclass(frozen=True)
class SUmStructure:
    """Generalised SU(m)-structure (g, B, alpha, c_phi, psiL, psiR) with its spinor pair."""

    gm: GenMetric
    alpha: MultiForm
    c_phi: object
    psiL: Spinor
    psiR: Spinor
    rho0: MultiForm
    rho1: MultiForm
    flags: tuple = ()

    @property
    def n(self) -> int:
        return self.gm.n

    @property
    def m(self) -> int:
        return self.gm.n // 2

    @property
    def module(self) -> SpinModule:
        return self.psiL.module

    @property
    def g(self) -> MetricData:
        return self.gm.g

    @property
    def arith(self) -> Arith:
        return self.module.arith

    def length_ratio(self):
        """<rho1, conj rho1> / <rho0, conj rho0> against the metric volume."""
        nu = self.g.volume_element()
        p0 = mukai_pair(self.rho0, self.rho0.conjugate(), nu)
        p1 = mukai_pair(self.rho1, self.rho1.conjugate(), nu)
        return p1 / p0

    def length_constant(self):
        """Constant relating the two pairings for unit spinors: (-1)^m."""
        return self.arith.one if self.m % 2 == 0 else -self.arith.one

    def textbook_length_constant(self):
        """m_hat m!/2^m, the value quoted for the classical normalisation of Omega."""
        m = self.m
        return self.module.m_hat * factorial(m) * self.arith.one / (1 << m)


def build_su_m(
    g,
    B: MultiForm | None,
    alpha: MultiForm | None,
    c_phi,
    psiL: Spinor,
    psiR: Spinor,
) -> SUmStructure:
    mod = psiL.module
    a = mod.arith
    gm = gen_metric_from(g, B)
    n = gm.n
    if mod.n != n or psiR.module.n != n:
        raise ValueError("spinor module does not match the metric dimension")
    if complex(c_phi).real <= 0 or complex(c_phi).imag:
        raise ValueError("c_phi must be positive")
    for name, psi in (("psiL", psiL), ("psiR", psiR)):
        if not a.is_zero(q(psi, psi) - 1):
            raise ValueError(f"{name} must have unit norm")
        if psi.chirality() != 1:
            raise ValueError(f"{name} must lie in Delta_+")
        if not purity_test(psi).is_pure:
            raise ValueError(f"{name} is not pure")
    alpha = alpha if alpha is not None else MultiForm.zero(n)
    eB = exp_wedge(gm.B)
    inv = a.one / c_phi
    rho0 = wedge(eB, fierz(charge_conj(psiL), psiR, gm.g)) * inv
    rho1 = wedge(eB, fierz(psiL, psiR, gm.g)) * inv
    flags = []
    if all(a.is_zero(x - y) for x, y in zip(psiL.v, psiR.v)):
        flags.append("straight")
    elif a.is_zero(q(psiL, psiR)):
        flags.append("straight-reducible to SU(2)")
    return SUmStructure(gm, alpha, c_phi, psiL, psiR, rho0, rho1, tuple(flags))


# G = +J0 J1 for pairs induced by fierzed spinors (the -J0 J1 involution has
# V^- as its +1 eigenspace in this realisation).
STRUCTURE_METRIC_SIGN = 1


@dataclass(frozen=True)
class StructureReport:
    rho0_parity: str
    rho1_parity: str
    rho0_pure: bool
    rho1_pure: bool
    pair0: object
    pair1: object
    length_ok: bool
    commute: bool
    metric_recovered: bool
    reason: str = ""
    length_ratio: object = None
    textbook_length_ok: bool = False

    @property
    def ok(self) -> bool:
        return (
            self.rho0_pure
            and self.rho1_pure
            and self.length_ok
            and self.commute
            and self.metric_recovered
            and self.rho0_parity == "even"
        )


def validate_structure(s: SUmStructure, metric_sign: int = STRUCTURE_METRIC_SIGN) -> StructureReport:
    """Purity, pairings, length constant and the induced generalised Kahler pair."""
    a = s.arith
    nu = s.g.volume_element()
    p0 = mukai_pair(s.rho0, s.rho0.conjugate(), nu)
    p1 = mukai_pair(s.rho1, s.rho1.conjugate(), nu)
    pure0 = is_spin_pure(s.rho0, a) and not a.is_zero(p0)
    pure1 = is_spin_pure(s.rho1, a) and not a.is_zero(p1)
    length_ok = not a.is_zero(p0) and a.is_zero(p1 - s.length_constant() * p0)
    ratio = None if a.is_zero(p0) else p1 / p0
    textbook = ratio is not None and a.is_zero(ratio - s.textbook_length_constant())
    commute = False
    recovered = False
    reason = ""
    if pure0 and pure1:
        chk = check_gen_kahler(gcs_from_pure(s.rho0, a), gcs_from_pure(s.rho1, a), metric_sign)
        commute = chk.commute
        reason = chk.reason
        if chk.metric is not None:
            recovered = _same_metric(chk.metric, s.gm, a)
            if not recovered:
                reason = "recovered (g, B) differ"
    return StructureReport(
        s.rho0.parity, s.rho1.parity, pure0, pure1, p0, p1, length_ok, commute, recovered, reason, ratio, textbook
    )


def _same_metric(x: GenMetric, y: GenMetric, a: Arith) -> bool:
    n = x.n
    okg = all(a.is_zero(x.g.g[i][j] - y.g.g[i][j]) for i in range(n) for j in range(n))
    return okg and (x.B - y.B).is_zero(a)


# ---------------------------------------------------------------------------
# Ramond-Ramond fields


def rr_block_pairs(m: int, parity: str) -> list[tuple[str, str]]:
    """Allowed (left, right) block pairs of the Ramond-Ramond space."""
    if m < 3:
        raise ValueError("Ramond-Ramond spaces are defined for m >= 3")
    if m % 2 == 0:
        if parity != "odd":
            raise ValueError("for m even Ramond-Ramond fields are odd forms")
        return [("W_tilde", "Cm_bar"), ("Cm_bar", "W")]
    if parity == "odd":
        return [("Cm", "Cm"), ("Cm", "V"), ("Cm_bar", "Cm_bar"), ("V_bar", "Cm_bar")]
    if parity == "even":
        return [("Cm", "Cm_bar"), ("V", "Cm_bar"), ("Cm_bar", "Cm"), ("Cm_bar", "V")]
    raise ValueError(f"unknown parity {parity!r}")


@dataclass(frozen=True)
class RRSpace:
    """Allowed Ramond-Ramond subspace; ``basis`` lives in the orthonormal coframe of g."""

    structure: SUmStructure
    parity: str
    basis: tuple
    labels: tuple
    left: SUBasis = field(compare=False)
    right: SUBasis = field(compare=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _frame(self, F: MultiForm) -> MultiForm:
        return self.structure.g.to_frame(F)

    def block_components(self, F: MultiForm) -> dict[tuple[str, str], float]:
        """Max-abs coefficient of F in each (left, right) block of Delta (x) Delta."""
        mod = self.structure.module
        T = fierz_inverse(self._frame(F), mod)
        out = {}
        for (la, us), (lb, vs) in product(self.left.blocks.items(), self.right.blocks.items()):
            best = 0.0
            for u in us:
                nu_ = q(u, u)
                for v in vs:
                    nv = q(v, v)
                    c = 0
                    for i in range(mod.dim):
                        ui = conj(u.v[i])
                        if not ui:
                            continue
                        for j in range(mod.dim):
                            t = T[i][j]
                            if t:
                                c = c + ui * t * conj(v.v[j])
                    c = c / (nu_ * nv) if c else 0
                    best = max(best, abs(complex(c)))
            if best:
                out[(la, lb)] = best
        return out

    def offending_blocks(self, F: MultiForm) -> list[str]:
        allowed = set(self.labels)
        bad = []
        if F.parity not in (self.parity, "zero"):
            bad.append(f"parity {F.parity}")
        tol = 0.0 if self.structure.arith.exact else self.structure.arith.tol
        for key, val in self.block_components(F).items():
            if key not in allowed and val > tol:
                bad.append(f"{key[0]}_L (x) {key[1]}_R")
        return bad

    def is_rr(self, F: MultiForm) -> bool:
        return not self.offending_blocks(F)

    def contains(self, F: MultiForm) -> bool:
        """Rank-based membership in the span of the basis."""
        a = self.structure.arith
        return linalg.span_contains([b.dense(a) for b in self.basis], [self._frame(F).dense(a)], a)

    def project(self, F: MultiForm) -> MultiForm:
        """Orthogonal projection for the hermitian coefficient product in the coframe."""
        a = self.structure.arith
        Bs = [b.dense(a) for b in self.basis]
        f = self._frame(F).dense(a)
        G = [[_herm(x, y) for y in Bs] for x in Bs]
        rhs = [_herm(x, f) for x in Bs]
        c = linalg.solve(G, rhs, a)
        out = MultiForm.zero(F.n)
        for ci, b in zip(c, self.basis):
            out = out + b * ci
        return self.structure.g.from_frame(out)


def _herm(x, y):
    acc = 0
    for a, b in zip(x, y):
        if a and b:
            acc = acc + conj(a) * b
    return acc


def rr_space(s: SUmStructure, parity: str) -> RRSpace:
    left = su_basis(s.psiL)
    right = su_basis(s.psiR)
    pairs = rr_block_pairs(s.m, parity)
    basis = []
    labels = []
    for la, lb in pairs:
        for u in left.block(la):
            for v in right.block(lb):
                basis.append(fierz(u, v))
        labels.append((la, lb))
    for F in basis:
        if F.parity not in (parity, "zero"):
            raise RuntimeError(f"block form of parity {F.parity} in the {parity} space")
    return RRSpace(s, parity, tuple(basis), tuple(labels), left, right)


def rr_annihilator_space(s: SUmStructure, parity: str) -> list[MultiForm]:
    """Forms of the given parity with hat(F) psiL = hat(F) A(psiL) = F psiR = F A(psiR) = 0 (coframe)."""
    a = s.arith
    n = s.n
    from .exteriorcore import all_masks

    masks = [k for k in all_masks(n) if popcount(k) % 2 == (0 if parity == "even" else 1)]
    targets = [
        (True, s.psiL),
        (True, charge_conj(s.psiL)),
        (False, s.psiR),
        (False, charge_conj(s.psiR)),
    ]
    cols = []
    for k in masks:
        e = MultiForm(n, {k: a.one})
        col = []
        for use_hat, psi in targets:
            col.extend(clifford_act(hat(e) if use_hat else e, psi).v)
        cols.append(col)
    rows = [list(r) for r in zip(*cols)]
    ns = linalg.nullspace(rows, len(masks), a)
    return [MultiForm(n, {k: x for k, x in zip(masks, v)}) for v in ns]


def rr_conditions(s: SUmStructure, F: MultiForm) -> list[Spinor]:
    """The four spinors hat(F).psiL, hat(F).A(psiL), F.psiR, F.A(psiR)."""
    g = s.g
    return [
        clifford_act(hat(F), s.psiL, g),
        clifford_act(hat(F), charge_conj(s.psiL), g),
        clifford_act(F, s.psiR, g),
        clifford_act(F, charge_conj(s.psiR), g),
    ]


def hodge_dual_partner(F_b: MultiForm, gm: GenMetric) -> MultiForm:
    """F_a = -G~ F_b."""
    return -gm.g_tilde(F_b)
