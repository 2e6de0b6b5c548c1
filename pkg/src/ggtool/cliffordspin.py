"""Spin modules of Cliff(n,0), charge conjugation and the fierzing dictionary.

Gamma matrices follow a Jordan-Wigner pattern on (C^2)^{(x)m}:

    gamma_{2j+1} = i s3^{(x)j} (x) s1 (x) 1 ...,   gamma_{2j+2} = i s3^{(x)j} (x) s2 (x) 1 ...

and for odd n the last generator is +-i s3^{(x)m}, with the sign fixed so
that the volume element acts as (-1)^{m(m+1)/2} i^{m+1}.  Every generator and
every blade product is a monomial matrix with entries in {+-1, +-i}, so they
are stored as a permutation plus powers of i.  Qubit j is bit m-1-j of the
basis index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from . import linalg
from .exteriorcore import (
    MultiForm,
    MetricData,
    hat,
    hat_sign,
    popcount,
)
from .scalars import EXACT, Arith, GaussRat, conj, mul_ipow

CONVENTION = "recursive-v1"


# ---------------------------------------------------------------------------
# monomial matrices


@dataclass(frozen=True)
class Mono:
    """Monomial matrix M e_b = i^{ph[b]} e_{perm[b]}."""

    perm: tuple
    ph: tuple

    @property
    def dim(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, d: int) -> "Mono":
        return cls(tuple(range(d)), (0,) * d)

    def __matmul__(self, other: "Mono") -> "Mono":
        perm = tuple(self.perm[other.perm[b]] for b in range(self.dim))
        ph = tuple((other.ph[b] + self.ph[other.perm[b]]) % 4 for b in range(self.dim))
        return Mono(perm, ph)

    def times_ipow(self, k: int) -> "Mono":
        return Mono(self.perm, tuple((p + k) % 4 for p in self.ph))

    def conj(self) -> "Mono":
        return Mono(self.perm, tuple((-p) % 4 for p in self.ph))

    def adjoint(self) -> "Mono":
        perm = [0] * self.dim
        ph = [0] * self.dim
        for b, t in enumerate(self.perm):
            perm[t] = b
            ph[t] = (-self.ph[b]) % 4
        return Mono(tuple(perm), tuple(ph))

    def transpose(self) -> "Mono":
        return self.adjoint().conj()

    def apply(self, v: Sequence) -> list:
        out = [None] * self.dim
        for b, t in enumerate(self.perm):
            out[t] = mul_ipow(v[b], self.ph[b])
        return out

    def trace_ipow(self) -> list[int]:
        """Powers of i on the diagonal (the trace is their sum)."""
        return [self.ph[b] for b in range(self.dim) if self.perm[b] == b]

    def dense(self, arith: Arith = EXACT) -> list[list]:
        d = self.dim
        rows = [[arith.zero] * d for _ in range(d)]
        for b, t in enumerate(self.perm):
            rows[t][b] = arith.ipow[self.ph[b]]
        return rows

    def is_scalar(self) -> int | None:
        """k if M = i^k Id, else None."""
        if self.perm != tuple(range(self.dim)) or len(set(self.ph)) != 1:
            return None
        return self.ph[0]


def _jw_gamma(m: int, j: int, which: int) -> Mono:
    # i s3^{(x)j} (x) s{which} (x) 1..., which in {1, 2, 3 (all-s3 tail)}
    d = 1 << m
    perm = []
    ph = []
    for b in range(d):
        bits = [(b >> (m - 1 - q)) & 1 for q in range(m)]
        p = 1  # the overall i
        if which == 3:
            p += 2 * (sum(bits) % 2)
            perm.append(b)
            ph.append(p % 4)
            continue
        p += 2 * (sum(bits[:j]) % 2)
        if which == 2:
            # s2 |0> = i|1>, s2 |1> = -i|0>
            p += 1 if bits[j] == 0 else 3
        perm.append(b ^ (1 << (m - 1 - j)))
        ph.append(p % 4)
    return Mono(tuple(perm), tuple(ph))


def m_hat(m: int) -> int:
    return -1 if (m * (m + 1) // 2) % 2 else 1


def m_check(m: int) -> int:
    return -1 if (m * (m - 1) // 2) % 2 else 1


@lru_cache(maxsize=None)
def _build(n: int):
    if not 2 <= n <= 8:
        raise ValueError(f"spin modules built for 2 <= n <= 8, got {n}")
    m = n // 2
    d = 1 << m
    gam = []
    for j in range(m):
        gam.append(_jw_gamma(m, j, 1))
        gam.append(_jw_gamma(m, j, 2))
    if n % 2:
        g = _jw_gamma(m, 0, 3)
        vol = Mono.identity(d)
        for x in gam + [g]:
            vol = vol @ x
        target = (1 if m_hat(m) > 0 else 2) + (m + 1)
        if vol.is_scalar() != target % 4:
            g = g.times_ipow(2)
        gam.append(g)
    kappa = {0: Mono.identity(d)}
    for mask in range(1, 1 << n):
        top = mask.bit_length() - 1
        kappa[mask] = kappa[mask & ~(1 << top)] @ gam[top]
    # charge conjugation: C conj(gamma_k) = s gamma_k C with s = (-1)^{m+1}
    s2 = 0 if (m + 1) % 2 == 0 else 2
    C = None
    for mask in range(1 << n):
        cand = kappa[mask]
        ok = True
        for g in gam:
            lhs = cand @ g.conj()
            rhs = (g @ cand).times_ipow(s2)
            if lhs != rhs:
                ok = False
                break
        if ok:
            C = cand
            break
    if C is None:
        raise RuntimeError("no monomial charge conjugation found")
    # phase: first nonzero entry of column 0 real positive
    C = C.times_ipow(-C.ph[0])
    return tuple(gam), kappa, C


# ---------------------------------------------------------------------------
# modules and spinors


@dataclass(frozen=True)
class SpinModule:
    """Complex spin module of Cliff(n,0) in the fixed monomial realisation."""

    n: int
    arith: Arith = EXACT

    @property
    def m(self) -> int:
        return self.n // 2

    @property
    def dim(self) -> int:
        return 1 << self.m

    @property
    def convention(self) -> str:
        return CONVENTION

    @property
    def gammas(self) -> tuple:
        return _build(self.n)[0]

    @property
    def kappa(self) -> dict:
        return _build(self.n)[1]

    @property
    def C(self) -> Mono:
        return _build(self.n)[2]

    @property
    def m_hat(self) -> int:
        return m_hat(self.m)

    @property
    def m_check(self) -> int:
        return m_check(self.m)

    def volume(self) -> Mono:
        return self.kappa[(1 << self.n) - 1]

    def chirality_eigenvalue(self, sign: int):
        """Eigenvalue of the volume element on Delta_{+-}: +-m_hat i^m."""
        k = self.m % 4 + (0 if sign * self.m_hat > 0 else 2)
        return self.arith.ipow[k % 4]

    # constructors ---------------------------------------------------------
    def spinor(self, coeffs: Sequence) -> "Spinor":
        if len(coeffs) != self.dim:
            raise ValueError(f"expected {self.dim} coefficients, got {len(coeffs)}")
        if self.arith.exact:
            v = tuple(self.arith.coerce(x) for x in coeffs)
        else:
            v = tuple(complex(x) for x in coeffs)
        return Spinor(self, v)

    def basis(self, b: int) -> "Spinor":
        return self.spinor([self.arith.one if k == b else self.arith.zero for k in range(self.dim)])

    def zero(self) -> "Spinor":
        return self.spinor([self.arith.zero] * self.dim)

    def fock_vacuum(self) -> "Spinor":
        """Unit pure spinor annihilated by (e_{2k-1} - i e_{2k})/2 for all k (n even)."""
        if self.n % 2:
            raise ValueError("Fock vacuum needs n even")
        a = self.arith
        cols = []
        for k in range(self.m):
            z = [a.zero] * self.n
            z[2 * k] = a.one
            z[2 * k + 1] = -a.i
            cols.append(z)
        rows = []
        for z in cols:
            op = vector_matrix(self, z)
            rows.extend(op)
        ns = linalg.nullspace(rows, self.dim, a)
        if len(ns) != 1:
            raise RuntimeError("Fock vacuum not unique")
        v = ns[0]
        # unit norm with first nonzero entry real positive
        k0 = next(i for i, x in enumerate(v) if not a.is_zero(x))
        v = [x / v[k0] for x in v]
        nrm2 = sum((conj(x) * x for x in v), a.zero)
        if a.exact:
            r = a.sqrt(nrm2.re)
            v = [x / r for x in v]
        else:
            v = [x / abs(nrm2) ** 0.5 for x in v]
        return self.spinor(v)

    def gamma_matrix(self, k: int) -> list[list]:
        return self.gammas[k].dense(self.arith)


@dataclass(frozen=True)
class Spinor:
    module: SpinModule
    v: tuple

    @property
    def n(self) -> int:
        return self.module.n

    def _chk(self, o: "Spinor"):
        if not isinstance(o, Spinor) or o.module.n != self.module.n:
            raise ValueError("spinors from different modules")

    def __add__(self, o: "Spinor") -> "Spinor":
        self._chk(o)
        return Spinor(self.module, tuple(a + b for a, b in zip(self.v, o.v)))

    def __sub__(self, o: "Spinor") -> "Spinor":
        self._chk(o)
        return Spinor(self.module, tuple(a - b for a, b in zip(self.v, o.v)))

    def __neg__(self) -> "Spinor":
        return Spinor(self.module, tuple(-a for a in self.v))

    def __mul__(self, s) -> "Spinor":
        return Spinor(self.module, tuple(a * s for a in self.v))

    __rmul__ = __mul__

    def __truediv__(self, s) -> "Spinor":
        return Spinor(self.module, tuple(a / s for a in self.v))

    def q(self, o: "Spinor"):
        """Hermitian product, conjugate-linear in the first slot."""
        return q(self, o)

    def norm2(self):
        return q(self, self)

    def max_abs(self) -> float:
        return max(abs(complex(x)) for x in self.v)

    def is_zero(self, arith: Arith | None = None) -> bool:
        arith = arith or self.module.arith
        return all(arith.is_zero(x) for x in self.v)

    def equals(self, o: "Spinor", arith: Arith | None = None) -> bool:
        return (self - o).is_zero(arith)

    def chirality(self) -> int | None:
        """+1 or -1 if chiral (n even), else None."""
        if self.n % 2 or self.is_zero():
            return None
        mod = self.module
        w = mod.volume().apply(self.v)
        for s in (1, -1):
            lam = mod.chirality_eigenvalue(s)
            if all(mod.arith.is_zero(a - lam * b) for a, b in zip(w, self.v)):
                return s
        return None

    def serialise(self) -> str:
        from .scalars import format_scalar

        def one(x):
            z = format_scalar(x)
            return z if z.startswith("(") else f"({z},0)"

        return "[ " + ", ".join(one(x) for x in self.v) + " ]"


def q(a: Spinor, b: Spinor):
    acc = a.module.arith.zero
    for x, y in zip(a.v, b.v):
        if x and y:
            acc = acc + conj(x) * y
    return acc


def charge_conj(psi: Spinor) -> Spinor:
    """A(Psi) = C conj(Psi)."""
    mod = psi.module
    return Spinor(mod, tuple(mod.C.apply([conj(x) for x in psi.v])))


def a_form(a: Spinor, b: Spinor):
    """Spin(n)-invariant bilinear form A(a, b) = q(A(a), b)."""
    return q(charge_conj(a), b)


def chiral_projection(psi: Spinor, sign: int) -> Spinor:
    """(1 + vol / lambda_{+-}) / 2 applied to psi (n even)."""
    mod = psi.module
    if mod.n % 2:
        raise ValueError("chirality needs n even")
    lam = mod.chirality_eigenvalue(sign)
    w = mod.volume().apply(psi.v)
    return Spinor(mod, tuple((x + y / lam) / 2 for x, y in zip(psi.v, w)))


def vector_matrix(mod: SpinModule, z: Sequence) -> list[list]:
    """Dense matrix of Clifford multiplication by sum_k z_k gamma_k (frame components)."""
    a = mod.arith
    d = mod.dim
    rows = [[a.zero] * d for _ in range(d)]
    for k, zk in enumerate(z):
        if not zk:
            continue
        g = mod.gammas[k]
        for b, t in enumerate(g.perm):
            rows[t][b] = rows[t][b] + mul_ipow(zk, g.ph[b])
    return rows


# ---------------------------------------------------------------------------
# Clifford action of forms


def _frame_form(alpha: MultiForm, metric: MetricData | None) -> MultiForm:
    return alpha if metric is None else metric.to_frame(alpha)


def clifford_act(alpha: MultiForm, psi: Spinor, metric: MetricData | None = None) -> Spinor:
    """kappa(alpha) psi with kappa(e^K) = gamma_{k1} ... gamma_{kr} in the orthonormal frame."""
    mod = psi.module
    if alpha.n != mod.n:
        raise ValueError(f"dimension mismatch {alpha.n} vs {mod.n}")
    alpha = _frame_form(alpha, metric)
    d = mod.dim
    out = [mod.arith.zero] * d
    kap = mod.kappa
    for K, c in alpha.c.items():
        M = kap[K]
        for b, t in enumerate(M.perm):
            x = psi.v[b]
            if x:
                out[t] = out[t] + mul_ipow(c * x, M.ph[b])
    return Spinor(mod, tuple(out))


def vector_act(X: Sequence, psi: Spinor, metric: MetricData | None = None) -> Spinor:
    """Clifford product X . psi for a tangent vector with components X^i in the standard frame."""
    Xf = list(X) if metric is None else metric.vector_to_frame(X)
    return clifford_act(MultiForm.one_form(Xf), psi)


# ---------------------------------------------------------------------------
# purity and complex structures


@dataclass(frozen=True)
class PurityResult:
    is_pure: bool
    annihilator_dimension: int
    annihilator_basis: tuple


def purity_test(psi: Spinor) -> PurityResult:
    mod = psi.module
    if psi.is_zero():
        raise ValueError("zero spinor")
    if mod.n % 2:
        raise ValueError("purity is defined for n even")
    cols = [mod.gammas[k].apply(psi.v) for k in range(mod.n)]
    rows = [list(r) for r in zip(*cols)]
    ns = linalg.nullspace(rows, mod.n, mod.arith)
    return PurityResult(len(ns) == mod.m, len(ns), tuple(tuple(v) for v in ns))


def complex_structure_from_pure(psi: Spinor) -> list[list]:
    """J with X . psi = i JX . psi, as a real n x n matrix in the orthonormal frame."""
    mod = psi.module
    a = mod.arith
    res = purity_test(psi)
    if not res.is_pure:
        raise ValueError("spinor is not pure")
    cols = [mod.gammas[k].apply(psi.v) for k in range(mod.n)]
    # real unknowns: split each complex equation into real and imaginary rows
    re = (lambda x: GaussRat(x.re)) if a.exact else (lambda x: complex(x.real))
    im = (lambda x: GaussRat(x.im)) if a.exact else (lambda x: complex(x.imag))
    A = [[re(c[b]) for c in cols] for b in range(mod.dim)] + [[im(c[b]) for c in cols] for b in range(mod.dim)]
    J = [[a.zero] * mod.n for _ in range(mod.n)]
    for k in range(mod.n):
        rhs = [mul_ipow(x, 3) for x in cols[k]]  # -i e_k . psi
        y = linalg.solve(A, [re(x) for x in rhs] + [im(x) for x in rhs], a)
        if y is None:
            raise ValueError("J equation has no real solution")
        for j in range(mod.n):
            J[j][k] = y[j]
    return J


# ---------------------------------------------------------------------------
# fierzing


def fierz(psiL: Spinor, psiR: Spinor, metric: MetricData | None = None) -> MultiForm:
    """[psiL (x) psiR] with coefficient A(psiL, e_K . psiR) on the blade e^K.

    With a metric the coefficients are computed in its orthonormal coframe
    and the result is expressed in the standard coframe.
    """
    psiL._chk(psiR)
    mod = psiL.module
    ap = [conj(x) for x in charge_conj(psiL).v]
    out = {}
    for K, M in mod.kappa.items():
        acc = 0
        for b, t in enumerate(M.perm):
            x = psiR.v[b]
            y = ap[t]
            if x and y:
                acc = acc + mul_ipow(y * x, M.ph[b])
        if acc:
            out[K] = acc
    F = MultiForm(mod.n, out)
    return F if metric is None else metric.from_frame(F)


def fierz_trace(psiL: Spinor, psiR: Spinor) -> MultiForm:
    """Independent route: hat(F)/d is the endomorphism E(xi) = q(A(psiL), xi) psiR,
    so expand d*E in the basis kappa(e_K), orthonormal for Tr(A* B)/d, and undo the hat."""
    mod = psiL.module
    if mod.n % 2:
        raise ValueError("trace expansion needs n even")
    a = mod.arith
    ap = charge_conj(psiL).v
    # E[t][b] = psiR[t] * conj(ap[b])
    out = {}
    for K, M in mod.kappa.items():
        # Tr(M^dagger E) = sum_b conj(M[t_b][b]) E[t_b][b]
        acc = a.zero
        for b, t in enumerate(M.perm):
            e = psiR.v[t] * conj(ap[b])
            if e:
                acc = acc + mul_ipow(e, -M.ph[b])
        if acc:
            out[K] = acc if hat_sign(popcount(K)) > 0 else -acc
    return MultiForm(mod.n, out)


def fierz_inverse(F: MultiForm, mod: SpinModule) -> list[list]:
    """Tensor T in Delta (x) Delta with fierz(T) = F; T = psi psi'^T for F = fierz(psi, psi')."""
    if mod.n % 2:
        raise ValueError("fierz is invertible only for n even; use parity projections for n odd")
    a = mod.arith
    d = mod.dim
    # E = kappa(hat F) / d;  T = C^T E^T
    E = [[a.zero] * d for _ in range(d)]
    for K, c in hat(F).c.items():
        M = mod.kappa[K]
        for b, t in enumerate(M.perm):
            E[t][b] = E[t][b] + mul_ipow(c, M.ph[b])
    E = [[x / d for x in r] for r in E]
    CT = mod.C.transpose()
    ET = linalg.transpose(E)
    T = [[a.zero] * d for _ in range(d)]
    for b, t in enumerate(CT.perm):
        for j in range(d):
            x = ET[b][j]
            if x:
                T[t][j] = T[t][j] + mul_ipow(x, CT.ph[b])
    return T


def fierz_tensor(T: Sequence[Sequence], mod: SpinModule) -> MultiForm:
    """Linear extension of fierz to a general tensor sum_ab T_ab e_a (x) e_b."""
    out = MultiForm.zero(mod.n)
    for i in range(mod.dim):
        for j in range(mod.dim):
            if T[i][j]:
                out = out + fierz(mod.basis(i), mod.basis(j)) * T[i][j]
    return out


def parity_parts(F: MultiForm) -> dict[str, MultiForm]:
    return {"ev": F.even(), "od": F.odd()}


# ---------------------------------------------------------------------------
# SU(m) adapted bases


def _span_basis(vectors: list[list], arith: Arith) -> list[list]:
    if not vectors:
        return []
    prow, piv = linalg.rref_sparse(
        [{j: arith.coerce(x) for j, x in enumerate(v) if not arith.is_zero(x)} for v in vectors], len(vectors[0])
    ) if arith.exact else (None, None)
    if arith.exact:
        return [[r.get(j, arith.zero) for j in range(len(vectors[0]))] for r in prow]
    import numpy as np

    A = np.array([[complex(x) for x in v] for v in vectors])
    u, s, vh = np.linalg.svd(A)
    r = int(np.sum(s > arith.tol * max(1.0, s[0])))
    return [list(x) for x in vh[:r]]


def _gram_schmidt(vectors: list[Spinor], normalise: bool) -> list[Spinor]:
    out: list[Spinor] = []
    for v in vectors:
        w = v
        for u in out:
            w = w - u * (q(u, w) / q(u, u))
        if w.is_zero():
            continue
        out.append(w)
    if normalise:
        out = [u / abs(complex(q(u, u))) ** 0.5 for u in out]
    return out


@dataclass(frozen=True)
class SUBasis:
    """SU(m)-adapted decomposition of Delta relative to a unit pure spinor.

    ``blocks`` maps a label to q-orthogonal spinors spanning that block:
    C_psi (psi), Cm_bar (zbar_k . psi), Cm (z_k . A(psi)), C_Apsi (A(psi)),
    and the middle modules V / V_bar (m odd) or W / W_tilde (m even).
    ``fock_degree`` records how many zbar factors generate each block.
    Exact sessions return orthogonal (unnormalised) vectors; float sessions
    orthonormal ones.
    """

    psi: Spinor
    J: tuple
    z: tuple
    blocks: dict = field(compare=False)
    fock_degree: dict = field(compare=False)

    def block(self, label: str) -> list[Spinor]:
        return self.blocks.get(label, [])

    def all_vectors(self) -> list[tuple[str, Spinor]]:
        return [(lab, v) for lab, vs in self.blocks.items() for v in vs]

    def gram(self) -> list[list]:
        vs = [v for _, v in self.all_vectors()]
        return [[q(a, b) for b in vs] for a in vs]

    def dims(self) -> dict[str, int]:
        return {k: len(v) for k, v in self.blocks.items()}


def block_label(m: int, k: int) -> str:
    """Label of the Fock-degree-k summand (spanned by zbar_I . psi with |I| = k)."""
    if k == 0:
        return "C_psi"
    if k == m:
        return "C_Apsi"
    if k == 1:
        return "Cm_bar"
    if k == m - 1:
        return "Cm"
    if m % 2:
        return "V" if k % 2 == 0 else "V_bar"
    return "W" if k % 2 == 0 else "W_tilde"


def _unitary_frame(J, arith: Arith) -> list[list]:
    """z_k = (u_k - i J u_k)/2 for a J-adapted orthogonal real basis u_k."""
    n = len(J)
    us: list[list] = []
    span: list[list] = []
    for j in range(n):
        e = [arith.one if i == j else arith.zero for i in range(n)]
        # orthogonalise against span(u, Ju) so far (standard inner product)
        w = e
        for s in span:
            c = sum((x * y for x, y in zip(s, w)), arith.zero) / sum((x * x for x in s), arith.zero)
            w = [x - c * y for x, y in zip(w, s)]
        if all(arith.is_zero(x) for x in w):
            continue
        Jw = linalg.matvec(J, w)
        us.append(w)
        span.extend([w, Jw])
        if len(us) == n // 2:
            break
    z = []
    for u in us:
        Ju = linalg.matvec(J, u)
        z.append([(x - arith.i * y) / 2 for x, y in zip(u, Ju)])
    return z


def su_basis(psi: Spinor) -> SUBasis:
    mod = psi.module
    a = mod.arith
    if mod.n % 2:
        raise ValueError("SU(m) basis needs n even")
    if not a.is_zero(q(psi, psi) - 1):
        raise ValueError("spinor must have unit norm")
    J = complex_structure_from_pure(psi)
    z = _unitary_frame(J, a)
    zbar = [[conj(x) for x in v] for v in z]
    m = mod.m
    from itertools import combinations

    raw: dict[str, list[Spinor]] = {}
    degree: dict[str, int] = {}
    for k in range(m + 1):
        vecs = []
        for I in combinations(range(m), k):
            w = psi
            for i in reversed(I):
                w = vector_act(zbar[i], w)
            vecs.append(w)
        lab = block_label(m, k)
        if k == m - 1 and m > 1:
            # spanned by z_k . A(psi); same subspace, use the stated generators
            ap = charge_conj(psi)
            vecs = [vector_act(zz, ap) for zz in z]
        if k == m:
            vecs = [charge_conj(psi)]
        raw.setdefault(lab, []).extend(vecs)
        degree.setdefault(lab, k)
    blocks = {lab: _gram_schmidt(v, normalise=not a.exact) for lab, v in raw.items()}
    if not a.exact:
        blocks["C_psi"] = [psi]
        blocks["C_Apsi"] = [charge_conj(psi)]
    if m >= 3:
        for lab in ("V", "V_bar") if m % 2 else ("W", "W_tilde"):
            blocks.setdefault(lab, [])
    return SUBasis(psi, tuple(tuple(r) for r in J), tuple(tuple(r) for r in z), blocks, degree)


# ---------------------------------------------------------------------------
# contractions


def bilinear_contractions(psi: Spinor, phi: Spinor, xi: Spinor) -> tuple[Spinor, Spinor]:
    """(q(xi, psi) phi, q(xi, phi) psi) computed through the fierz form."""
    mod = psi.module
    d = mod.dim
    Axi = charge_conj(xi)
    first = clifford_act(hat(fierz(psi, phi)), Axi) / d
    if mod.m % 2:
        second = clifford_act(fierz(psi, phi), Axi) * mod.m_hat / d
    else:
        from .exteriorcore import tilde

        second = clifford_act(tilde(fierz(psi, phi)), Axi) * mod.m_hat / d
    return first, second


# ---------------------------------------------------------------------------
# sampling


def random_spinor(mod: SpinModule, rng, chirality: int | None = None) -> Spinor:
    """Random spinor with small Gaussian-rational coefficients."""
    v = mod.spinor([rng.complex() for _ in range(mod.dim)])
    if chirality is not None:
        v = chiral_projection(v, chirality)
    return v


def random_unit_pure(mod: SpinModule, rng) -> Spinor:
    """Unit pure spinor g . psi0 for a product g of rational unit vectors."""
    if mod.n % 2:
        raise ValueError("pure spinors need n even")
    psi = mod.fock_vacuum()
    for _ in range(2 * rng.integer(1, 2)):
        u = rng.unit_vector(mod.n)
        psi = vector_act(u, psi)
    return psi * rng.unit_phase()


def random_unit_spinor(mod: SpinModule, rng, chirality: int | None = None) -> Spinor:
    """Unit spinor with exact coefficients (rotated Fock vector, optional chirality flip)."""
    psi = random_unit_pure(mod, rng) if mod.n % 2 == 0 else _odd_unit(mod, rng)
    if chirality is not None and psi.chirality() != chirality:
        psi = vector_act(rng.unit_vector(mod.n), psi)
    return psi


def _odd_unit(mod: SpinModule, rng) -> Spinor:
    psi = mod.basis(0)
    for _ in range(3):
        psi = vector_act(rng.unit_vector(mod.n), psi)
    return psi * rng.unit_phase()
