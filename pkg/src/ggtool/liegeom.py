"""Left-invariant geometry on Lie algebra models.

A model is given by the differentials de^k of a basis of left-invariant
1-forms (Salamon notation).  Every tensor and spinor field is frame-constant,
so differential operators reduce to finite linear algebra on Lambda^* and
Delta.  Geometric quantities (connections, spinors, Dirac operators) live in
the orthonormal coframe theta = P e of the metric; forms handed in and out
of the public functions use the standard coframe e.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from gmpy2 import mpq

from . import linalg
from .cliffordspin import Spinor, charge_conj, clifford_act, fierz
from .exteriorcore import (
    MetricData,
    MultiForm,
    all_masks,
    contract,
    exp_wedge,
    hodge_star,
    format_form,
    g_tilde,
    hat,
    indices_of,
    mask_of,
    popcount,
    wedge,
)
from .genalg import SUmStructure, rr_space
from .scalars import EXACT, Arith, GaussRat, conj, format_scalar

# ---------------------------------------------------------------------------
# Lie algebra models


class ModelError(ValueError):
    """Malformed Salamon string or structure constants violating Jacobi."""


_TERM = re.compile(r"\s*([+-]?)\s*(?:(\d+(?:/\d+)?)\*|\((\d+/\d+)\)\*)?(\d)(\d)\s*")


def _parse_entry(text: str, n: int) -> dict[int, object]:
    text = text.strip()
    if text == "0":
        return {}
    out: dict[int, object] = {}
    pos = 0
    first = True
    while pos < len(text):
        mt = _TERM.match(text, pos)
        if not mt or mt.end() == pos or (not first and not mt.group(1)):
            raise ModelError(f"cannot parse {text!r} near position {pos}")
        sign, c1, c2, a, b = mt.groups()
        i, j = int(a) - 1, int(b) - 1
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ModelError(f"bad index pair e{a}{b} in {text!r}")
        c = mpq(c1 or c2 or 1)
        if sign == "-":
            c = -c
        if i > j:
            i, j, c = j, i, -c
        k = (1 << i) | (1 << j)
        out[k] = out.get(k, 0) + c
        pos = mt.end()
        first = False
    return {k: GaussRat(v) for k, v in out.items() if v}


class LieAlgebraModel:
    """Structure constants presented through de^k; d extended as an antiderivation."""

    def __init__(self, de: Sequence[MultiForm], label: str = "", check: bool = True):
        de = tuple(de)
        if not de:
            raise ModelError("empty model")
        n = len(de)
        for k, f in enumerate(de):
            if f.n != n or any(popcount(K) != 2 for K in f.c):
                raise ModelError(f"de^{k + 1} is not a 2-form in dimension {n}")
        self.n = n
        self.de = de
        self.label = label
        self._dcache: dict[int, MultiForm] = {}
        if check:
            bad = self.jacobi_failures()
            if bad:
                names = ", ".join(f"e^{k + 1}" for k in bad)
                raise ModelError(f"Jacobi identity fails: d(d {names}) != 0")
            if not self.is_unimodular():
                warnings.warn(f"model {self.salamon} is not unimodular; d* is not the L2 adjoint", stacklevel=2)

    @classmethod
    def parse(cls, text: str, check: bool = True) -> "LieAlgebraModel":
        parts = [p for p in text.strip().split(",")]
        n = len(parts)
        if not 1 <= n <= 8 or any(not p.strip() for p in parts):
            raise ModelError(f"malformed Salamon string {text!r}")
        de = [MultiForm(n, _parse_entry(p, n)) for p in parts]
        return cls(de, text.strip(), check)

    # presentation -------------------------------------------------------
    @property
    def salamon(self) -> str:
        def entry(f: MultiForm) -> str:
            if not f.c:
                return "0"
            s = ""
            for K in sorted(f.c, key=indices_of):
                v = f.c[K]
                i, j = indices_of(K)
                x = complex(v).real
                neg = x < 0
                mag = -v if neg else v
                coef = "" if mag == 1 else f"({format_scalar(mag)})*" if "/" in format_scalar(mag) else f"{format_scalar(mag)}*"
                s += ("-" if neg else ("+" if s else "")) + coef + f"{i + 1}{j + 1}"
            return s

        return ",".join(entry(f) for f in self.de)

    def __repr__(self):
        return f"LieAlgebraModel({self.salamon!r})"

    def __eq__(self, other):
        return isinstance(other, LieAlgebraModel) and all(a == b for a, b in zip(self.de, other.de)) and self.n == other.n

    def __hash__(self):
        return hash(tuple(self.de))

    # structure constants -------------------------------------------------
    @cached_property
    def structure_constants(self) -> tuple:
        """c[i][j][k] = e^k([e_i, e_j]) = -de^k(e_i, e_j)."""
        n = self.n
        z = self.de[0].arith.zero if any(f.c for f in self.de) else EXACT.zero
        c = [[[z] * n for _ in range(n)] for _ in range(n)]
        for k, f in enumerate(self.de):
            for K, v in f.c.items():
                i, j = indices_of(K)
                c[i][j][k] = -v
                c[j][i][k] = v
        return tuple(tuple(tuple(r) for r in row) for row in c)

    def jacobi_failures(self) -> list[int]:
        return [k for k, f in enumerate(self.de) if not self.d(f).is_zero()]

    def is_unimodular(self) -> bool:
        c = self.structure_constants
        return all(not sum((c[i][k][k] for k in range(self.n)), 0) for i in range(self.n))

    def is_nilpotent(self) -> bool:
        """The lower central series g, [g, g], [g, [g, g]], ... reaches zero."""
        n = self.n
        c = self.structure_constants
        span = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        while span:
            brackets = [
                [sum((u[a] * c[a][i][k] for a in range(n) if u[a]), 0) for k in range(n)] for u in span for i in range(n)
            ]
            nxt = _row_basis([w for w in brackets if any(w)])
            if len(nxt) == len(span):
                return False
            span = nxt
        return True

    # exterior derivative --------------------------------------------------
    def d_blade(self, K: int) -> MultiForm:
        got = self._dcache.get(K)
        if got is not None:
            return got
        n = self.n
        idx = indices_of(K)
        out = MultiForm.zero(n)
        for pos, k in enumerate(idx):
            if not self.de[k].c:
                continue
            pre = MultiForm(n, {mask_of(idx[:pos]): EXACT.one if pos % 2 == 0 else -EXACT.one})
            post = MultiForm(n, {mask_of(idx[pos + 1 :]): EXACT.one})
            out = out + wedge(wedge(pre, self.de[k]), post)
        self._dcache[K] = out
        return out

    def d(self, a: MultiForm) -> MultiForm:
        if a.n != self.n:
            raise ValueError(f"dimension mismatch {a.n} vs {self.n}")
        acc: dict[int, object] = {}
        for K, v in a.c.items():
            for M, w in self.d_blade(K).c.items():
                t = w * v
                acc[M] = acc[M] + t if M in acc else t
        return MultiForm(self.n, acc)

    # changes of frame ------------------------------------------------------
    def reframe(self, metric: MetricData) -> "LieAlgebraModel":
        """The same algebra written in the orthonormal coframe theta = P e."""
        if metric.is_identity():
            return self
        n = self.n
        de = []
        for a in range(n):
            f = MultiForm.zero(n)
            for i in range(n):
                if metric.P[a][i]:
                    f = f + self.de[i] * metric.P[a][i]
            de.append(metric.to_frame(f))
        return LieAlgebraModel(de, f"{self.label} (orthonormal frame)", check=False)

    def relabel(self, perm: Sequence[int]) -> "LieAlgebraModel":
        """Model in the basis f_i = e_{perm[i]} (a permutation of the generators)."""
        n = self.n
        if sorted(perm) != list(range(n)):
            raise ModelError(f"{perm} is not a permutation of 0..{n - 1}")
        inv = {p: i for i, p in enumerate(perm)}
        de = []
        for i in range(n):
            src = self.de[perm[i]]
            f = {}
            for K, v in src.c.items():
                a, b = indices_of(K)
                x, y = inv[a], inv[b]
                if x > y:
                    x, y, v = y, x, -v
                f[(1 << x) | (1 << y)] = v
            de.append(MultiForm(n, f))
        out = LieAlgebraModel(de, check=False)
        out.label = out.salamon
        return out


def _row_basis(rows):
    basis = []
    for r in rows:
        if linalg.rank(basis + [r], EXACT, len(r)) > len(basis):
            basis.append(r)
    return basis


def parse_model(text: str) -> LieAlgebraModel:
    return LieAlgebraModel.parse(text)


# ---------------------------------------------------------------------------
# flux data and the twisted differential


@dataclass(frozen=True)
class FluxData:
    """Closed 3-form H, closed dilaton 1-form alpha = d phi and the scale c_phi = e^{phi_0}."""

    H: MultiForm
    alpha: MultiForm
    c_phi: object = 1

    def defects(self, model: LieAlgebraModel) -> dict[str, MultiForm]:
        out = {}
        for name, f in (("dH", model.d(self.H)), ("dalpha", model.d(self.alpha))):
            if not f.is_zero():
                out[name] = f
        if set(self.H.degrees()) - {3}:
            out["H degree"] = self.H
        if set(self.alpha.degrees()) - {1}:
            out["alpha degree"] = self.alpha
        return out


def d_H(model: LieAlgebraModel, H: MultiForm | None, rho: MultiForm, alpha: MultiForm | None = None) -> MultiForm:
    """d rho + H ^ rho, conjugated by e^{-phi} (extra -alpha ^ rho) when alpha is given."""
    out = model.d(rho)
    if H is not None and H.c:
        out = out + wedge(H, rho)
    if alpha is not None and alpha.c:
        out = out - wedge(alpha, rho)
    return out


def d_H_squared_defect(model: LieAlgebraModel, H: MultiForm) -> MultiForm | None:
    """A blade rho with d_H d_H rho != 0 (the image dH ^ rho), or None when d_H^2 = 0."""
    for K in all_masks(model.n):
        e = MultiForm(model.n, {K: EXACT.one})
        r = d_H(model, H, d_H(model, H, e))
        if not r.is_zero():
            return r
    return None


def _arith_of(*forms) -> Arith:
    for f in forms:
        if f is not None and f.c:
            return f.arith
    return EXACT


def _masks(n: int, parity: str | None) -> list[int]:
    ms = all_masks(n)
    if parity == "even":
        return [k for k in ms if popcount(k) % 2 == 0]
    if parity == "odd":
        return [k for k in ms if popcount(k) % 2 == 1]
    return list(ms)


def operator_matrix(op, n: int, src: str | None = None, dst: str | None = None, arith: Arith = EXACT):
    """Matrix of a linear map on forms restricted to parity blocks (columns = source blades)."""
    cols_m = _masks(n, src)
    rows_m = _masks(n, dst)
    cols = [op(MultiForm(n, {K: arith.one})) for K in cols_m]
    return [[c.c.get(R, arith.zero) for c in cols] for R in rows_m], rows_m, cols_m


def codifferential(model: LieAlgebraModel, H: MultiForm | None, g: MetricData | None, rho: MultiForm) -> MultiForm:
    """d*_H = (-1)^{floor(n/2)+n} G~ d_H G~."""
    n = model.n
    s = -1 if (n // 2 + n) % 2 else 1
    out = g_tilde(g, d_H(model, H, g_tilde(g, rho)))
    return out if s > 0 else -out


def l2_pairing(sigma: MultiForm, tau: MultiForm, g: MetricData | None = None):
    """(sigma, tau) = 1/2 [sigma ^ *tau]^n against the metric volume (real bilinear, positive)."""
    top = wedge(sigma, hodge_star(g, tau)).top()
    if g is not None and not g.is_identity():
        top = top / linalg.det(g.P, g.arith)
    return top / 2


@dataclass(frozen=True)
class CohomologyResult:
    dim_ev: int
    dim_od: int
    harmonic_ev: tuple
    harmonic_od: tuple

    def summary(self) -> str:
        return f"ev={self.dim_ev} od={self.dim_od}"


def twisted_cohomology(
    model: LieAlgebraModel, H: MultiForm | None, g: MetricData | None = None, harmonic: bool = True
) -> CohomologyResult:
    n = model.n
    if H is not None and not model.d(H).is_zero():
        raise ValueError("twisted cohomology needs dH = 0")
    a = EXACT if (g is None or g.arith.exact) and _arith_of(H).exact else _arith_of(H)
    if g is not None and not g.arith.exact:
        a = g.arith
    op = lambda r: d_H(model, H, r)  # noqa: E731
    dims = {}
    harm = {}
    for par, other in (("even", "odd"), ("odd", "even")):
        A, _, cols = operator_matrix(op, n, par, other, a)
        Bm, _, _ = operator_matrix(op, n, other, par, a)
        ker = len(cols) - linalg.rank(A, a, len(cols))
        im = linalg.rank(Bm, a, len(Bm[0]) if Bm else 0)
        dims[par] = ker - im
        if harmonic:
            dstar = lambda r: codifferential(model, H, g, r)  # noqa: E731
            Cm, _, _ = operator_matrix(dstar, n, par, other, a)
            ns = linalg.nullspace(A + Cm, len(cols), a)
            forms = [MultiForm(n, dict(zip(cols, v))) for v in ns]
            harm[par] = tuple(_orthogonalise(forms, g, a))
        else:
            harm[par] = ()
    for par in ("even", "odd"):
        if harmonic and len(harm[par]) != dims[par]:
            raise RuntimeError(f"harmonic space of dimension {len(harm[par])} != cohomology {dims[par]}")
    return CohomologyResult(dims["even"], dims["odd"], harm["even"], harm["odd"])


def _orthogonalise(forms: list[MultiForm], g, a: Arith) -> list[MultiForm]:
    """Gram-Schmidt for (.,.); exact mode keeps the vectors unnormalised."""
    out: list[MultiForm] = []
    norms = []
    for f in forms:
        v = f
        for u, nu in zip(out, norms):
            v = v - u * (l2_pairing(u, v, g) / nu)
        nv = l2_pairing(v, v, g)
        if a.is_zero(nv):
            continue
        if not a.exact:
            v = v / complex(nv) ** 0.5
            nv = 1.0
        out.append(v)
        norms.append(nv)
    return out


# ---------------------------------------------------------------------------
# connections


def _frame_H(H: MultiForm | None, g: MetricData | None, n: int) -> MultiForm:
    if H is None:
        return MultiForm.zero(n)
    return H if g is None else g.to_frame(H)


def levi_civita(frame: LieAlgebraModel) -> tuple:
    """Gamma[i][j][k] = g(nabla_{e_i} e_j, e_k) in an orthonormal frame (Koszul formula)."""
    c = frame.structure_constants
    n = frame.n
    return tuple(
        tuple(tuple((c[i][j][k] - c[j][k][i] + c[k][i][j]) / 2 for k in range(n)) for j in range(n)) for i in range(n)
    )


@dataclass(frozen=True)
class ConnectionData:
    """Metric connection nabla = nabla^g + sign * H/2 in the orthonormal frame of ``metric``."""

    model: LieAlgebraModel
    frame: LieAlgebraModel
    metric: MetricData
    H: MultiForm  # orthonormal coframe
    sign: int
    gamma: tuple = field(repr=False)

    @property
    def n(self) -> int:
        return self.model.n

    @cached_property
    def lift_forms(self) -> tuple:
        """2-forms w_i with nabla_{e_i} Psi = w_i . Psi on frame-constant spinors."""
        n = self.n
        out = []
        for i in range(n):
            c = {}
            for j in range(n):
                for k in range(j + 1, n):
                    v = self.gamma[i][j][k]
                    if v:
                        c[(1 << j) | (1 << k)] = v / 2
            out.append(MultiForm(n, c))
        return tuple(out)

    def metricity_defect(self) -> list[tuple]:
        n = self.n
        return [
            (i, j, k)
            for i in range(n)
            for j in range(n)
            for k in range(n)
            if self.gamma[i][j][k] + self.gamma[i][k][j] != 0
        ]

    def torsion(self) -> MultiForm:
        """T(e_i, e_j, e_k) = g(T(e_i, e_j), e_k), returned as a 3-form when totally skew."""
        n = self.n
        c = self.frame.structure_constants
        t = {}
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    v = self.gamma[i][j][k] - self.gamma[j][i][k] - c[i][j][k]
                    if v:
                        t[(1 << i) | (1 << j) | (1 << k)] = v
        return MultiForm(n, t)

    def torsion_is_skew(self) -> bool:
        n = self.n
        c = self.frame.structure_constants
        T = [[[self.gamma[i][j][k] - self.gamma[j][i][k] - c[i][j][k] for k in range(n)] for j in range(n)] for i in range(n)]
        return all(T[i][j][k] == -T[i][k][j] for i in range(n) for j in range(n) for k in range(n))


def connection(model: LieAlgebraModel, g: MetricData | None, H: MultiForm | None, sign: int) -> ConnectionData:
    """nabla^{+-}_X Y = nabla^g_X Y +- H(X, Y, .)/2; sign 0 gives Levi-Civita."""
    if sign not in (-1, 0, 1):
        raise ValueError("sign must be -1, 0 or +1")
    n = model.n
    g = g or MetricData.identity(n)
    frame = model.reframe(g)
    Hf = _frame_H(H, g, n)
    G0 = levi_civita(frame)
    if sign and Hf.c:
        Gm = [[list(r) for r in row] for row in G0]
        for K, v in Hf.c.items():
            i, j, k = indices_of(K)
            h = v * sign / 2
            for (a, b, cc), s in (((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1), ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1)):
                Gm[a][b][cc] = Gm[a][b][cc] + (h if s > 0 else -h)
        G0 = tuple(tuple(tuple(r) for r in row) for row in Gm)
    return ConnectionData(model, frame, g, Hf, sign, G0)


def nabla_spinor_frame(conn: ConnectionData, i: int, psi: Spinor) -> Spinor:
    return clifford_act(conn.lift_forms[i], psi)


def nabla_spinor(conn: ConnectionData, X: Sequence, psi: Spinor) -> Spinor:
    """nabla_X Psi for frame-constant Psi; X given by standard-frame components."""
    Xf = conn.metric.vector_to_frame(X)
    out = psi.module.zero()
    for i, x in enumerate(Xf):
        if x:
            out = out + nabla_spinor_frame(conn, i, psi) * x
    return out


def nabla_form_frame(conn: ConnectionData, i: int, a: MultiForm) -> MultiForm:
    """nabla_{e_i} on constant-coefficient forms in the orthonormal coframe."""
    n = conn.n
    out = MultiForm.zero(n)
    for j in range(n):
        for k in range(n):
            gam = conn.gamma[i][j][k]
            if not gam:
                continue
            e_k = [0] * n
            e_k[k] = 1
            ck = contract(e_k, a)
            if ck.c:
                out = out - wedge(MultiForm(n, {1 << j: EXACT.one}), ck) * gam
    return out


def _unit(n: int, i: int) -> list:
    e = [0] * n
    e[i] = 1
    return e


def dirac(conn: ConnectionData, psi: Spinor) -> Spinor:
    """D Psi = sum_k e_k . nabla_{e_k} Psi in the orthonormal frame."""
    n = conn.n
    out = psi.module.zero()
    for k in range(n):
        v = nabla_spinor_frame(conn, k, psi)
        out = out + clifford_act(MultiForm(n, {1 << k: EXACT.one}), v)
    return out


def d_frame(conn: ConnectionData, a: MultiForm) -> MultiForm:
    """d = sum e^k ^ nabla_{e_k} (valid for torsion-free nabla)."""
    n = conn.n
    out = MultiForm.zero(n)
    for k in range(n):
        out = out + wedge(MultiForm(n, {1 << k: EXACT.one}), nabla_form_frame(conn, k, a))
    return out


def dstar_frame(conn: ConnectionData, a: MultiForm) -> MultiForm:
    """d* = -sum e_k _| nabla_{e_k} (unimodular models, Levi-Civita)."""
    n = conn.n
    out = MultiForm.zero(n)
    for k in range(n):
        out = out - contract(_unit(n, k), nabla_form_frame(conn, k, a))
    return out


def twisted_dirac(conn: ConnectionData, psi1: Spinor, psi2: Spinor) -> MultiForm:
    """[D(psi1 (x) psi2)] = sum [e_k nabla_k psi1 (x) psi2] + [e_k psi1 (x) nabla_k psi2] (frame coframe)."""
    n = conn.n
    out = MultiForm.zero(n)
    for k in range(n):
        ek = MultiForm(n, {1 << k: EXACT.one})
        out = out + fierz(clifford_act(ek, nabla_spinor_frame(conn, k, psi1)), psi2)
        out = out + fierz(clifford_act(ek, psi1), nabla_spinor_frame(conn, k, psi2))
    return out


def twisted_dirac_tilde(conn: ConnectionData, psi1: Spinor, psi2: Spinor) -> MultiForm:
    """[D~(psi1 (x) psi2)] = sum [nabla_k psi1 (x) e_k psi2] + [psi1 (x) e_k nabla_k psi2]."""
    n = conn.n
    out = MultiForm.zero(n)
    for k in range(n):
        ek = MultiForm(n, {1 << k: EXACT.one})
        out = out + fierz(nabla_spinor_frame(conn, k, psi1), clifford_act(ek, psi2))
        out = out + fierz(psi1, clifford_act(ek, nabla_spinor_frame(conn, k, psi2)))
    return out


# ---------------------------------------------------------------------------
# spinor field equations


@dataclass(frozen=True)
class Background:
    """A generalised SU(m)-structure on a model together with the flux H."""

    model: LieAlgebraModel
    structure: SUmStructure
    H: MultiForm

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def g(self) -> MetricData:
        return self.structure.g

    @property
    def B(self) -> MultiForm:
        return self.structure.gm.B

    @property
    def alpha(self) -> MultiForm:
        return self.structure.alpha

    @cached_property
    def H_eff(self) -> MultiForm:
        """Flux seen by the spinors: H + dB (e^B ^ d_{H+dB} = d_H e^B ^)."""
        B = self.B
        return self.H + self.model.d(B) if B.c else self.H

    def untwist(self, F: MultiForm) -> MultiForm:
        return wedge(exp_wedge(-self.B), F) if self.B.c else F

    @cached_property
    def conn_plus(self) -> ConnectionData:
        return connection(self.model, self.g, self.H_eff, 1)

    @cached_property
    def conn_minus(self) -> ConnectionData:
        return connection(self.model, self.g, self.H_eff, -1)

    @cached_property
    def conn_lc(self) -> ConnectionData:
        return connection(self.model, self.g, None, 0)


GRAVITINO_VARIANTS = ("corrected", "flipped")


def gravitino_residual(bg: Background, F0: MultiForm, F1: MultiForm, variant: str = "corrected") -> list[tuple[Spinor, Spinor]]:
    """Per orthonormal frame vector X the pair (L_X, R_X) vanishing iff the gravitino equations hold.

    corrected:  L = nabla^+_X psiL + e^phi/2^m (m_hat conj(F0).X.psiR + m_check F1.X.A(psiR))
                R = nabla^-_X psiR - e^phi/2^m (m_hat hat(F0).X.psiL + hat(F1).X.A(psiL))
    flipped:    the same with the flux terms entering with the opposite sign.
    """
    if variant not in GRAVITINO_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    s = bg.structure
    mod = s.module
    g = bg.g
    n = bg.n
    scale = s.c_phi / (1 << s.m)
    if variant == "flipped":
        scale = -scale
    F0 = bg.untwist(F0)
    F1 = bg.untwist(F1)
    cF0 = g.to_frame(F0.conjugate())
    hF0 = g.to_frame(hat(F0))
    F1f = g.to_frame(F1)
    hF1 = g.to_frame(hat(F1))
    ApR = charge_conj(s.psiR)
    ApL = charge_conj(s.psiL)
    out = []
    for k in range(n):
        ek = MultiForm(n, {1 << k: EXACT.one})
        L = nabla_spinor_frame(bg.conn_plus, k, s.psiL)
        tL = clifford_act(cF0, clifford_act(ek, s.psiR)) * mod.m_hat + clifford_act(F1f, clifford_act(ek, ApR)) * mod.m_check
        R = nabla_spinor_frame(bg.conn_minus, k, s.psiR)
        tR = clifford_act(hF0, clifford_act(ek, s.psiL)) * mod.m_hat + clifford_act(hF1, clifford_act(ek, ApL))
        out.append((L + tL * scale, R - tR * scale))
    return out


def modified_dilatino_residual(bg: Background) -> tuple[Spinor, Spinor]:
    """((D - alpha + H/4) psiL, (D - alpha - H/4) psiR)."""
    s = bg.structure
    g = bg.g
    Dl = dirac(bg.conn_lc, s.psiL)
    Dr = dirac(bg.conn_lc, s.psiR)
    aL = clifford_act(bg.alpha, s.psiL, g)
    aR = clifford_act(bg.alpha, s.psiR, g)
    hL = clifford_act(bg.H_eff, s.psiL, g) / 4
    hR = clifford_act(bg.H_eff, s.psiR, g) / 4
    return Dl - aL + hL, Dr - aR - hR


def dh_residual(bg: Background, F0: MultiForm, F1: MultiForm) -> tuple[MultiForm, MultiForm]:
    """(d_H(e^{-phi} rho0) - F0, d_H(e^{-phi} rho1) - F1) with e^{-phi} d_H e^{phi} = d_H - alpha ^."""
    s = bg.structure
    r0 = d_H(bg.model, bg.H, s.rho0, bg.alpha) - F0
    r1 = d_H(bg.model, bg.H, s.rho1, bg.alpha) - F1
    return r0, r1


def rr_fields_of(bg: Background) -> tuple[MultiForm, MultiForm]:
    """The fluxes (F0, F1) for which the form equations hold identically."""
    s = bg.structure
    return d_H(bg.model, bg.H, s.rho0, bg.alpha), d_H(bg.model, bg.H, s.rho1, bg.alpha)


def spinor_max(xs) -> float:
    return max((x.max_abs() for x in xs), default=0.0)


@dataclass(frozen=True)
class ResidualSummary:
    dh: float
    gravitino: float
    dilatino: float

    @property
    def form_side_zero(self) -> bool:
        return self.dh == 0

    def spinor_side_zero(self, tol: float = 0.0) -> bool:
        return self.gravitino <= tol and self.dilatino <= tol


def residual_summary(bg: Background, F0: MultiForm, F1: MultiForm, variant: str = "corrected") -> ResidualSummary:
    r0, r1 = dh_residual(bg, F0, F1)
    grav = gravitino_residual(bg, F0, F1, variant)
    dil = modified_dilatino_residual(bg)
    return ResidualSummary(
        max(r0.max_abs(), r1.max_abs()),
        spinor_max([x for pair in grav for x in pair]),
        spinor_max(dil),
    )


# ---------------------------------------------------------------------------
# curvature


def riemann(conn: ConnectionData) -> list:
    """R[i][j][k][p] = g(R(e_i, e_j) e_k, e_p) for the frame connection coefficients."""
    n = conn.n
    A = conn.gamma
    c = conn.frame.structure_constants
    R = [[[[0] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for p in range(n):
                    v = 0
                    for l in range(n):
                        v = v + A[j][k][l] * A[i][l][p] - A[i][k][l] * A[j][l][p] - c[i][j][l] * A[l][k][p]
                    R[i][j][k][p] = v
    return R


def ricci(conn: ConnectionData) -> list[list]:
    """Ric(e_j, e_k) = sum_i g(R(e_i, e_j) e_k, e_i)."""
    n = conn.n
    R = riemann(conn)
    return [[sum((R[i][j][k][i] for i in range(n)), 0) for k in range(n)] for j in range(n)]


def scalar_curvature(conn: ConnectionData):
    Ric = ricci(conn)
    return sum((Ric[j][j] for j in range(conn.n)), 0)


def nilpotent_scalar_curvature(frame: LieAlgebraModel):
    """Independent closed form -1/4 sum c_ijk^2 for nilpotent algebras in an orthonormal frame."""
    c = frame.structure_constants
    n = frame.n
    return -sum((c[i][j][k] * c[i][j][k] for i in range(n) for j in range(n) for k in range(n)), 0) / 4


def form_norm2(a: MultiForm, g: MetricData | None = None):
    """|a|^2 = sum over ordered index sets of squared orthonormal coefficients."""
    f = a if g is None else g.to_frame(a)
    return sum((v * conj(v) for v in f.c.values()), 0)


@dataclass(frozen=True)
class CurvatureReport:
    ricci_plus: tuple
    scalar_plus: object
    laplacian_proxy: object
    h_norm2: object
    witness_dim: int = 0
    scal_identity: bool | None = None
    dilH_identity: bool | None = None


def laplacian_proxy(model: LieAlgebraModel, g: MetricData | None, alpha: MultiForm):
    """Delta^g phi = d* d phi represented by d* alpha (a constant)."""
    return codifferential(model, None, g, alpha).c.get(0, 0)


def gravdil_kernel(model: LieAlgebraModel, g: MetricData | None, H: MultiForm | None, alpha: MultiForm | None, mod) -> list[Spinor]:
    """Frame-constant Psi with nabla^+ Psi = 0 and (alpha + H/2) . Psi = 0."""
    n = model.n
    g = g or MetricData.identity(n, mod.arith)
    conn = connection(model, g, H, 1)
    alpha = alpha if alpha is not None else MultiForm.zero(n)
    Hh = H if H is not None else MultiForm.zero(n)
    dil = alpha + Hh / 2
    cols = []
    for b in range(mod.dim):
        e = mod.basis(b)
        col = []
        for i in range(n):
            col.extend(nabla_spinor_frame(conn, i, e).v)
        col.extend(clifford_act(dil, e, g).v)
        cols.append(col)
    rows = [list(r) for r in zip(*cols)]
    return [mod.spinor(v) for v in linalg.nullspace(rows, mod.dim, mod.arith)]


def curvature_report(
    model: LieAlgebraModel,
    g: MetricData | None,
    H: MultiForm | None,
    alpha: MultiForm | None,
    witness: Sequence[Spinor] | None = None,
    tol: float = 1e-10,
) -> CurvatureReport:
    n = model.n
    g = g or MetricData.identity(n)
    H = H if H is not None else MultiForm.zero(n)
    alpha = alpha if alpha is not None else MultiForm.zero(n)
    conn = connection(model, g, H, 1)
    Ric = ricci(conn)
    S = sum((Ric[j][j] for j in range(n)), 0)
    lap = laplacian_proxy(model, g, alpha)
    h2 = form_norm2(H, g)
    scal = dil = None
    if witness:
        scal = abs(complex(S - 2 * lap)) <= tol
        dil = abs(complex(S + 3 * h2)) <= tol
    return CurvatureReport(
        tuple(tuple(r) for r in Ric), S, lap, h2, len(witness or ()), scal, dil
    )


# ---------------------------------------------------------------------------
# special SU(3) types


def omega_phase(mod):
    """Phase kappa with [Psi (x) Psi] = kappa * (e^1 - i e^2) ^ (e^3 - i e^4) ^ ... for the Fock vacuum."""
    vac = mod.fock_vacuum()
    rho1 = fierz(vac, vac)
    key = mask_of(range(0, mod.n, 2))
    return rho1.c[key]


@dataclass(frozen=True)
class Classification:
    flags: tuple
    d_omega_zero: bool
    d_psi_plus_zero: bool
    d_psi_minus_zero: bool
    d_rho0_rr: bool | None
    d_rho1_rr: bool | None


def classify_special_types(model: LieAlgebraModel, s: SUmStructure) -> Classification:
    """Calabi-Yau, W3, W2+ or W2- for a straight SU(3)-structure with B = 0, H = 0, alpha = 0."""
    if s.m != 3:
        raise ValueError("classification is implemented for m = 3")
    a = s.arith
    if "straight" not in s.flags or s.gm.B.c or s.alpha.c:
        raise ValueError("classification needs a straight structure with B = 0 and alpha = 0")
    kappa = omega_phase(s.module)
    d0 = model.d(s.rho0)
    d1 = model.d(s.rho1)
    dOm = d1 / kappa  # d Omega, Omega = psi_+ + i psi_-
    dw = d0.is_zero(a)
    dp = dOm.real_part().is_zero(a)
    dm = dOm.imag_part().is_zero(a)
    rr0 = rr_space(s, "odd").is_rr(d0) if not dw else None
    rr1 = rr_space(s, "even").is_rr(d1) if not (dp and dm) else None
    flags = []
    if dw and dp and dm:
        flags.append("CalabiYau")
    elif dp and dm and not dw and rr0:
        flags.append("W3")
    elif dw and dm and not dp and rr1:
        flags.append("W2+")
    elif dw and dp and not dm and rr1:
        flags.append("W2-")
    else:
        flags.append("other")
    return Classification(tuple(flags), dw, dp, dm, rr0, rr1)


# ---------------------------------------------------------------------------
# constrained critical points


@dataclass(frozen=True)
class CriticalResult:
    lam: object
    residual: float
    status: str

    @property
    def critical(self) -> bool:
        return self.status in ("constrained critical", "unconstrained critical")


def constrained_critical_check(
    model: LieAlgebraModel,
    H: MultiForm | None,
    g: MetricData | None,
    tau: MultiForm,
    gamma: MultiForm,
    tol: float = 1e-10,
) -> CriticalResult:
    """Least-squares lambda in d_H G~ tau = lambda d_H gamma."""
    if not d_H(model, H, tau).is_zero(_arith_of(tau)):
        raise ValueError("tau is not d_H-closed")
    lhs = d_H(model, H, g_tilde(g, tau))
    rhs = d_H(model, H, gamma)
    exact = _arith_of(lhs, rhs, tau).exact
    if rhs.is_zero():
        if lhs.is_zero():
            return CriticalResult(None, 0.0, "unconstrained critical")
        return CriticalResult(None, lhs.max_abs(), "d_H gamma = 0; no constraint direction")
    num = sum((conj(v) * lhs.c.get(K, 0) for K, v in rhs.c.items()), 0)
    den = sum((conj(v) * v for v in rhs.c.values()), 0)
    lam = num / den
    res = (lhs - rhs * lam).max_abs()
    ok = res == 0 if exact else res <= tol
    return CriticalResult(lam, res, "constrained critical" if ok else "not critical")


__all__ = [
    "Background",
    "Classification",
    "CohomologyResult",
    "ConnectionData",
    "CriticalResult",
    "CurvatureReport",
    "FluxData",
    "GRAVITINO_VARIANTS",
    "LieAlgebraModel",
    "ModelError",
    "ResidualSummary",
    "classify_special_types",
    "codifferential",
    "connection",
    "constrained_critical_check",
    "curvature_report",
    "d_H",
    "d_H_squared_defect",
    "dh_residual",
    "dirac",
    "form_norm2",
    "format_form",
    "gravdil_kernel",
    "gravitino_residual",
    "l2_pairing",
    "laplacian_proxy",
    "levi_civita",
    "modified_dilatino_residual",
    "nabla_spinor",
    "nabla_spinor_frame",
    "nabla_form_frame",
    "nilpotent_scalar_curvature",
    "d_frame",
    "dstar_frame",
    "operator_matrix",
    "omega_phase",
    "parse_model",
    "residual_summary",
    "ricci",
    "riemann",
    "rr_fields_of",
    "scalar_curvature",
    "twisted_cohomology",
    "twisted_dirac",
    "twisted_dirac_tilde",
]
