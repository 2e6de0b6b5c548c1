"""Graded exterior algebra on R^n / C^n.

A ``MultiForm`` is a sparse map from blades to scalars.  Blades are stored as
bitmasks: bit ``k`` set means the covector e^{k+1} is present, and the wedge
order is always ascending.  Scalars are either exact ``GaussRat`` values or
Python complex numbers, never mixed inside one computation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import linalg
from .scalars import EXACT, FLOAT, Arith, GaussRat, arith_of, conj, format_scalar, is_exact

MAX_N = 8


# ---------------------------------------------------------------------------
# blade bookkeeping


def popcount(x: int) -> int:
    return bin(x).count("1")


def mask_of(indices: Iterable[int]) -> int:
    """Bitmask of 0-based indices; raises on repeats."""
    m = 0
    for k in indices:
        if m >> k & 1:
            raise ValueError(f"repeated index {k}")
        m |= 1 << k
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return tuple(out)


def blade_label(mask: int) -> str:
    if mask == 0:
        return "1"
    return "e" + "".join(str(k + 1) for k in indices_of(mask))


@lru_cache(maxsize=None)
def wedge_sign(a: int, b: int) -> int:
    """Sign of e^A ^ e^B relative to e^{A u B}; 0 if they overlap."""
    if a & b:
        return 0
    s = 0
    bb = b
    j = 0
    while bb:
        if bb & 1:
            s += popcount(a >> (j + 1))
        bb >>= 1
        j += 1
    return -1 if s & 1 else 1


def hat_sign(p: int) -> int:
    return -1 if (p * (p + 1) // 2) & 1 else 1


def tilde_sign(p: int) -> int:
    return -1 if p & 1 else 1


def all_masks(n: int) -> list[int]:
    """All blades of R^n ordered by degree, then lexicographically."""
    out = []
    for p in range(n + 1):
        out.extend(m for m in _masks_of_degree(n, p))
    return out


@lru_cache(maxsize=None)
def _masks_of_degree(n: int, p: int) -> tuple[int, ...]:
    from itertools import combinations

    return tuple(mask_of(c) for c in combinations(range(n), p))


def masks_of_degree(n: int, p: int) -> tuple[int, ...]:
    return _masks_of_degree(n, p)


# ---------------------------------------------------------------------------
# MultiForm


class MultiForm:
    """Mixed-degree exterior form with scalar coefficients."""

    __slots__ = ("n", "c")

    def __init__(self, n: int, coeffs: Mapping[int, object] | None = None):
        if not 1 <= n <= MAX_N:
            raise ValueError(f"dimension {n} outside 1..{MAX_N}")
        self.n = n
        full = (1 << n) - 1
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                if k & ~full:
                    raise ValueError(f"blade {k:b} outside dimension {n}")
                if v != 0:
                    c[k] = v
        self.c = c

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "MultiForm":
        return cls(n)

    @classmethod
    def scalar(cls, n: int, value) -> "MultiForm":
        return cls(n, {0: value})

    @classmethod
    def blade(cls, n: int, indices: Iterable[int], value=None, arith: Arith = EXACT) -> "MultiForm":
        """Blade e^{k1...kr} from 0-based indices in any order (sign applied)."""
        idx = list(indices)
        sign = 1
        for i in range(len(idx)):
            for j in range(len(idx) - 1 - i):
                if idx[j] > idx[j + 1]:
                    idx[j], idx[j + 1] = idx[j + 1], idx[j]
                    sign = -sign
        v = arith.one if value is None else value
        return cls(n, {mask_of(idx): v if sign > 0 else -v})

    @classmethod
    def one_form(cls, vec: Sequence) -> "MultiForm":
        return cls(len(vec), {1 << k: x for k, x in enumerate(vec)})

    @classmethod
    def from_dense(cls, n: int, vec: Sequence, order: Sequence[int] | None = None) -> "MultiForm":
        order = order if order is not None else list(range(1 << n))
        return cls(n, {k: v for k, v in zip(order, vec)})

    @classmethod
    def parse(cls, text: str, n: int, arith: Arith = EXACT) -> "MultiForm":
        return parse_form(text, n, arith)

    # views -----------------------------------------------------------------
    def dense(self, arith: Arith | None = None, order: Sequence[int] | None = None) -> list:
        arith = arith or self.arith
        order = order if order is not None else range(1 << self.n)
        z = arith.zero
        return [self.c.get(k, z) for k in order]

    @property
    def arith(self) -> Arith:
        for v in self.c.values():
            return arith_of(v)
        return EXACT

    def __getitem__(self, key):
        if isinstance(key, int):
            return self.c.get(key, 0)
        return self.c.get(mask_of(key), 0)

    def items(self):
        return self.c.items()

    def degrees(self) -> set[int]:
        return {popcount(k) for k in self.c}

    def component(self, p: int) -> "MultiForm":
        return MultiForm(self.n, {k: v for k, v in self.c.items() if popcount(k) == p})

    def graded(self) -> dict[int, "MultiForm"]:
        out: dict[int, dict] = {}
        for k, v in self.c.items():
            out.setdefault(popcount(k), {})[k] = v
        return {p: MultiForm(self.n, d) for p, d in sorted(out.items())}

    def even(self) -> "MultiForm":
        return MultiForm(self.n, {k: v for k, v in self.c.items() if popcount(k) % 2 == 0})

    def odd(self) -> "MultiForm":
        return MultiForm(self.n, {k: v for k, v in self.c.items() if popcount(k) % 2 == 1})

    @property
    def parity(self) -> str:
        ps = {p % 2 for p in self.degrees()}
        if not ps:
            return "zero"
        if ps == {0}:
            return "even"
        if ps == {1}:
            return "odd"
        return "mixed"

    def top(self):
        return self.c.get((1 << self.n) - 1, 0)

    # algebra ---------------------------------------------------------------
    def _check(self, other: "MultiForm"):
        if not isinstance(other, MultiForm):
            raise TypeError("expected MultiForm")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch {self.n} vs {other.n}")

    def __add__(self, other: "MultiForm") -> "MultiForm":
        self._check(other)
        c = dict(self.c)
        for k, v in other.c.items():
            c[k] = c[k] + v if k in c else v
        return MultiForm(self.n, c)

    def __sub__(self, other: "MultiForm") -> "MultiForm":
        self._check(other)
        c = dict(self.c)
        for k, v in other.c.items():
            c[k] = c[k] - v if k in c else -v
        return MultiForm(self.n, c)

    def __neg__(self) -> "MultiForm":
        return MultiForm(self.n, {k: -v for k, v in self.c.items()})

    def __mul__(self, s) -> "MultiForm":
        if isinstance(s, MultiForm):
            return NotImplemented
        return MultiForm(self.n, {k: v * s for k, v in self.c.items()})

    __rmul__ = __mul__

    def __truediv__(self, s) -> "MultiForm":
        return MultiForm(self.n, {k: v / s for k, v in self.c.items()})

    def __xor__(self, other: "MultiForm") -> "MultiForm":
        return wedge(self, other)

    def conjugate(self) -> "MultiForm":
        return MultiForm(self.n, {k: conj(v) for k, v in self.c.items()})

    def real_part(self) -> "MultiForm":
        return (self + self.conjugate()) / 2

    def imag_part(self) -> "MultiForm":
        i = GaussRat(0, 1) if self.arith.exact else 1j
        return (self - self.conjugate()) / (2 * i)

    def map(self, f) -> "MultiForm":
        return MultiForm(self.n, {k: f(v) for k, v in self.c.items()})

    # tests -----------------------------------------------------------------
    def max_abs(self) -> float:
        return max((abs(complex(v)) for v in self.c.values()), default=0.0)

    def is_zero(self, arith: Arith | None = None) -> bool:
        arith = arith or self.arith
        return all(arith.is_zero(v) for v in self.c.values())

    def equals(self, other: "MultiForm", arith: Arith | None = None) -> bool:
        return (self - other).is_zero(arith)

    def __eq__(self, other):
        if not isinstance(other, MultiForm):
            return NotImplemented
        return self.n == other.n and (self - other).c == {}

    def __hash__(self):
        return hash((self.n, frozenset((k, hash(v)) for k, v in self.c.items())))

    def __repr__(self):
        return f"MultiForm(n={self.n}, {format_form(self)!r})"

    def __str__(self):
        return format_form(self)


# ---------------------------------------------------------------------------
# basic operations


def wedge(a: MultiForm, b: MultiForm) -> MultiForm:
    a._check(b)
    out: dict[int, object] = {}
    for ka, va in a.c.items():
        for kb, vb in b.c.items():
            s = wedge_sign(ka, kb)
            if not s:
                continue
            k = ka | kb
            t = va * vb
            if s < 0:
                t = -t
            out[k] = out[k] + t if k in out else t
    return MultiForm(a.n, out)


def wedge_all(forms: Sequence[MultiForm]) -> MultiForm:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def contract(X: Sequence, a: MultiForm) -> MultiForm:
    """Interior product X _| a for a vector X given by frame components."""
    if len(X) != a.n:
        raise ValueError(f"dimension mismatch {len(X)} vs {a.n}")
    out: dict[int, object] = {}
    for k, v in a.c.items():
        pos = 0
        kk = k
        j = 0
        while kk:
            if kk & 1:
                x = X[j]
                if x != 0:
                    t = x * v
                    if pos & 1:
                        t = -t
                    r = k & ~(1 << j)
                    out[r] = out[r] + t if r in out else t
                pos += 1
            kk >>= 1
            j += 1
    return MultiForm(a.n, out)


def contract_form(alpha: MultiForm, a: MultiForm) -> MultiForm:
    """Iterated contraction by the metric dual of alpha (orthonormal frame).

    For a blade e^{k1...kr}, alpha _| a = e_{kr} _| ... _| e_{k1} _| a, the
    convention under which (alpha ^ .) and (alpha _| .) are adjoint.
    """
    out = MultiForm.zero(a.n)
    for k, v in alpha.c.items():
        t = a
        for j in indices_of(k):
            e = [0] * a.n
            e[j] = 1
            t = contract(e, t)
        out = out + t * v
    return out


def sign_twist(a: MultiForm, kind: str) -> MultiForm:
    if kind == "hat":
        return MultiForm(a.n, {k: v if hat_sign(popcount(k)) > 0 else -v for k, v in a.c.items()})
    if kind == "tilde":
        return MultiForm(a.n, {k: v if tilde_sign(popcount(k)) > 0 else -v for k, v in a.c.items()})
    raise ValueError(f"unknown sign twist {kind!r}")


def hat(a: MultiForm) -> MultiForm:
    return sign_twist(a, "hat")


def tilde(a: MultiForm) -> MultiForm:
    return sign_twist(a, "tilde")


def exp_wedge(B: MultiForm) -> MultiForm:
    """exp(B) in the exterior algebra for an even form B without scalar part."""
    if B.c.get(0, 0) != 0:
        raise ValueError("exp_wedge needs a form without degree-0 part")
    n = B.n
    out = MultiForm.scalar(n, B.arith.one)
    term = out
    k = 1
    while True:
        term = wedge(term, B) / k
        if not term.c:
            break
        out = out + term
        k += 1
    return out


# ---------------------------------------------------------------------------
# volume and pairing


@dataclass(frozen=True)
class VolumeElement:
    """n-vector nu = scale * e_1 ^ ... ^ e_n with scale > 0.

    ``pair(top)`` evaluates nu on the coefficient of e^{1...n}; the dual
    volume form has coefficient 1/scale.
    """

    n: int
    scale: object = 1

    def __post_init__(self):
        if complex(self.scale).real <= 0 or complex(self.scale).imag != 0:
            raise ValueError("volume scale must be a positive real")

    def pair(self, top_coeff):
        return top_coeff * self.scale

    def dual_form(self, arith: Arith = EXACT) -> MultiForm:
        return MultiForm(self.n, {(1 << self.n) - 1: arith.one / self.scale})

    def rescaled(self, factor) -> "VolumeElement":
        return VolumeElement(self.n, self.scale * factor)


def mukai_pair(rho: MultiForm, tau: MultiForm, nu: VolumeElement | None = None):
    """<rho, tau> = nu([rho ^ hat(tau)]^n)."""
    rho._check(tau)
    nu = nu or VolumeElement(rho.n)
    top = (1 << rho.n) - 1
    acc = 0
    for k, v in rho.c.items():
        w = tau.c.get(top ^ k)
        if w is None:
            continue
        s = wedge_sign(k, top ^ k) * hat_sign(rho.n - popcount(k))
        acc = acc + (v * w if s > 0 else -(v * w))
    return nu.pair(acc)


# ---------------------------------------------------------------------------
# metrics


def _frame_matrix_from_metric(g, arith: Arith):
    """Upper-triangular P with g = P^T P (Cholesky via LDL^T, ascending indices)."""
    n = len(g)
    L = [[arith.zero] * n for _ in range(n)]
    D = [arith.zero] * n
    for j in range(n):
        s = arith.coerce(g[j][j]) if arith.exact else complex(g[j][j])
        for k in range(j):
            s = s - L[j][k] * L[j][k] * D[k]
        D[j] = s
        if complex(s).real <= (0 if arith.exact else arith.tol) or (not arith.exact and abs(complex(s).imag) > arith.tol):
            raise ValueError("metric is not positive definite")
        for i in range(j + 1, n):
            t = arith.coerce(g[i][j]) if arith.exact else complex(g[i][j])
            for k in range(j):
                t = t - L[i][k] * L[j][k] * D[k]
            L[i][j] = t / D[j]
        L[j][j] = arith.one
    roots = []
    for d in D:
        if arith.exact:
            try:
                roots.append(GaussRat(arith.sqrt(d.re)))
            except ValueError as exc:
                raise ValueError(
                    "exact orthonormal frame needs perfect-square pivots; "
                    "pass an explicit coframe or use float mode"
                ) from exc
        else:
            roots.append(complex(complex(d).real ** 0.5))
    # P = sqrt(D) L^T
    return [[roots[a] * L[i][a] if i >= a else arith.zero for i in range(n)] for a in range(n)]


@dataclass(frozen=True)
class MetricData:
    """Riemannian metric with a fixed orthonormal coframe theta = P e.

    theta^a = sum_i P[a][i] e^i; g = P^T P.
    """

    g: tuple
    P: tuple
    Pinv: tuple
    arith: Arith = field(default=EXACT, compare=False)

    @property
    def n(self) -> int:
        return len(self.g)

    @classmethod
    def identity(cls, n: int, arith: Arith = EXACT) -> "MetricData":
        eye = tuple(tuple(arith.one if i == j else arith.zero for j in range(n)) for i in range(n))
        return cls(eye, eye, eye, arith)

    @classmethod
    def from_matrix(cls, g, arith: Arith | None = None) -> "MetricData":
        n = len(g)
        arith = arith or (EXACT if all(is_exact(x) for r in g for x in r) else FLOAT)
        gg = [[arith.coerce(x) if arith.exact else complex(x) for x in r] for r in g]
        for i in range(n):
            for j in range(n):
                if not arith.is_zero(gg[i][j] - gg[j][i]):
                    raise ValueError("metric is not symmetric")
        P = _frame_matrix_from_metric(gg, arith)
        return cls._from(gg, P, arith)

    @classmethod
    def from_coframe(cls, P, arith: Arith | None = None) -> "MetricData":
        arith = arith or (EXACT if all(is_exact(x) for r in P for x in r) else FLOAT)
        P = [[arith.coerce(x) if arith.exact else complex(x) for x in r] for r in P]
        g = linalg.matmul(linalg.transpose(P), P)
        return cls._from(g, P, arith)

    @classmethod
    def _from(cls, g, P, arith):
        if arith.is_zero(linalg.det(P, arith)):
            raise ValueError("degenerate metric")
        if complex(linalg.det(P, arith)).real < 0:
            raise ValueError("coframe must be positively oriented")
        Pinv = linalg.inverse(P, arith)
        tup = lambda a: tuple(tuple(r) for r in a)  # noqa: E731
        return cls(tup(g), tup(P), tup(Pinv), arith)

    def is_identity(self) -> bool:
        n = self.n
        return all((self.P[i][j] == (1 if i == j else 0)) for i in range(n) for j in range(n))

    # change of frame -----------------------------------------------------
    def _push(self, a: MultiForm, M) -> MultiForm:
        # e^i -> sum_a M[i][a] f^a, extended as an algebra map
        if self.is_identity():
            return a
        n = a.n
        images = [MultiForm(n, {1 << b: M[i][b] for b in range(n)}) for i in range(n)]
        out = MultiForm.zero(n)
        cache: dict[int, MultiForm] = {0: MultiForm.scalar(n, self.arith.one)}
        for k in sorted(a.c, key=popcount):
            if k not in cache:
                idx = indices_of(k)
                prev = k & ~(1 << idx[-1])
                if prev not in cache:
                    cache[prev] = wedge_all([images[i] for i in indices_of(prev)]) if prev else cache[0]
                cache[k] = wedge(cache[prev], images[idx[-1]])
            out = out + cache[k] * a.c[k]
        return out

    def to_frame(self, a: MultiForm) -> MultiForm:
        """Coefficients of a in the orthonormal coframe theta."""
        return self._push(a, self.Pinv)

    def from_frame(self, a: MultiForm) -> MultiForm:
        """Coefficients in the standard coframe e of a form given in theta."""
        return self._push(a, self.P)

    def vector_to_frame(self, X: Sequence) -> list:
        return linalg.matvec(self.P, X)

    def vector_from_frame(self, Xf: Sequence) -> list:
        return linalg.matvec(self.Pinv, Xf)

    def flat(self, X: Sequence) -> list:
        """Metric dual covector g(X, .) in the standard coframe."""
        return linalg.matvec(self.g, X)

    def volume_form(self) -> MultiForm:
        return MultiForm(self.n, {(1 << self.n) - 1: linalg.det(self.P, self.arith)})

    def volume_element(self) -> VolumeElement:
        d = linalg.det(self.P, self.arith)
        return VolumeElement(self.n, (self.arith.one / d) if self.arith.exact else complex(1 / d).real)


def star_orthonormal(a: MultiForm) -> MultiForm:
    """Hodge star in an oriented orthonormal frame: alpha ^ *alpha = |alpha|^2 vol."""
    n = a.n
    full = (1 << n) - 1
    out = {}
    for k, v in a.c.items():
        comp = full ^ k
        s = wedge_sign(k, comp)
        out[comp] = v if s > 0 else -v
    return MultiForm(n, out)


def hodge_star(g: MetricData | None, a: MultiForm) -> MultiForm:
    if g is None or g.is_identity():
        return star_orthonormal(a)
    return g.from_frame(star_orthonormal(g.to_frame(a)))


def g_tilde(g: MetricData | None, rho: MultiForm) -> MultiForm:
    """Generalised Hodge operator: star(hat rho) for n even, star(hat tilde rho) for n odd."""
    if rho.n % 2 == 0:
        return hodge_star(g, hat(rho))
    return hodge_star(g, hat(tilde(rho)))


def q_pairing(rho: MultiForm, tau: MultiForm, g: MetricData | None = None, sign: int = 1, nu=None):
    """Q^{+-}(rho, tau) = +-(-1)^m <rho, G~ tau>."""
    m = rho.n // 2
    val = mukai_pair(rho, g_tilde(g, tau), nu)
    return val if (sign * (-1) ** m) > 0 else -val


def form_inner(a: MultiForm, b: MultiForm, g: MetricData | None = None):
    """Pointwise inner product [*a ^ b]^n against the metric volume (real bilinear)."""
    top = wedge(hodge_star(g, a), b).top()
    if g is None or g.is_identity():
        return top
    return top / linalg.det(g.P, g.arith)


# ---------------------------------------------------------------------------
# form literals

_TERM_SPLIT = re.compile(r"\s+")


def _split_terms(text: str) -> list[tuple[int, str]]:
    text = _TERM_SPLIT.sub("", text)
    if not text:
        raise ValueError("empty form literal")
    terms = []
    depth = 0
    start = 0
    sign = 1
    i = 0
    if text[0] in "+-":
        sign = -1 if text[0] == "-" else 1
        start = i = 1
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start and text[i - 1] not in "*/(,":
            terms.append((sign, text[start:i]))
            sign = -1 if ch == "-" else 1
            start = i + 1
        i += 1
    terms.append((sign, text[start:]))
    return terms


def _parse_number(tok: str, arith: Arith):
    from gmpy2 import mpq

    tok = tok.strip()
    while tok.startswith("(") and tok.endswith(")") and "," not in tok:
        tok = tok[1:-1]
    if tok.startswith("(") and tok.endswith(")"):
        a, b = tok[1:-1].split(",")
        return _parse_number(a, arith) + _parse_number(b, arith) * arith.i
    neg = tok.startswith("-")
    if tok[:1] in "+-":
        tok = tok[1:]
    if not tok:
        raise ValueError("missing number")
    if arith.exact:
        if re.fullmatch(r"\d+(/\d+)?", tok):
            v = GaussRat(mpq(tok))
        elif re.fullmatch(r"\d*\.\d+|\d+\.\d*", tok):
            v = GaussRat(mpq(tok))
        else:
            raise ValueError(f"bad number {tok!r}")
    else:
        if "/" in tok:
            a, b = tok.split("/")
            v = complex(float(a) / float(b))
        else:
            v = complex(float(tok))
    return -v if neg else v


def parse_form(text: str, n: int, arith: Arith = EXACT) -> MultiForm:
    """Parse terms like ``3*e12 - (1/2)*e3456 + (0,1)*e135``."""
    out = MultiForm.zero(n)
    if text.strip() in ("0", ""):
        return out
    for sign, term in _split_terms(text):
        m = re.fullmatch(r"(?:(.*)\*)?e(\d+)", term)
        if m:
            coef = _parse_number(m.group(1), arith) if m.group(1) else arith.one
            digits = [int(ch) - 1 for ch in m.group(2)]
            if any(d < 0 or d >= n for d in digits):
                raise ValueError(f"index out of range in {term!r} for n={n}")
            if any(digits[i] >= digits[i + 1] for i in range(len(digits) - 1)):
                raise ValueError(f"blade indices must ascend in {term!r}")
            blade = MultiForm(n, {mask_of(digits): coef})
        else:
            blade = MultiForm.scalar(n, _parse_number(term, arith))
        out = out + (blade if sign > 0 else -blade)
    return out


def format_form(a: MultiForm) -> str:
    if not a.c:
        return "0"
    out = ""
    for k in sorted(a.c, key=lambda k: (popcount(k), indices_of(k))):
        v = a.c[k]
        neg = complex(v).imag == 0 and complex(v).real < 0
        s = format_scalar(-v if neg else v)
        term = s if k == 0 else f"{s}*{blade_label(k)}"
        if not out:
            out = ("-" if neg else "") + term
        else:
            out += (" - " if neg else " + ") + term
    return out
