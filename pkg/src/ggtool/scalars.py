"""Scalar tower: exact Gaussian rationals with a complex-double fallback.

Every identity checked by the package is polynomial with integer coefficients,
so Gaussian rationals give crisp zero tests.  Float mode runs the same code on
Python ``complex`` values and compares against a tolerance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import gmpy2
from gmpy2 import mpq

Rational = Union[int, Fraction, "mpq"]


def _q(x) -> "mpq":
    if isinstance(x, type(mpq())):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, str):
        return mpq(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


_MPQ = type(mpq())


class GaussRat:
    """Exact element a + bi of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is _MPQ else _q(re)
        self.im = im if type(im) is _MPQ else _q(im)

    @staticmethod
    def _raw(re, im) -> "GaussRat":
        z = GaussRat.__new__(GaussRat)
        z.re = re
        z.im = im
        return z

    # arithmetic ----------------------------------------------------------
    def __add__(self, o):
        if type(o) is GaussRat:
            return GaussRat._raw(self.re + o.re, self.im + o.im)
        if isinstance(o, (int, _MPQ, Fraction)):
            return GaussRat._raw(self.re + _q(o), self.im)
        if isinstance(o, (complex, float)):
            return complex(self) + o
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, o):
        if type(o) is GaussRat:
            return GaussRat._raw(self.re - o.re, self.im - o.im)
        if isinstance(o, (int, _MPQ, Fraction)):
            return GaussRat._raw(self.re - _q(o), self.im)
        if isinstance(o, (complex, float)):
            return complex(self) - o
        return NotImplemented

    def __rsub__(self, o):
        if isinstance(o, (int, _MPQ, Fraction)):
            return GaussRat._raw(_q(o) - self.re, -self.im)
        if isinstance(o, (complex, float)):
            return o - complex(self)
        return NotImplemented

    def __mul__(self, o):
        if type(o) is GaussRat:
            a, b, c, d = self.re, self.im, o.re, o.im
            return GaussRat._raw(a * c - b * d, a * d + b * c)
        if isinstance(o, (int, _MPQ, Fraction)):
            q = _q(o)
            return GaussRat._raw(self.re * q, self.im * q)
        if isinstance(o, (complex, float)):
            return complex(self) * o
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, o):
        if type(o) is GaussRat:
            n = o.re * o.re + o.im * o.im
            if not n:
                raise ZeroDivisionError("division by exact zero")
            a, b, c, d = self.re, self.im, o.re, o.im
            return GaussRat._raw((a * c + b * d) / n, (b * c - a * d) / n)
        if isinstance(o, (int, _MPQ, Fraction)):
            q = _q(o)
            if not q:
                raise ZeroDivisionError("division by exact zero")
            return GaussRat._raw(self.re / q, self.im / q)
        if isinstance(o, (complex, float)):
            return complex(self) / o
        return NotImplemented

    def __rtruediv__(self, o):
        if isinstance(o, (int, _MPQ, Fraction)):
            return GaussRat(o) / self
        if isinstance(o, (complex, float)):
            return o / complex(self)
        return NotImplemented

    def __neg__(self):
        return GaussRat._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (ONE / self) ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussRat":
        return GaussRat._raw(self.re, -self.im)

    def abs2(self) -> "mpq":
        return self.re * self.re + self.im * self.im

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    # comparisons / conversion -------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        if type(o) is GaussRat:
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, _MPQ, Fraction)):
            return not self.im and self.re == _q(o)
        if isinstance(o, complex):
            return complex(self) == o
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"GaussRat({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


ZERO = GaussRat(0, 0)
ONE = GaussRat(1, 0)
I = GaussRat(0, 1)


def conj(x):
    if type(x) is GaussRat:
        return x.conjugate()
    return x.conjugate()


def mul_ipow(x, k: int):
    """Multiply x by i**k without a general product."""
    k %= 4
    if k == 0:
        return x
    if type(x) is GaussRat:
        if k == 1:
            return GaussRat._raw(-x.im, x.re)
        if k == 2:
            return GaussRat._raw(-x.re, -x.im)
        return GaussRat._raw(x.im, -x.re)
    return x * (1, 1j, -1, -1j)[k]


IPOW_EXACT = (ONE, I, -ONE, -I)
IPOW_FLOAT = (1 + 0j, 1j, -1 + 0j, -1j)


def is_exact(x) -> bool:
    return type(x) is GaussRat or isinstance(x, (int, _MPQ, Fraction))


def exact_sqrt(q) -> "mpq":
    """Square root of a nonnegative rational that is a perfect square."""
    q = _q(q)
    if q < 0:
        raise ValueError("negative radicand")
    n, d = gmpy2.isqrt_rem(q.numerator), gmpy2.isqrt_rem(q.denominator)
    if n[1] or d[1]:
        raise ValueError(f"{q} is not the square of a rational")
    return mpq(n[0], d[0])


def format_scalar(x) -> str:
    """Render a scalar in the form-literal grammar: bare rationals or (a,b)."""
    if type(x) is GaussRat:
        if not x.im:
            return str(x.re)
        return f"({x.re},{x.im})"
    if isinstance(x, complex):
        if x.imag == 0:
            return repr(x.real)
        return f"({x.real!r},{x.imag!r})"
    return str(x)


@dataclass(frozen=True)
class Arith:
    """Arithmetic session: exact Gaussian rationals or complex doubles."""

    mode: str = "exact"
    tol: float = 1e-10

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown arithmetic mode {self.mode!r}")

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    @property
    def zero(self):
        return ZERO if self.exact else 0j

    @property
    def one(self):
        return ONE if self.exact else 1 + 0j

    @property
    def i(self):
        return I if self.exact else 1j

    @property
    def ipow(self):
        return IPOW_EXACT if self.exact else IPOW_FLOAT

    def scalar(self, re, im=0):
        if self.exact:
            return GaussRat(re, im)
        return complex(float(re), float(im))

    def coerce(self, x):
        if self.exact:
            if type(x) is GaussRat:
                return x
            if isinstance(x, (int, _MPQ, Fraction)):
                return GaussRat(x)
            raise TypeError(f"float value {x!r} in exact session")
        return complex(x)

    def is_zero(self, x) -> bool:
        if type(x) is GaussRat:
            return not x
        return abs(x) <= self.tol

    def sqrt(self, q):
        if self.exact:
            return exact_sqrt(q)
        return float(q) ** 0.5


EXACT = Arith("exact")
FLOAT = Arith("float")


def is_zero(x, tol: float = 1e-10) -> bool:
    if type(x) is GaussRat:
        return not x
    if isinstance(x, (int, _MPQ, Fraction)):
        return x == 0
    return abs(x) <= tol


def arith_of(x) -> Arith:
    return EXACT if is_exact(x) else FLOAT


class RationalRandom:
    """Seeded source of small Gaussian-rational (or float) samples."""

    def __init__(self, seed: int = 0, arith: Arith = EXACT, denom: int = 16, span: int = 3):
        self.rng = random.Random(seed)
        self.arith = arith
        self.denom = denom
        self.span = span

    def rational(self):
        num = self.rng.randint(-self.span * self.denom, self.span * self.denom)
        den = self.rng.randint(1, self.denom)
        return mpq(num, den)

    def real(self):
        q = self.rational()
        return GaussRat(q) if self.arith.exact else complex(float(q))

    def complex(self):
        a, b = self.rational(), self.rational()
        return GaussRat(a, b) if self.arith.exact else complex(float(a), float(b))

    def integer(self, lo: int, hi: int) -> int:
        return self.rng.randint(lo, hi)

    def choice(self, seq):
        return self.rng.choice(seq)

    def unit_vector(self, n: int, height: int = 2) -> list:
        """Rational point on the unit sphere S^{n-1} by inverse stereographic projection.

        Stereographic coordinates are drawn with numerators and denominators
        bounded by ``height`` so exact products stay small.
        """
        while True:
            t = [mpq(self.rng.randint(-height, height), self.rng.randint(1, height)) for _ in range(n - 1)]
            s = sum(x * x for x in t)
            vec = [2 * x / (1 + s) for x in t] + [(s - 1) / (1 + s)]
            if any(vec):
                break
        if self.arith.exact:
            return [GaussRat(x) for x in vec]
        return [complex(float(x)) for x in vec]

    def unit_phase(self):
        """Unit Gaussian rational (p + qi)^2 / (p^2 + q^2)."""
        while True:
            p, q = self.rng.randint(-5, 5), self.rng.randint(-5, 5)
            if p or q:
                break
        z = GaussRat(p * p - q * q, 2 * p * q) / (p * p + q * q)
        return z if self.arith.exact else complex(z)
