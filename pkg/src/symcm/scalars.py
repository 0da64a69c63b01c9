"""Exact scalars: Gaussian rationals and Laurent polynomials in hbar.

Rationals are ``gmpy2.mpq`` throughout; they compare and hash equal to
``fractions.Fraction`` so callers may pass either.  Floats are rejected.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterator, Mapping

from gmpy2 import mpq

ZERO = mpq(0)
ONE = mpq(1)

# A Gaussian rational in the kernels is a plain (re, im) tuple of mpq.
GQ_ZERO = (ZERO, ZERO)
GQ_ONE = (ONE, ZERO)
GQ_I = (ZERO, ONE)


def to_rational(value) -> mpq:
    """Coerce an exact rational-like value to ``mpq``."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, Rational)) or type(value) is type(ONE):
        return mpq(value)
    if isinstance(value, str):
        return mpq(Fraction(value.strip()))
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def rational_str(x) -> str:
    """``a`` or ``a/b`` in lowest terms."""
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def gq_mul(a, b):
    ar, ai = a
    br, bi = b
    return (ar * br - ai * bi, ar * bi + ai * br)


def gq_rotate(c, quarter_turns: int):
    """Multiply by i**quarter_turns."""
    re, im = c
    r = quarter_turns & 3
    if r == 0:
        return c
    if r == 1:
        return (-im, re)
    if r == 2:
        return (-re, -im)
    return (im, -re)


class GaussianRational:
    """An exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", to_rational(re))
        object.__setattr__(self, "im", to_rational(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _from_pair(cls, pair) -> "GaussianRational":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", pair[0])
        object.__setattr__(obj, "im", pair[1])
        return obj

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        return cls(value)

    @property
    def pair(self):
        return (self.re, self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._from_pair((self.re, -self.im))

    def norm_squared(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        try:
            other = to_rational(other)
        except TypeError:
            return NotImplemented
        return self.im == 0 and self.re == other

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __neg__(self):
        return GaussianRational._from_pair((-self.re, -self.im))

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational._from_pair((self.re + o.re, self.im + o.im))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational._from_pair((self.re - o.re, self.im - o.im))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational._from_pair(gq_mul(self.pair, o.pair))

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        d = o.norm_squared()
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = gq_mul(self.pair, (o.re, -o.im))
        return GaussianRational._from_pair((num[0] / d, num[1] / d))

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({rational_str(self.re)}, {rational_str(self.im)})"

    def __str__(self):
        if self.im == 0:
            return rational_str(self.re)
        im = "i" if self.im == 1 else ("-i" if self.im == -1 else f"{rational_str(self.im)}*i")
        if self.re == 0:
            return im
        sign = "" if im.startswith("-") else "+"
        return f"{rational_str(self.re)}{sign}{im}"


class Coefficient(Mapping):
    """Element of Q(i)[hbar, 1/hbar]: a sparse map hbar-power -> GaussianRational.

    Zero values are never stored, so equality is structural.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, object] | None = None):
        clean = {}
        for k, v in (terms or {}).items():
            g = GaussianRational.coerce(v)
            if g:
                clean[int(k)] = g.pair
        self._terms = clean

    @classmethod
    def _from_raw(cls, raw: dict) -> "Coefficient":
        obj = object.__new__(cls)
        obj._terms = raw
        return obj

    @classmethod
    def constant(cls, value) -> "Coefficient":
        return cls({0: value})

    @classmethod
    def hbar(cls, power: int = 1) -> "Coefficient":
        return cls({power: 1})

    # Mapping interface
    def __getitem__(self, k: int) -> GaussianRational:
        return GaussianRational._from_pair(self._terms[k])

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._terms, reverse=True))

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, Coefficient):
            return self._terms == other._terms
        try:
            other = Coefficient.constant(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def min_power(self) -> int | None:
        return min(self._terms) if self._terms else None

    def _coerce(self, other) -> "Coefficient":
        if isinstance(other, Coefficient):
            return other
        return Coefficient.constant(other)

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for k, (br, bi) in o._terms.items():
            ar, ai = out.get(k, GQ_ZERO)
            s = (ar + br, ai + bi)
            if s[0] or s[1]:
                out[k] = s
            else:
                out.pop(k, None)
        return Coefficient._from_raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Coefficient._from_raw({k: (-r, -i) for k, (r, i) in self._terms.items()})

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        out: dict = {}
        for ka, a in self._terms.items():
            for kb, b in o._terms.items():
                pr, pi = gq_mul(a, b)
                k = ka + kb
                cr, ci = out.get(k, GQ_ZERO)
                out[k] = (cr + pr, ci + pi)
        return Coefficient._from_raw({k: v for k, v in out.items() if v[0] or v[1]})

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Exact division by a unit: a nonzero Gaussian rational times a power of hbar."""
        o = self._coerce(other)
        if len(o._terms) != 1:
            raise ZeroDivisionError("can only divide by a monomial unit c*hbar^k")
        (k, c), = o._terms.items()
        inv = GaussianRational(1) / GaussianRational._from_pair(c)
        return Coefficient._from_raw(
            {ka - k: gq_mul(a, inv.pair) for ka, a in self._terms.items()}
        )

    def conjugate(self) -> "Coefficient":
        return Coefficient._from_raw({k: (r, -i) for k, (r, i) in self._terms.items()})

    def flip_hbar(self) -> "Coefficient":
        """Substitute hbar -> -hbar."""
        return Coefficient._from_raw(
            {k: ((r, i) if k % 2 == 0 else (-r, -i)) for k, (r, i) in self._terms.items()}
        )

    def evaluate(self, hbar) -> GaussianRational:
        h = to_rational(hbar)
        if h == 0 and any(k < 0 for k in self._terms):
            from .errors import EvaluationError

            raise EvaluationError("negative hbar power evaluated at hbar = 0")
        re = im = ZERO
        for k, (r, i) in self._terms.items():
            w = h**k if k >= 0 else 1 / h ** (-k)
            re += r * w
            im += i * w
        return GaussianRational._from_pair((re, im))

    def __repr__(self):
        return f"Coefficient({{{', '.join(f'{k}: {self[k]}' for k in self)}}})"
