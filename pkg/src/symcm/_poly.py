"""Sparse term storage shared by classical and operator polynomials.

A term key is ``(exps, k)``: ``exps`` is a flat tuple of 2N nonnegative
exponents (q_0..q_{N-1} then p_0..p_{N-1}) and ``k`` the hbar power.  The
value is an ``(re, im)`` pair of mpq.  Zero values are never stored.
"""

from __future__ import annotations

from numbers import Rational
from typing import Callable, Iterable, Iterator, NamedTuple

from .errors import EvaluationError, StructuralError
from .scalars import (
    Coefficient,
    GaussianRational,
    ONE,
    ZERO,
    gq_mul,
    to_rational,
)


class Monomial(NamedTuple):
    """Exponent vectors of q_0..q_{N-1} and p_0..p_{N-1}."""

    q: tuple
    p: tuple

    @classmethod
    def from_exps(cls, exps: tuple) -> "Monomial":
        n = len(exps) // 2
        return cls(tuple(exps[:n]), tuple(exps[n:]))

    @property
    def exps(self) -> tuple:
        return tuple(self.q) + tuple(self.p)

    @property
    def dof(self) -> int:
        return len(self.q)

    @property
    def degree(self) -> int:
        return sum(self.q) + sum(self.p)


class Term(NamedTuple):
    monomial: Monomial
    hbar: int
    coefficient: GaussianRational


def sort_key(item):
    """Canonical order: total degree, q-, p-exponents, hbar power; all descending."""
    (exps, k), _ = item
    return (-sum(exps), tuple(-e for e in exps), -k)


def add_into(out: dict, key, re, im) -> None:
    old = out.get(key)
    if old is None:
        out[key] = (re, im)
    else:
        out[key] = (old[0] + re, old[1] + im)


def strip_zeros(raw: dict) -> dict:
    return {key: v for key, v in raw.items() if v[0] or v[1]}


def bilinear(a: dict, b: dict, kernel: Callable) -> dict:
    """Extend a monomial-level product bilinearly over two term maps.

    ``kernel(ea, eb)`` returns ``(exps, s, w, rot)`` tuples meaning
    ``w * i**rot * hbar**s * exps`` with ``rot`` in {0, 1} and the sign of
    ``i**s`` already folded into ``w``.
    """
    out: dict = {}
    get = out.get
    for (ea, ka), (ar, ai) in a.items():
        for (eb, kb), (br, bi) in b.items():
            cr = ar * br - ai * bi
            ci = ar * bi + ai * br
            k0 = ka + kb
            for exps, s, w, rot in kernel(ea, eb):
                if rot:
                    x, y = -ci * w, cr * w
                else:
                    x, y = cr * w, ci * w
                key = (exps, k0 + s)
                old = get(key)
                if old is None:
                    out[key] = (x, y)
                else:
                    out[key] = (old[0] + x, old[1] + y)
    return strip_zeros(out)


def unary(a: dict, kernel: Callable) -> dict:
    """Extend a monomial-level linear map; ``kernel(e)`` as in :func:`bilinear`."""
    out: dict = {}
    for (ea, ka), (cr, ci) in a.items():
        for exps, s, w, rot in kernel(ea):
            if rot:
                add_into(out, (exps, ka + s), -ci * w, cr * w)
            else:
                add_into(out, (exps, ka + s), cr * w, ci * w)
    return strip_zeros(out)


def i_power_sign(s: int):
    """(sign, rot) with i**s == sign * i**rot."""
    return (1 if (s & 3) < 2 else -1), s & 1


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Rational, GaussianRational, Coefficient)) or type(x) is type(ONE)


def _scalar_coefficient(x) -> Coefficient:
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, Coefficient):
        return x
    return Coefficient.constant(x)


class TermPolynomial:
    """Immutable sparse polynomial over Q(i)[hbar, 1/hbar] in 2N letters.

    Subclasses fix what a monomial *means* and supply ``_product``.
    """

    __slots__ = ("dof", "_terms", "_hash")

    letters = ("q", "p")

    def __init__(self, dof: int, terms=None):
        if not isinstance(dof, int) or isinstance(dof, bool) or dof < 1:
            raise StructuralError(f"dof must be a positive integer, got {dof!r}")
        raw: dict = {}
        for key, value in (terms or {}).items():
            exps, k = key
            if isinstance(exps, Monomial):
                exps = exps.exps
            exps = tuple(int(e) for e in exps)
            if len(exps) != 2 * dof or any(e < 0 for e in exps):
                raise StructuralError(f"exponent vector {exps} does not fit dof={dof}")
            g = GaussianRational.coerce(value)
            if g:
                add_into(raw, (exps, int(k)), g.re, g.im)
        self.dof = dof
        self._terms = strip_zeros(raw)
        self._hash = None

    @classmethod
    def _raw(cls, dof: int, raw: dict):
        obj = object.__new__(cls)
        obj.dof = dof
        obj._terms = raw
        obj._hash = None
        return obj

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, dof: int):
        return cls(dof)

    @classmethod
    def constant(cls, value, dof: int):
        cls(dof)  # validates dof
        c = _scalar_coefficient(value)
        zero = (0,) * (2 * dof)
        return cls._raw(dof, {(zero, k): v for k, v in c._terms.items()})

    @classmethod
    def one(cls, dof: int):
        return cls.constant(1, dof)

    @classmethod
    def hbar(cls, dof: int, power: int = 1):
        return cls.constant(Coefficient.hbar(power), dof)

    @classmethod
    def variable(cls, index: int, dof: int):
        """Canonical variable O_index: q_index for index < dof, else p_{index-dof}."""
        if not 0 <= index < 2 * dof:
            raise StructuralError(f"variable index {index} out of range for dof={dof}")
        exps = [0] * (2 * dof)
        exps[index] = 1
        return cls._raw(dof, {(tuple(exps), 0): (ONE, ZERO)})

    @classmethod
    def monomial(cls, dof: int, q=None, p=None, coefficient=1, hbar: int = 0):
        q = tuple(q) if q is not None else (0,) * dof
        p = tuple(p) if p is not None else (0,) * dof
        return cls(dof, {(q + p, hbar): coefficient})

    # -- structure --------------------------------------------------------
    def _check(self, other) -> None:
        if type(other) is not type(self):
            raise TypeError(
                f"cannot combine {type(self).__name__} with {type(other).__name__}"
            )
        if other.dof != self.dof:
            raise StructuralError(f"dof mismatch: {self.dof} vs {other.dof}")

    def _coerce(self, other):
        if isinstance(other, TermPolynomial):
            self._check(other)
            return other
        if _is_scalar(other):
            return type(self).constant(other, self.dof)
        return None

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def raw_items(self) -> list:
        """Terms as ``((exps, k), (re, im))`` in canonical order."""
        return sorted(self._terms.items(), key=sort_key)

    def __iter__(self) -> Iterator[Term]:
        for (exps, k), v in self.raw_items():
            yield Term(Monomial.from_exps(exps), k, GaussianRational._from_pair(v))

    @property
    def terms(self) -> dict:
        """Monomial -> Coefficient, in canonical order."""
        grouped: dict = {}
        for (exps, k), v in self.raw_items():
            grouped.setdefault(exps, {})[k] = v
        return {Monomial.from_exps(e): Coefficient._from_raw(c) for e, c in grouped.items()}

    def coefficient(self, monomial) -> Coefficient:
        exps = monomial.exps if isinstance(monomial, Monomial) else tuple(monomial)
        return Coefficient._from_raw(
            {k: v for (e, k), v in self._terms.items() if e == exps}
        )

    def degree(self) -> int:
        """Largest total degree in the letters; -1 for the zero polynomial."""
        return max((sum(e) for e, _ in self._terms), default=-1)

    def hbar_powers(self) -> set:
        return {k for _, k in self._terms}

    def min_hbar_power(self) -> int | None:
        return min((k for _, k in self._terms), default=None)

    def __eq__(self, other):
        if isinstance(other, TermPolynomial):
            return type(other) is type(self) and self.dof == other.dof and self._terms == other._terms
        if _is_scalar(other):
            return self._terms == type(self).constant(other, self.dof)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.dof, frozenset(self._terms.items())))
        return self._hash

    # -- linear structure -----------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for key, (r, i) in o._terms.items():
            add_into(out, key, r, i)
        return type(self)._raw(self.dof, strip_zeros(out))

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw(self.dof, {key: (-r, -i) for key, (r, i) in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def scale(self, scalar):
        c = _scalar_coefficient(scalar)
        out: dict = {}
        for (exps, k), v in self._terms.items():
            for kc, cv in c._terms.items():
                r, i = gq_mul(v, cv)
                add_into(out, (exps, k + kc), r, i)
        return type(self)._raw(self.dof, strip_zeros(out))

    def __mul__(self, other):
        if isinstance(other, TermPolynomial):
            self._check(other)
            return self._product(other)
        if _is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if _is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if _is_scalar(other):
            return self.scale(Coefficient.constant(1) / _scalar_coefficient(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("power must be a nonnegative integer")
        result = type(self).one(self.dof)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def _product(self, other):
        raise NotImplementedError

    # -- hbar handling ----------------------------------------------------
    def shift_hbar(self, n: int):
        """Multiply by hbar**n (n may be negative)."""
        return type(self)._raw(self.dof, {(e, k + n): v for (e, k), v in self._terms.items()})

    def flip_hbar(self):
        """Substitute hbar -> -hbar."""
        return type(self)._raw(
            self.dof,
            {(e, k): (v if k % 2 == 0 else (-v[0], -v[1])) for (e, k), v in self._terms.items()},
        )

    def substitute_hbar(self, value):
        h = to_rational(value)
        if h == 0 and any(k < 0 for _, k in self._terms):
            raise EvaluationError("negative hbar power evaluated at hbar = 0")
        out: dict = {}
        for (e, k), (r, i) in self._terms.items():
            if k == 0:
                w = ONE
            elif h == 0:
                continue
            else:
                w = h**k if k > 0 else 1 / h ** (-k)
            add_into(out, (e, 0), r * w, i * w)
        return type(self)._raw(self.dof, strip_zeros(out))

    def hbar_part(self, k: int):
        """The coefficient of hbar**k, as an hbar-free polynomial."""
        return type(self)._raw(self.dof, {(e, 0): v for (e, kk), v in self._terms.items() if kk == k})

    def conjugate_coefficients(self):
        return type(self)._raw(self.dof, {key: (r, -i) for key, (r, i) in self._terms.items()})

    def map_terms(self, fn: Callable[[tuple, int], Iterable]):
        """Rebuild from ``fn(exps, k) -> iterable of ((exps', k'), (re, im) factor)``."""
        out: dict = {}
        for (e, k), v in self._terms.items():
            for key, factor in fn(e, k):
                r, i = gq_mul(v, factor)
                add_into(out, key, r, i)
        return type(self)._raw(self.dof, strip_zeros(out))

    def __repr__(self):
        from .textio import render_text

        return f"{type(self).__name__}(dof={self.dof}, {render_text(self)!r})"

    def __str__(self):
        from .textio import render_text

        return render_text(self)

