"""Symmetric dequantization and quantization.

``dequantize`` expands an operator in fully symmetrized products and reads
each (O_i1 ... O_ik)_+ as the commutative monomial O_i1 ... O_ik.
``quantize`` is its inverse: the symbol q^a p^b goes to (Q^a P^b)_+ , whose
normal form is  exp(-(i hbar/2) sum_i d/dq_i d/dp_i) q^a p^b  read as
standard-ordered words.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import comb, factorial

from gmpy2 import mpq

from ._poly import add_into, i_power_sign, strip_zeros, unary
from .errors import StructuralError
from .operators import OperatorPolynomial, symmetrize, symmetrized_product
from .phase import PhasePolynomial
from .scalars import Coefficient, ONE, gq_mul, to_rational
from .star import star


def dequantize(x: OperatorPolynomial) -> PhasePolynomial:
    """The Weyl symbol of ``x``, via the Wick expansion in symmetrized products."""
    expansion = symmetrize(x)
    return PhasePolynomial._raw(x.dof, dict(expansion._terms))


@lru_cache(maxsize=None)
def _word_symbol_by_star(exps: tuple) -> tuple:
    dof = len(exps) // 2
    result = PhasePolynomial.one(dof)
    for index, e in enumerate(exps):
        for _ in range(e):
            result = star(result, PhasePolynomial.variable(index, dof))
    return tuple(result._terms.items())


def dequantize_by_star(x: OperatorPolynomial) -> PhasePolynomial:
    """Weyl symbol of ``x`` as the star product of its letters, word by word.

    Independent of the Wick route; the two must agree.
    """
    out: dict = {}
    for (e, k), (r, i) in x._terms.items():
        for (m, s), w in _word_symbol_by_star(e):
            wr, wi = gq_mul((r, i), w)
            add_into(out, (m, k + s), wr, wi)
    return PhasePolynomial._raw(x.dof, strip_zeros(out))


@lru_cache(maxsize=1 << 16)
def _quantize_kernel(exps: tuple) -> tuple:
    n = len(exps) // 2
    partial = [((), (), 0, ONE)]
    for i in range(n):
        a, b = exps[i], exps[n + i]
        partial = [
            (qs + (a - k,), ps + (b - k,), tot + k, w * mpq(comb(a, k) * comb(b, k) * factorial(k)))
            for qs, ps, tot, w in partial
            for k in range(min(a, b) + 1)
        ]
    out = []
    for qs, ps, s, w in partial:
        # (-i hbar / 2)^s
        sign, rot = i_power_sign(s)
        if s & 1:
            sign = -sign
        out.append((qs + ps, s, sign * w / (1 << s), rot))
    return tuple(out)


def quantize(a: PhasePolynomial) -> OperatorPolynomial:
    """Symmetric quantization: each monomial becomes its symmetrized product."""
    return OperatorPolynomial._raw(a.dof, unary(a._terms, _quantize_kernel))


def value_at(a: PhasePolynomial, point) -> Coefficient:
    """Substitute the phase-space variables only; hbar stays symbolic."""
    values = [to_rational(x) for x in point]
    out: dict = {}
    for (e, k), (r, i) in a._terms.items():
        w = ONE
        for x, n in zip(values, e):
            if n:
                w *= x**n
        add_into(out, k, r * w, i * w)
    return Coefficient._from_raw(strip_zeros(out))


def _multi_indices(dim: int, max_total: int):
    for gamma in product(range(max_total + 1), repeat=dim):
        if sum(gamma) <= max_total:
            yield gamma


def shifted_symmetrized_product(gamma: tuple, center) -> OperatorPolynomial:
    """(M_1^g1 ... M_2N^g2N)_+ with M_i = O_i - center_i, by multilinearity."""
    dof = len(gamma) // 2
    c = [to_rational(x) for x in center]
    total = OperatorPolynomial.zero(dof)
    for beta in product(*(range(g + 1) for g in gamma)):
        w = ONE
        for g, b, ci in zip(gamma, beta, c):
            w *= comb(g, b) * (-ci) ** (g - b)
        if w:
            total = total + symmetrized_product(beta, dof).scale(w)
    return total


def taylor_identity_check(x: OperatorPolynomial, center) -> bool:
    """Whether x == sum_n 1/n! sum d^nA/dO...|_center (M_i1 ... M_in)_+ exactly.

    A = dequantize(x).  Grouping the ordered index tuples by multiset turns
    1/n! sum_{i1..in} into sum_gamma 1/gamma!.
    """
    center = tuple(center)
    if len(center) != 2 * x.dof:
        raise StructuralError(f"center needs {2 * x.dof} coordinates")
    a = dequantize(x)
    dim = 2 * x.dof
    derivs = {(0,) * dim: a}
    total = OperatorPolynomial.zero(x.dof)
    for gamma in sorted(_multi_indices(dim, max(a.degree(), 0)), key=sum):
        if sum(gamma):
            j = next(i for i, g in enumerate(gamma) if g)
            parent = gamma[:j] + (gamma[j] - 1,) + gamma[j + 1:]
            d = derivs.get(parent)
            if d is None or d.is_zero():
                continue
            d = d.derivative(j)
            derivs[gamma] = d
        else:
            d = a
        if d.is_zero():
            continue
        coeff = value_at(d, center)
        if coeff.is_zero():
            continue
        fact = 1
        for g in gamma:
            fact *= factorial(g)
        total = total + shifted_symmetrized_product(gamma, center).scale(coeff / fact)
    return total == x


__all__ = [
    "dequantize",
    "dequantize_by_star",
    "quantize",
    "taylor_identity_check",
    "value_at",
]
