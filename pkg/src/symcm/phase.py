"""Classical observables: commutative polynomials in q_i, p_i over Q(i)[hbar, 1/hbar]."""

from __future__ import annotations

from .errors import EvaluationError, LimitUndefinedError, StructuralError
from .scalars import GaussianRational, ZERO, to_rational
from ._poly import TermPolynomial, add_into, strip_zeros


class PhasePolynomial(TermPolynomial):
    """A classical observable (Weyl symbol); ``*`` is the pointwise product."""

    __slots__ = ()

    def _product(self, other):
        out: dict = {}
        get = out.get
        for (ea, ka), (ar, ai) in self._terms.items():
            for (eb, kb), (br, bi) in other._terms.items():
                key = (tuple([x + y for x, y in zip(ea, eb)]), ka + kb)
                r = ar * br - ai * bi
                i = ar * bi + ai * br
                old = get(key)
                out[key] = (r, i) if old is None else (old[0] + r, old[1] + i)
        return PhasePolynomial._raw(self.dof, strip_zeros(out))

    def derivative(self, var: int) -> "PhasePolynomial":
        if not 0 <= var < 2 * self.dof:
            raise StructuralError(f"variable index {var} out of range for dof={self.dof}")
        out: dict = {}
        for (e, k), (r, i) in self._terms.items():
            n = e[var]
            if n:
                e2 = e[:var] + (n - 1,) + e[var + 1:]
                add_into(out, (e2, k), r * n, i * n)
        return PhasePolynomial._raw(self.dof, strip_zeros(out))

    def conjugate(self) -> "PhasePolynomial":
        return self.conjugate_coefficients()

    def evaluate(self, point, hbar) -> GaussianRational:
        values = [to_rational(x) for x in point]
        if len(values) != 2 * self.dof:
            raise StructuralError(f"point needs {2 * self.dof} coordinates, got {len(values)}")
        h = to_rational(hbar)
        re = im = ZERO
        for (e, k), (r, i) in self._terms.items():
            if k < 0 and h == 0:
                raise EvaluationError("negative hbar power evaluated at hbar = 0")
            w = h**k if k >= 0 else 1 / h ** (-k)
            for x, n in zip(values, e):
                if n:
                    w *= x**n
            re += r * w
            im += i * w
        return GaussianRational._from_pair((re, im))


def q(i: int, dof: int = 1) -> PhasePolynomial:
    return PhasePolynomial.variable(i, dof)


def p(i: int, dof: int = 1) -> PhasePolynomial:
    return PhasePolynomial.variable(dof + i, dof)


def _same_dof(a: PhasePolynomial, b: PhasePolynomial) -> None:
    if a.dof != b.dof:
        raise StructuralError(f"dof mismatch: {a.dof} vs {b.dof}")


def poly_add(a: PhasePolynomial, b: PhasePolynomial) -> PhasePolynomial:
    _same_dof(a, b)
    return a + b


def poly_mul(a: PhasePolynomial, b: PhasePolynomial) -> PhasePolynomial:
    _same_dof(a, b)
    return a * b


def partial_derivative(a: PhasePolynomial, var: int) -> PhasePolynomial:
    """d a / d O_var, with O_0..O_{N-1} = q and O_N..O_{2N-1} = p."""
    return a.derivative(var)


def poisson_bracket(a: PhasePolynomial, b: PhasePolynomial) -> PhasePolynomial:
    """{a, b} = sum_i (da/dq_i db/dp_i - da/dp_i db/dq_i)."""
    _same_dof(a, b)
    n = a.dof
    result = PhasePolynomial.zero(n)
    for i in range(n):
        result = result + a.derivative(i) * b.derivative(n + i) - a.derivative(n + i) * b.derivative(i)
    return result


def conjugate(a: PhasePolynomial) -> PhasePolynomial:
    return a.conjugate()


def evaluate(a: PhasePolynomial, point, hbar) -> GaussianRational:
    return a.evaluate(point, hbar)


def hbar_limit_zero(a: PhasePolynomial) -> PhasePolynomial:
    """Keep the hbar**0 part; undefined if any negative power is present."""
    lowest = a.min_hbar_power()
    if lowest is not None and lowest < 0:
        raise LimitUndefinedError(f"hbar^{lowest} has no limit at hbar -> 0")
    return a.hbar_part(0)

