"""Time evolution of symbols as truncated power series in t.

Conventions: dA/dt = (i/hbar) [H, A]_M, so that dq/dt = dH/dp and
dp/dt = -dH/dq; the star-unitary solves i hbar dU/dt = H * U with U(0) = 1
and A(t) = U^{-1} * A * U.
"""

from __future__ import annotations

from gmpy2 import mpq

from .errors import InternalConsistencyError, StructuralError
from .phase import PhasePolynomial, hbar_limit_zero, poisson_bracket
from .scalars import GaussianRational, to_rational
from .series import EvolutionSeries, UnitarySeries
from .star import moyal_bracket, star


def _nonnegative_hbar(*polys) -> bool:
    return all((x.min_hbar_power() or 0) >= 0 for x in polys)


def _same_dof(a, b) -> None:
    if a.dof != b.dof:
        raise StructuralError(f"dof mismatch: {a.dof} vs {b.dof}")


def _i_over_n(n: int) -> GaussianRational:
    return GaussianRational(0, mpq(1, n))


def heisenberg_series(h: PhasePolynomial, a: PhasePolynomial, order: int) -> EvolutionSeries:
    """A_{n+1} = (i/hbar) [H, A_n]_M / (n+1), A_0 = A."""
    _same_dof(h, a)
    if order < 0:
        raise ValueError("order must be nonnegative")
    check = _nonnegative_hbar(h, a)
    coeffs = [a]
    for n in range(order):
        nxt = moyal_bracket(h, coeffs[-1]).shift_hbar(-1).scale(_i_over_n(n + 1))
        lowest = nxt.min_hbar_power()
        if check and lowest is not None and lowest < 0:
            raise InternalConsistencyError(f"hbar^{lowest} in Heisenberg coefficient {n + 1}")
        coeffs.append(nxt)
    return EvolutionSeries(coeffs)


def eom_residual(h: PhasePolynomial, series: EvolutionSeries) -> list:
    """Coefficients of t^n, n < K, in dA/dt - (i/hbar)[H, A(t)]_M."""
    out = []
    for n in range(series.order):
        drift = moyal_bracket(h, series[n]).shift_hbar(-1).scale(GaussianRational(0, 1))
        out.append(series[n + 1].scale(n + 1) - drift)
    return out


def hamilton_rhs(h: PhasePolynomial) -> tuple:
    """(dq_i/dt, dp_i/dt) = (dH/dp_i, -dH/dq_i) for i < N."""
    n = h.dof
    qdot = [h.derivative(n + i) for i in range(n)]
    pdot = [-h.derivative(i) for i in range(n)]
    return qdot, pdot


def poisson_series(h: PhasePolynomial, a: PhasePolynomial, order: int) -> EvolutionSeries:
    """Liouville series of standard mechanics: A_{n+1} = {A_n, H} / (n+1)."""
    _same_dof(h, a)
    if order < 0:
        raise ValueError("order must be nonnegative")
    coeffs = [a]
    for n in range(order):
        coeffs.append(poisson_bracket(coeffs[-1], h).scale(mpq(1, n + 1)))
    return EvolutionSeries(coeffs)


def classical_limit(series: EvolutionSeries) -> EvolutionSeries:
    return EvolutionSeries([hbar_limit_zero(c) for c in series])


def truncated_star(left, right, order: int) -> list:
    """Coefficients n <= order of the star product of two t-series."""
    out = []
    for n in range(order + 1):
        total = PhasePolynomial.zero(left[0].dof)
        for j in range(n + 1):
            total = total + star(left[j], right[n - j])
        out.append(total)
    return out


def _star_inverse(coeffs: list) -> list:
    # V_0 = 1 since U_0 = 1;  V_n = -sum_{k<n} V_k * U_{n-k}
    one = PhasePolynomial.one(coeffs[0].dof)
    inv = [one]
    for n in range(1, len(coeffs)):
        total = PhasePolynomial.zero(one.dof)
        for k in range(n):
            total = total + star(inv[k], coeffs[n - k])
        inv.append(-total)
    return inv


def unitary_series(h: PhasePolynomial, order: int) -> UnitarySeries:
    """U_{n+1} = H * U_n / (i hbar (n+1)), U_0 = 1, plus the star-inverse series."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    coeffs = [PhasePolynomial.one(h.dof)]
    for n in range(order):
        # 1/(i hbar (n+1)) = -i hbar^-1 / (n+1)
        coeffs.append(star(h, coeffs[-1]).shift_hbar(-1).scale(GaussianRational(0, mpq(-1, n + 1))))
    return UnitarySeries(coeffs, _star_inverse(coeffs))


def _inverse_of(u: UnitarySeries) -> list:
    return list(u.inverse) if u.inverse else _star_inverse(list(u.coefficients))


def _conjugate(u: UnitarySeries, a: PhasePolynomial) -> list:
    inv = _inverse_of(u)
    left = [star(v, a) for v in inv]
    return truncated_star(left, u.coefficients, u.order)


def conjugate_by_unitary(u: UnitarySeries, a: PhasePolynomial) -> EvolutionSeries:
    """A(t) = U(t)^{-1} * A * U(t), truncated at U's order."""
    _same_dof(u.coefficients[0], a)
    coeffs = _conjugate(u, a)
    if (a.min_hbar_power() or 0) >= 0:
        for n, c in enumerate(coeffs):
            lowest = c.min_hbar_power()
            if lowest is not None and lowest < 0:
                raise InternalConsistencyError(f"hbar^{lowest} survives in coefficient {n}")
    return EvolutionSeries(coeffs)


def canonical_invariance_check(u: UnitarySeries, a: PhasePolynomial, b: PhasePolynomial) -> bool:
    """U^-1 * [A,B]_M * U == [U^-1*A*U, U^-1*B*U]_M through order K."""
    _same_dof(a, b)
    k = u.order
    lhs = _conjugate(u, moyal_bracket(a, b))
    x = _conjugate(u, a)
    y = _conjugate(u, b)
    for n in range(k + 1):
        rhs = PhasePolynomial.zero(a.dof)
        for j in range(n + 1):
            rhs = rhs + moyal_bracket(x[j], y[n - j])
        if rhs != lhs[n]:
            return False
    return True


def star_unitarity_check(u: UnitarySeries) -> bool:
    """U* * U == 1 through order K (holds for real H)."""
    conj = [c.conjugate() for c in u.coefficients]
    prod = truncated_star(conj, u.coefficients, u.order)
    one = PhasePolynomial.one(u.dof)
    return prod[0] == one and all(c.is_zero() for c in prod[1:])


def trajectory(h: PhasePolynomial, a: PhasePolynomial, order: int, point, hbar, times) -> list:
    """Rows (t, Moyal-series value, Poisson-series value) at a phase-space point."""
    moyal = heisenberg_series(h, a, order)
    classical = poisson_series(h, a, order)
    rows = []
    for t in times:
        t = to_rational(t)
        rows.append((t, moyal.at(t).evaluate(point, hbar), classical.at(t).evaluate(point, hbar)))
    return rows
