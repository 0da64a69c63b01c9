"""Error kets and classicality criteria on products of single-mode Gaussian states.

Expectation values are phase-space averages of Weyl symbols against the
Gaussian Wigner distribution, evaluated exactly with Isserlis moments.
Only the interval probabilities (Gaussian CDFs) are floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import comb, factorial

import gmpy2
from gmpy2 import mpq

from .errors import InternalConsistencyError, PreconditionError, StructuralError
from .operators import OperatorPolynomial
from .phase import PhasePolynomial
from .scalars import GaussianRational, ONE, ZERO, rational_str, to_rational
from .weyl import dequantize

FLOAT_TOL = 1e-8


@dataclass(frozen=True)
class GaussianState:
    """Product of single-mode Gaussian Wigner functions.

    ``means[i] = (q_mean, p_mean)``; ``covariances[i] = (s_qq, s_pp, s_qp)``.
    """

    means: tuple
    covariances: tuple
    hbar: object = 1

    def __post_init__(self):
        means = tuple(tuple(to_rational(x) for x in m) for m in self.means)
        covs = tuple(tuple(to_rational(x) for x in c) for c in self.covariances)
        h = to_rational(self.hbar)
        if not means or len(means) != len(covs):
            raise PreconditionError("need one mean pair and one covariance triple per mode")
        if any(len(m) != 2 for m in means) or any(len(c) != 3 for c in covs):
            raise PreconditionError("means are (q, p) pairs, covariances (s_qq, s_pp, s_qp) triples")
        if h <= 0:
            raise PreconditionError("hbar must be positive")
        for i, (sqq, spp, sqp) in enumerate(covs):
            det = sqq * spp - sqp * sqp
            if sqq <= 0 or det <= 0:
                raise PreconditionError(f"mode {i}: covariance is not positive definite")
            if det < h * h / 4:
                raise PreconditionError(f"mode {i}: violates the uncertainty bound det >= hbar^2/4")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covariances", covs)
        object.__setattr__(self, "hbar", h)

    @classmethod
    def coherent(cls, dof: int = 1, hbar=1, means=None) -> "GaussianState":
        h = to_rational(hbar)
        means = means if means is not None else [(0, 0)] * dof
        return cls(tuple(means), tuple((h / 2, h / 2, 0) for _ in range(dof)), h)

    @property
    def dof(self) -> int:
        return len(self.means)

    def mean(self, var: int) -> mpq:
        n = self.dof
        return self.means[var % n][0 if var < n else 1]

    def variance(self, var: int) -> mpq:
        n = self.dof
        return self.covariances[var % n][0 if var < n else 1]


@dataclass(frozen=True)
class ClassicalDatum:
    """Classical central values O_i^0 and error margins delta_i, i < 2N."""

    centers: tuple
    margins: tuple

    def __post_init__(self):
        c = tuple(to_rational(x) for x in self.centers)
        d = tuple(to_rational(x) for x in self.margins)
        if len(c) != len(d) or len(c) % 2:
            raise PreconditionError("centers and margins need 2N entries each")
        if any(x <= 0 for x in d):
            raise PreconditionError("error margins must be positive")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "margins", d)

    @property
    def dof(self) -> int:
        return len(self.centers) // 2


@lru_cache(maxsize=None)
def _central_moment(r: int, s: int, sxx, syy, sxy) -> mpq:
    """E[x^r y^s] for a centered bivariate normal (Isserlis recursion)."""
    if (r + s) & 1:
        return ZERO
    if r == 0 and s == 0:
        return ONE
    if r:
        out = (r - 1) * sxx * _central_moment(r - 2, s, sxx, syy, sxy) if r >= 2 else ZERO
        if s:
            out += s * sxy * _central_moment(r - 1, s - 1, sxx, syy, sxy)
        return out
    return (s - 1) * syy * _central_moment(0, s - 2, sxx, syy, sxy)


def _mode_moment(a: int, b: int, mean, cov) -> mpq:
    mq, mp = mean
    sqq, spp, sqp = cov
    total = ZERO
    for r in range(a + 1):
        for s in range(b + 1):
            c = _central_moment(r, s, sqq, spp, sqp)
            if c:
                total += comb(a, r) * comb(b, s) * mq ** (a - r) * mp ** (b - s) * c
    return total


def gaussian_moment(state: GaussianState, a: PhasePolynomial) -> GaussianRational:
    """Exact average of the symbol ``a`` (hbar set to the state's value)."""
    if a.dof != state.dof:
        raise StructuralError(f"dof mismatch: state has {state.dof}, observable {a.dof}")
    n = state.dof
    cache: dict = {}
    re = im = ZERO
    for (e, _), (r, i) in a.substitute_hbar(state.hbar)._terms.items():
        w = ONE
        for mode in range(n):
            key = (mode, e[mode], e[n + mode])
            m = cache.get(key)
            if m is None:
                m = cache[key] = _mode_moment(e[mode], e[n + mode], state.means[mode], state.covariances[mode])
            w *= m
            if not w:
                break
        re += r * w
        im += i * w
    return GaussianRational._from_pair((re, im))


def expectation(state: GaussianState, x: OperatorPolynomial) -> GaussianRational:
    return gaussian_moment(state, dequantize(x))


def _real_nonnegative(value: GaussianRational, what: str) -> mpq:
    if value.im != 0 or value.re < 0:
        raise InternalConsistencyError(f"{what} came out as {value}, not a nonnegative real")
    return value.re


def error_ket_norm(state: GaussianState, x: OperatorPolynomial, x0, m: int) -> mpq:
    """<E|E> for |E> = (X - X0)^m |phi>."""
    if m < 1:
        raise PreconditionError("m must be a positive integer")
    if x.dagger() != x:
        raise PreconditionError("X must be self-adjoint")
    d = (x - to_rational(x0)) ** m
    return _real_nonnegative(expectation(state, d.dagger() * d), "error-ket norm")


def _centered_product(state_dof: int, seq, datum: ClassicalDatum) -> OperatorPolynomial:
    e = OperatorPolynomial.one(state_dof)
    for j in seq:
        if not 0 <= j < 2 * state_dof:
            raise StructuralError(f"variable index {j} out of range for dof={state_dof}")
        e = e * (OperatorPolynomial.variable(j, state_dof) - datum.centers[j])
    return e


def mixed_error_ket_norm(state: GaussianState, seq, datum: ClassicalDatum) -> mpq:
    """<E|E> for |E> = (O_j1 - O_j1^0) ... (O_jm - O_jm^0) |phi>."""
    if datum.dof != state.dof:
        raise StructuralError("datum and state have different dof")
    seq = tuple(seq)
    if not seq:
        return ONE
    e = _centered_product(state.dof, seq, datum)
    return _real_nonnegative(expectation(state, e.dagger() * e), "mixed error-ket norm")


def derivative_sequences(a: PhasePolynomial) -> set:
    """Ordered index sequences (i1..in), n >= 1, with d^n a / dO_i1..dO_in != 0."""
    found: set = set()
    stack = [((), a)]
    while stack:
        seq, poly = stack.pop()
        for i in range(2 * a.dof):
            d = poly.derivative(i)
            if not d.is_zero():
                s = seq + (i,)
                found.add(s)
                stack.append((s, d))
    return found


def variable_name(index: int, dof: int) -> str:
    return f"q{index}" if index < dof else f"p{index - dof}"


@dataclass(frozen=True)
class SequenceResult:
    order: int
    sequence: tuple
    norm: mpq
    bound: mpq
    passed: bool


@dataclass(frozen=True)
class ClassicalityReport:
    order: int
    dof: int
    results: tuple = field(default=())

    @property
    def verdict(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json_obj(self) -> dict:
        return {
            "order": self.order,
            "verdict": self.verdict,
            "summary": f"{'' if self.verdict else 'not '}{self.order}-order classical",
            "sequences": [
                {
                    "order": r.order,
                    "sequence": [variable_name(i, self.dof) for i in r.sequence],
                    "norm": rational_str(r.norm),
                    "bound": rational_str(r.bound),
                    "passed": r.passed,
                }
                for r in self.results
            ],
        }

    def to_text(self) -> str:
        lines = [f"{'order':>5}  {'sequence':<24} {'norm':>14} {'bound':>14}  result"]
        for r in self.results:
            seq = ",".join(variable_name(i, self.dof) for i in r.sequence)
            lines.append(
                f"{r.order:>5}  {seq:<24} {rational_str(r.norm):>14} {rational_str(r.bound):>14}  "
                f"{'pass' if r.passed else 'FAIL'}"
            )
        lines.append(f"verdict: {'' if self.verdict else 'not '}{self.order}-order classical")
        return "\n".join(lines) + "\n"


def classicality_check(state: GaussianState, datum: ClassicalDatum, observables, order: int) -> ClassicalityReport:
    """Test <E_S|E_S> <= delta_S^2 for every array S of up to ``order`` derivative sequences.

    An array of m sequences acts through the mixed error ket of their
    concatenation; delta_S is the product of the margins of every entry.
    """
    if order < 1:
        raise PreconditionError("order M must be >= 1")
    sequences: set = set()
    for a in observables:
        if a.dof != state.dof:
            raise StructuralError("observable dof differs from the state's")
        sequences |= derivative_sequences(a)
    base = sorted(sequences, key=lambda s: (len(s), s))
    first_order: dict = {}
    for m in range(1, order + 1):
        for array in product(base, repeat=m):
            flat = tuple(i for s in array for i in s)
            first_order.setdefault(flat, m)
    results = []
    for flat, m in sorted(first_order.items(), key=lambda kv: (kv[1], len(kv[0]), kv[0])):
        norm = mixed_error_ket_norm(state, flat, datum)
        bound = ONE
        for i in flat:
            bound *= datum.margins[i] ** 2
        results.append(SequenceResult(m, flat, norm, bound, norm <= bound))
    return ClassicalityReport(order, state.dof, tuple(results))


def _normal_cdf_mass(mean: float, sd: float, lo: float, hi: float) -> float:
    a = (lo - mean) / (sd * math.sqrt(2))
    b = (hi - mean) / (sd * math.sqrt(2))
    # erfc keeps relative precision in whichever tail the interval sits
    if a >= 0:
        return 0.5 * (math.erfc(a) - math.erfc(b))
    if b <= 0:
        return 0.5 * (math.erfc(-b) - math.erfc(-a))
    return 1.0 - 0.5 * (math.erfc(b) + math.erfc(-a))


def interval_probability(state: GaussianState, var: int, lo, hi) -> float:
    """Probability that a measurement of O_var lands in [lo, hi]."""
    if not 0 <= var < 2 * state.dof:
        raise StructuralError(f"variable index {var} out of range for dof={state.dof}")
    lo, hi = float(lo), float(hi)
    if lo > hi:
        raise PreconditionError("interval needs lo <= hi")
    if lo == hi:
        return 0.0
    return _normal_cdf_mass(float(state.mean(var)), math.sqrt(state.variance(var)), lo, hi)


def consistency_interval(center, margin, p: float, order: int) -> tuple:
    half = float(margin) / (1.0 - p) ** (1.0 / (2 * order))
    return float(center) - half, float(center) + half


def consistency_check(state: GaussianState, datum: ClassicalDatum, order: int, p_grid) -> list:
    """Per canonical variable: whether p_i(p, M) >= p on every grid point."""
    if datum.dof != state.dof:
        raise StructuralError("datum and state have different dof")
    grid = [float(p) for p in p_grid]
    if any(not 0.0 <= p < 1.0 for p in grid):
        raise PreconditionError("grid probabilities must lie in [0, 1)")
    verdicts = []
    for var in range(2 * state.dof):
        ok = True
        for p in grid:
            lo, hi = consistency_interval(datum.centers[var], datum.margins[var], p, order)
            if interval_probability(state, var, lo, hi) + FLOAT_TOL < p:
                ok = False
                break
        verdicts.append(ok)
    return verdicts


_SQRT_SCALE = 10**30


def _modulus_upper(value: GaussianRational) -> mpq:
    """|value|, exact when rational, otherwise rounded up to a nearby rational."""
    if value.im == 0:
        return abs(value.re)
    if value.re == 0:
        return abs(value.im)
    n2 = value.norm_squared()
    num, den = n2.numerator, n2.denominator
    if gmpy2.is_square(num) and gmpy2.is_square(den):
        return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
    # sqrt(num/den) = sqrt(num*den)/den
    scaled = num * den * _SQRT_SCALE**2
    root = gmpy2.isqrt(scaled)
    if root * root < scaled:
        root += 1
    return mpq(root, den * _SQRT_SCALE)


def propagate_error(a: PhasePolynomial, datum: ClassicalDatum, hbar) -> mpq:
    """delta_A = sum_{k>=1} 1/k! sum_{i1..ik} |d^k A/dO_i1..dO_ik|_0 delta_i1 ... delta_ik.

    Ordered index tuples are grouped by multiset, giving sum over gamma of
    |d^gamma A| delta^gamma / gamma!.
    """
    if datum.dof != a.dof:
        raise StructuralError("datum and observable have different dof")
    poly = a.substitute_hbar(hbar)
    dim = 2 * a.dof
    total = ZERO
    stack = [((0,) * dim, poly, 0)]
    # each multi-index is reached once: only differentiate at positions >= the last one used
    while stack:
        gamma, d, start = stack.pop()
        for j in range(start, dim):
            dj = d.derivative(j)
            if dj.is_zero():
                continue
            g = gamma[:j] + (gamma[j] + 1,) + gamma[j + 1:]
            value = dj.evaluate(datum.centers, 0)
            if value:
                weight = ONE
                for gi, delta in zip(g, datum.margins):
                    if gi:
                        weight *= delta**gi / factorial(gi)
                total += _modulus_upper(value) * weight
            stack.append((g, dj, j))
    return total
