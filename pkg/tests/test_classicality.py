import itertools
import math
import random

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

import oracles
from gen import gaussian_params, random_phase, rational
from symcm import (
    ClassicalDatum,
    GaussianRational,
    GaussianState,
    InternalConsistencyError,
    OperatorPolynomial,
    P,
    PhasePolynomial,
    PreconditionError,
    Q,
    StructuralError,
    classicality_check,
    consistency_check,
    error_ket_norm,
    evaluate,
    expectation,
    gaussian_moment,
    interval_probability,
    mixed_error_ket_norm,
    p,
    propagate_error,
    q,
)
from symcm.classicality import consistency_interval

I = GaussianRational(0, 1)
q0, p0, Q0, P0 = q(0), p(0), Q(0), P(0)
HALF = mpq(1, 2)
COHERENT = GaussianState.coherent(1, 1)


def state(sqq=HALF, spp=HALF, sqp=0, mean=(0, 0), hbar=1):
    return GaussianState((mean,), ((sqq, spp, sqp),), hbar)


def test_state_validation():
    with pytest.raises(PreconditionError):
        state(sqq=0)
    with pytest.raises(PreconditionError):
        state(sqq=1, spp=1, sqp=1)
    with pytest.raises(PreconditionError):
        state(sqq=HALF, spp=mpq(1, 4))  # det 1/8 < hbar^2/4
    with pytest.raises(PreconditionError):
        state(hbar=0)
    with pytest.raises(TypeError):
        state(sqq=0.5)
    assert COHERENT.covariances == ((HALF, HALF, 0),)


def test_datum_validation():
    with pytest.raises(PreconditionError):
        ClassicalDatum((0, 0), (1, 0))
    with pytest.raises(PreconditionError):
        ClassicalDatum((0,), (1,))


def test_gaussian_moment_examples():
    s = state(mean=(3, -2))
    assert gaussian_moment(s, q0) == 3
    assert gaussian_moment(s, (q0 - 3) ** 2) == HALF
    assert gaussian_moment(s, (q0 - 3) ** 4) == mpq(3, 4)


def test_gaussian_moment_substitutes_hbar():
    s = state(sqq=1, spp=1, hbar=2)
    assert gaussian_moment(s, PhasePolynomial.hbar(1) * q0**2) == 2
    with pytest.raises(StructuralError):
        gaussian_moment(s, q(0, 2))


def test_expectation_examples():
    assert expectation(state(mean=(5, 1)), Q0) == 5
    assert expectation(COHERENT, Q0 * P0) == I / 2
    assert expectation(COHERENT, OperatorPolynomial.one(1)) == 1


def test_ground_state_ladder_route():
    # a = (Q + iP)/sqrt 2 with hbar = 1 annihilates the ground state, so
    # <Q P> = <(a + a+)(a - a+)>/(2i) = -<a a+>/(2i) = i/2
    assert expectation(COHERENT, Q0 * P0) == I / 2
    assert expectation(COHERENT, P0 * Q0) == -I / 2


def test_error_ket_examples():
    assert error_ket_norm(COHERENT, Q0, 0, 1) == HALF
    assert error_ket_norm(COHERENT, Q0, 0, 2) == mpq(3, 4)
    assert error_ket_norm(COHERENT, Q0, 1, 1) == mpq(3, 2)
    with pytest.raises(PreconditionError):
        error_ket_norm(COHERENT, Q0 * P0, 0, 1)
    with pytest.raises(PreconditionError):
        error_ket_norm(COHERENT, Q0, 0, 0)


def test_error_ket_closed_form():
    for sqq in (HALF, mpq(2, 3), 3):
        s = state(sqq=sqq, spp=1, sqp=0)
        for m in range(1, 6):
            assert error_ket_norm(s, Q0, 0, m) == oracles.double_factorial(2 * m - 1) * sqq**m


def test_mixed_error_ket_examples():
    d = ClassicalDatum((0, 0), (1, 1))
    assert mixed_error_ket_norm(COHERENT, (0,), d) == HALF
    assert mixed_error_ket_norm(COHERENT, (0, 1), d) == mpq(3, 4)
    assert mixed_error_ket_norm(COHERENT, (), d) == 1
    with pytest.raises(StructuralError):
        mixed_error_ket_norm(COHERENT, (2,), d)


def test_negative_norm_is_flagged(monkeypatch):
    from symcm import classicality

    monkeypatch.setattr(classicality, "expectation", lambda s, x: GaussianRational(-1))
    with pytest.raises(InternalConsistencyError):
        error_ket_norm(COHERENT, Q0, 0, 1)


def test_classicality_examples():
    report = classicality_check(COHERENT, ClassicalDatum((0, 0), (2, 2)), [q0, p0], 1)
    assert [r.sequence for r in report.results] == [(0,), (1,)]
    assert all(r.norm == HALF and r.bound == 4 for r in report.results)
    assert report.verdict

    report = classicality_check(COHERENT, ClassicalDatum((0, 0), (HALF, 2)), [q0, p0], 1)
    assert [r.passed for r in report.results] == [False, True]
    assert not report.verdict

    report = classicality_check(COHERENT, ClassicalDatum((0, 0), (2, 2)), [q0], 1)
    assert [r.sequence for r in report.results] == [(0,)]


def test_classicality_arrays():
    # A = q0*p0 has sequences (q), (p), (q,p), (p,q); arrays of two concatenate
    report = classicality_check(COHERENT, ClassicalDatum((0, 0), (2, 3)), [q0 * p0], 2)
    seqs = {r.sequence: r for r in report.results}
    assert {(0,), (1,), (0, 1), (1, 0)} <= set(seqs)
    assert seqs[(0, 1)].order == 1
    assert (0, 1, 0, 1) in seqs and seqs[(0, 1, 0, 1)].order == 2
    assert seqs[(0, 1)].bound == 4 * 9
    assert report.verdict == all(r.passed for r in report.results)
    with pytest.raises(PreconditionError):
        classicality_check(COHERENT, ClassicalDatum((0, 0), (2, 3)), [q0], 0)


def test_report_json_is_exact():
    obj = classicality_check(COHERENT, ClassicalDatum((0, 0), (HALF, 2)), [q0], 1).to_json_obj()
    assert obj["sequences"][0] == {"order": 1, "sequence": ["q0"], "norm": "1/2", "bound": "1/4", "passed": False}
    assert obj["verdict"] is False


def test_interval_probability_examples():
    assert abs(interval_probability(COHERENT, 0, -1000, 1000) - 1) < 1e-10
    sd = math.sqrt(0.5)
    assert abs(interval_probability(COHERENT, 0, -sd, sd) - 0.6826894921) < 1e-8
    assert interval_probability(COHERENT, 1, 2, 2) == 0
    with pytest.raises(PreconditionError):
        interval_probability(COHERENT, 0, 1, 0)
    with pytest.raises(StructuralError):
        interval_probability(COHERENT, 2, 0, 1)


def test_one_sigma_against_quadrature():
    want = oracles.normal_mass_quadrature(0, 1, -1, 1)
    s = state(sqq=1, spp=1)
    assert abs(interval_probability(s, 0, -1, 1) - float(want)) < 1e-12


def test_interval_probability_matches_quadrature_in_tails():
    s = state(sqq=2, spp=1, mean=(1, 0))
    for lo, hi in [(4, 9), (-9, -3), (0.5, 1.5), (-20, 20)]:
        want = oracles.normal_mass_quadrature(1, math.sqrt(2), lo, hi)
        got = interval_probability(s, 0, lo, hi)
        assert abs(got - float(want)) <= 1e-10 * max(float(want), 1e-300)


def test_interval_probability_monotone():
    s = state(sqq=mpq(3, 2), spp=1, mean=(1, 0))
    widths = [0.01 * 1.5**k for k in range(30)]
    probs = [interval_probability(s, 0, 1 - w, 1 + w) for w in widths]
    assert all(a <= b for a, b in zip(probs, probs[1:]))


def test_consistency_examples():
    grid = [0, 0.5, 0.9, 0.99]
    margin = 3 * mpq(7071, 10000)
    assert consistency_check(COHERENT, ClassicalDatum((0, 0), (margin, margin)), 1, grid) == [True, True]
    lo, hi = consistency_interval(0, 1, 0, 1)
    assert (lo, hi) == (-1, 1)
    tiny = mpq(1, 1000)
    assert consistency_check(COHERENT, ClassicalDatum((0, 0), (tiny, tiny)), 1, [0.99]) == [False, False]
    with pytest.raises(PreconditionError):
        consistency_check(COHERENT, ClassicalDatum((0, 0), (1, 1)), 1, [1.0])


def test_propagate_error_examples():
    d = ClassicalDatum((3, 0), (mpq(1, 10), 1))
    assert propagate_error(q0, d, 1) == mpq(1, 10)
    assert propagate_error(q0**2, d, 1) == mpq(61, 100)
    assert propagate_error(PhasePolynomial.constant(5, 1), d, 1) == 0


def test_propagate_error_complex_modulus():
    d = ClassicalDatum((1, 0), (1, 1))
    # d/dq of (3+4i) q = 3+4i, modulus 5
    assert propagate_error(q0 * GaussianRational(3, 4), d, 1) == 5
    bound = propagate_error(q0 * GaussianRational(1, 1), d, 1)
    assert bound >= mpq(14142135623730950488, 10**19)
    assert bound - mpq(14142135623730950488, 10**19) < mpq(1, 10**18)


def test_propagate_error_bounds_perturbations():
    rng = random.Random(21)
    for _ in range(40):
        dof = rng.choice((1, 2))
        a = random_phase(rng, dof, 4, (0, 1))
        centers = [rational(rng) for _ in range(2 * dof)]
        margins = [mpq(rng.randint(1, 5), rng.randint(1, 10)) for _ in range(2 * dof)]
        d = ClassicalDatum(tuple(centers), tuple(margins))
        h = mpq(rng.randint(1, 3), 2)
        bound = propagate_error(a, d, h)
        base = evaluate(a, centers, h)
        corners = itertools.product(*[(-m, 0, m) for m in margins])
        samples = list(corners) + [
            [mpq(rng.randint(-100, 100), 100) * m for m in margins] for _ in range(20)
        ]
        for eps in samples:
            diff = evaluate(a, [c + e for c, e in zip(centers, eps)], h) - base
            assert diff.norm_squared() <= bound * bound


admissible = gaussian_params(dof=1)


@given(admissible, st.integers(1, 3), st.integers(0, 1))
def test_error_ket_norms_nonnegative(params, m, var):
    means, covs, hbar = params
    s = GaussianState(means, covs, hbar)
    x = OperatorPolynomial.variable(var, 1)
    assert error_ket_norm(s, x, means[0][var], m) >= 0
    d = ClassicalDatum(tuple(mn for mn in means[0]), (1, 1))
    for seq in [(0, 1), (1, 0), (0, 1, 1), (1, 0, 1, 0)]:
        assert mixed_error_ket_norm(s, seq, d) >= 0


@given(gaussian_params(dof=1, saturate=True))
def test_saturating_states_are_admissible(params):
    means, covs, hbar = params
    s = GaussianState(means, covs, hbar)
    d = ClassicalDatum(means[0], (1, 1))
    assert mixed_error_ket_norm(s, (0, 1), d) >= 0
    assert mixed_error_ket_norm(s, (1, 0), d) >= 0


@given(admissible, st.integers(1, 3), st.integers(0, 1), st.builds(mpq, st.integers(1, 30), st.integers(1, 10)))
def test_bound_theorem(params, m, var, delta):
    means, covs, hbar = params
    s = GaussianState(means, covs, hbar)
    x = OperatorPolynomial.variable(var, 1)
    center = means[0][var] + mpq(1, 3)
    norm = error_ket_norm(s, x, center, m)
    if norm > delta ** (2 * m):
        return
    for j in range(20):
        pp = j / 20
        lo, hi = consistency_interval(center, delta, pp, m)
        assert interval_probability(s, var, lo, hi) >= pp - 1e-8


def test_moments_against_quadrature():
    rng = random.Random(17)
    for _ in range(10):
        dof = rng.choice((1, 2))
        means = tuple((rational(rng), rational(rng)) for _ in range(dof))
        covs = []
        for _ in range(dof):
            sqq = mpq(rng.randint(1, 6), rng.randint(1, 3))
            sqp = mpq(rng.randint(-3, 3), 4)
            covs.append((sqq, (mpq(1, 4) + sqp * sqp + mpq(rng.randint(0, 4), 4)) / sqq, sqp))
        s = GaussianState(means, tuple(covs), 1)
        a = random_phase(rng, dof, 6, (0, 1))
        exact = gaussian_moment(s, a)
        approx = oracles.gaussian_average_quadrature(a, means, covs, mpq(1), points=8 if dof == 2 else 10)
        with mpmath.workdps(40):
            err = abs(mpmath.mpc(mpmath.mpf(int(exact.re.numerator)) / int(exact.re.denominator),
                                 mpmath.mpf(int(exact.im.numerator)) / int(exact.im.denominator)) - approx)
            if exact:
                assert err <= 1e-10 * abs(approx)
            else:
                assert err <= mpmath.mpf(10) ** -30
