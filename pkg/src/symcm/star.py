"""Star product and Moyal bracket on polynomial symbols.

With J = sum_i (<d/dq_i d/dp_i> - <d/dp_i d/dq_i>) acting left/right,

    A * B   = sum_n (i hbar / 2)^n / n!  A J^n B
    [A,B]_M = 2i sum_k (-1)^k / (2k+1)! (hbar/2)^(2k+1)  A J^(2k+1) B

Both series stop at n = min(deg A, deg B).  J is a sum of commuting
single-mode pieces, so exp(tJ) on a pair of monomials factorizes over
modes; the per-mode weights are cached.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

from gmpy2 import mpq

from ._poly import bilinear, i_power_sign
from .phase import PhasePolynomial
from .scalars import ONE


def _falling(n: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= n - j
    return out


@lru_cache(maxsize=None)
def _janus_mode(a: int, b: int, c: int, d: int) -> tuple:
    """Weights w_s of t^s in  q^a p^b exp(t J) q^c p^d  for a single mode.

    The s-th term multiplies the monomial q^(a+c-s) p^(b+d-s).
    """
    out = []
    for s in range(min(a + b, c + d) + 1):
        # (alpha of <dq dp>, beta of -<dp dq>) with weight 1/(alpha! beta!)
        w = 0
        for alpha in range(max(0, s - min(b, c)), min(a, d, s) + 1):
            beta = s - alpha
            term = comb(a, alpha) * _falling(d, alpha) * comb(b, beta) * _falling(c, beta)
            w += -term if beta & 1 else term
        if w:
            out.append((s, mpq(w)))
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def janus_kernel(ea: tuple, eb: tuple) -> tuple:
    """``(exps, s, w)`` with  A exp(tJ) B = sum w t^s exps  for monomials ea, eb."""
    n = len(ea) // 2
    partial = [((), (), 0, ONE)]
    for i in range(n):
        a, b, c, d = ea[i], ea[n + i], eb[i], eb[n + i]
        weights = _janus_mode(a, b, c, d)
        partial = [
            (qs + (a + c - s,), ps + (b + d - s,), tot + s, w * ws)
            for qs, ps, tot, w in partial
            for s, ws in weights
        ]
    return tuple((qs + ps, s, w) for qs, ps, s, w in partial)


@lru_cache(maxsize=1 << 16)
def _star_kernel(ea: tuple, eb: tuple) -> tuple:
    out = []
    for exps, s, w in janus_kernel(ea, eb):
        sign, rot = i_power_sign(s)
        out.append((exps, s, sign * w / (1 << s), rot))
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def _moyal_kernel(ea: tuple, eb: tuple) -> tuple:
    # 2 (i/2)^s for odd s: the even orders cancel between A*B and B*A.
    out = []
    for exps, s, w in janus_kernel(ea, eb):
        if s & 1:
            sign, rot = i_power_sign(s)
            out.append((exps, s, sign * 2 * w / (1 << s), rot))
    return tuple(out)


def _check(a: PhasePolynomial, b: PhasePolynomial) -> None:
    if not (isinstance(a, PhasePolynomial) and isinstance(b, PhasePolynomial)):
        raise TypeError("star-core operations take PhasePolynomial arguments")
    a._check(b)


def janus_power(a: PhasePolynomial, b: PhasePolynomial, n: int) -> PhasePolynomial:
    """A J^n B (hbar in the coefficients is carried along as a scalar)."""
    _check(a, b)
    if n < 0:
        raise ValueError("n must be nonnegative")
    scale = factorial(n)

    def kernel(ea, eb):
        return [(exps, 0, w * scale, 0) for exps, s, w in janus_kernel(ea, eb) if s == n]

    return PhasePolynomial._raw(a.dof, bilinear(a._terms, b._terms, kernel))


def star(a: PhasePolynomial, b: PhasePolynomial) -> PhasePolynomial:
    _check(a, b)
    return PhasePolynomial._raw(a.dof, bilinear(a._terms, b._terms, _star_kernel))


def moyal_bracket(a: PhasePolynomial, b: PhasePolynomial) -> PhasePolynomial:
    _check(a, b)
    return PhasePolynomial._raw(a.dof, bilinear(a._terms, b._terms, _moyal_kernel))


def star_power(a: PhasePolynomial, n: int) -> PhasePolynomial:
    result = PhasePolynomial.one(a.dof)
    for _ in range(n):
        result = star(result, a)
    return result
