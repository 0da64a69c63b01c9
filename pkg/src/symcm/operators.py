"""The operator algebra generated by Q_i, P_i with [Q_i, P_j] = i hbar delta_ij.

Every stored word is standard ordered: all Q letters (modes ascending)
followed by all P letters (modes ascending).  Such a word is fixed by its
exponent vectors, so operator polynomials reuse the classical term layout;
what differs is the product.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

from gmpy2 import mpq

from ._poly import Monomial, TermPolynomial, add_into, bilinear, i_power_sign, strip_zeros
from .errors import InternalConsistencyError, StructuralError
from .scalars import Coefficient, GaussianRational, ONE, ZERO
from .series import EvolutionSeries


@lru_cache(maxsize=None)
def _reorder_mode(b: int, c: int) -> tuple:
    """P^b Q^c = sum_k k! C(b,k) C(c,k) (-i hbar)^k Q^(c-k) P^(b-k); returns (k, weight)."""
    return tuple((k, factorial(k) * comb(b, k) * comb(c, k)) for k in range(min(b, c) + 1))


@lru_cache(maxsize=1 << 16)
def _product_kernel(ea: tuple, eb: tuple) -> tuple:
    """(Q^a P^b)(Q^c P^d) in normal form, factorized over modes."""
    n = len(ea) // 2
    partial = [((), (), 0, 1)]
    for i in range(n):
        a, b, c, d = ea[i], ea[n + i], eb[i], eb[n + i]
        partial = [
            (qs + (a + c - k,), ps + (b + d - k,), tot + k, w * wk)
            for qs, ps, tot, w in partial
            for k, wk in _reorder_mode(b, c)
        ]
    out = []
    for qs, ps, s, w in partial:
        sign, rot = i_power_sign(s)
        if s & 1:
            sign = -sign
        out.append((qs + ps, s, mpq(sign * w), rot))
    return tuple(out)


class OperatorPolynomial(TermPolynomial):
    """A quantum observable in standard-ordered normal form; ``*`` is the operator product."""

    __slots__ = ()

    letters = ("Q", "P")

    def _product(self, other):
        return OperatorPolynomial._raw(self.dof, bilinear(self._terms, other._terms, _product_kernel))

    @classmethod
    def from_word(cls, letters, dof: int) -> "OperatorPolynomial":
        """Normal form of the ordered product of canonical variables ``letters``."""
        result = cls.one(dof)
        for index in letters:
            result = result * cls.variable(index, dof)
        return result

    def dagger(self) -> "OperatorPolynomial":
        n = self.dof
        zeros = (0,) * n
        out: dict = {}
        for (e, k), (r, i) in self._terms.items():
            # (Q^a P^b)^dagger = P^b Q^a
            for exps, s, w, rot in _product_kernel(zeros + e[n:], e[:n] + zeros):
                cr, ci = r * w, -i * w
                if rot:
                    cr, ci = -ci, cr
                add_into(out, (exps, k + s), cr, ci)
        return OperatorPolynomial._raw(n, strip_zeros(out))


def Q(i: int, dof: int = 1) -> OperatorPolynomial:
    return OperatorPolynomial.variable(i, dof)


def P(i: int, dof: int = 1) -> OperatorPolynomial:
    return OperatorPolynomial.variable(dof + i, dof)


def _same_dof(x, y) -> None:
    if x.dof != y.dof:
        raise StructuralError(f"dof mismatch: {x.dof} vs {y.dof}")


def op_mul(x: OperatorPolynomial, y: OperatorPolynomial) -> OperatorPolynomial:
    _same_dof(x, y)
    return x * y


def commutator(x: OperatorPolynomial, y: OperatorPolynomial) -> OperatorPolynomial:
    _same_dof(x, y)
    return x * y - y * x


def dagger(x: OperatorPolynomial) -> OperatorPolynomial:
    return x.dagger()


class SymmetrizedExpansion(TermPolynomial):
    """Coefficients of an operator in the basis of fully symmetrized products.

    A key ``exps`` stands for (Q^a P^b)_+, the average of all orderings of
    that multiset of letters.
    """

    __slots__ = ()

    def _product(self, other):
        raise TypeError("symmetrized expansions carry no product; dequantize first")


@lru_cache(maxsize=None)
def _wick(exps: tuple) -> tuple:
    """Expansion of the standard word ``exps`` in symmetrized products.

    Peels the leading letter x off the word and uses
        x (m)_+ = (x m)_+ + 1/2 sum_{l in m} [x, l] (m - l)_+,
    valid because every [x, l] is a c-number.
    """
    if not any(exps):
        return (((exps, 0), (ONE, ZERO)),)
    n = len(exps) // 2
    lead = next(i for i, e in enumerate(exps) if e)
    rest = exps[:lead] + (exps[lead] - 1,) + exps[lead + 1:]
    partner = lead + n if lead < n else lead - n
    # [Q, P] = i hbar, [P, Q] = -i hbar
    sign = 1 if lead < n else -1
    out: dict = {}
    for (m, s), (r, i) in _wick(rest):
        up = m[:lead] + (m[lead] + 1,) + m[lead + 1:]
        add_into(out, (up, s), r, i)
        count = m[partner]
        if count:
            down = m[:partner] + (count - 1,) + m[partner + 1:]
            f = mpq(sign * count, 2)
            # times i: (r + i*im) * i = -im + i*r
            add_into(out, (down, s + 1), -i * f, r * f)
    return tuple(strip_zeros(out).items())


def symmetrize(x: OperatorPolynomial) -> SymmetrizedExpansion:
    out: dict = {}
    for (e, k), (r, i) in x._terms.items():
        for (m, s), (wr, wi) in _wick(e):
            add_into(out, (m, k + s), r * wr - i * wi, r * wi + i * wr)
    return SymmetrizedExpansion._raw(x.dof, strip_zeros(out))


def _distinct_permutations(counts: list):
    """Distinct orderings of a multiset given as per-letter counts."""
    total = sum(counts)
    word: list = []

    def rec():
        if len(word) == total:
            yield tuple(word)
            return
        for letter, c in enumerate(counts):
            if c:
                counts[letter] -= 1
                word.append(letter)
                yield from rec()
                word.pop()
                counts[letter] += 1

    yield from rec()


@lru_cache(maxsize=None)
def _symmetrized_product_raw(exps: tuple) -> tuple:
    dof = len(exps) // 2
    perms = list(_distinct_permutations(list(exps)))
    total = OperatorPolynomial.zero(dof)
    for word in perms:
        total = total + OperatorPolynomial.from_word(word, dof)
    total = total.scale(mpq(1, len(perms)))
    return tuple(total._terms.items())


def symmetrized_product(monomial, dof: int | None = None) -> OperatorPolynomial:
    """(O_i1 ... O_ik)_+ by averaging over orderings, then normal ordering.

    Cost grows with the number of distinct orderings; meant for small words.
    """
    exps = monomial.exps if isinstance(monomial, Monomial) else tuple(monomial)
    dof = dof or len(exps) // 2
    if len(exps) != 2 * dof:
        raise StructuralError(f"monomial {exps} does not fit dof={dof}")
    return OperatorPolynomial._raw(dof, dict(_symmetrized_product_raw(exps)))


def reconstruct(expansion: SymmetrizedExpansion) -> OperatorPolynomial:
    """Expand every (...)_+ by permutation averaging and sum back up."""
    total = OperatorPolynomial.zero(expansion.dof)
    for (e, k), v in expansion._terms.items():
        total = total + symmetrized_product(e, expansion.dof).scale(Coefficient._from_raw({k: v}))
    return total


def op_heisenberg_series(h: OperatorPolynomial, a: OperatorPolynomial, order: int) -> EvolutionSeries:
    """A_n = (i/hbar)^n / n! [H, [H, ... [H, A]]] for n <= order.

    Computed as A_n = (i/hbar) [H, A_{n-1}] / n in the Laurent ring; for
    inputs free of negative hbar powers every A_n must be as well.
    """
    _same_dof(h, a)
    if order < 0:
        raise ValueError("order must be nonnegative")
    check = min(h.min_hbar_power() or 0, a.min_hbar_power() or 0) >= 0
    coeffs = [a]
    for n in range(1, order + 1):
        nxt = commutator(h, coeffs[-1]).shift_hbar(-1).scale(GaussianRational(0, mpq(1, n)))
        lowest = nxt.min_hbar_power()
        if check and lowest is not None and lowest < 0:
            raise InternalConsistencyError(f"hbar^{lowest} left in Heisenberg coefficient {n}")
        coeffs.append(nxt)
    return EvolutionSeries(coeffs)
