"""Truncated power series in t with polynomial coefficients."""

from __future__ import annotations

from dataclasses import dataclass, field

from .scalars import to_rational


@dataclass(frozen=True)
class EvolutionSeries:
    """A(t) ~ sum_{n <= K} t^n A_n.  Coefficients are Phase- or OperatorPolynomials."""

    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if not self.coefficients:
            raise ValueError("a series needs at least the t^0 coefficient")

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @property
    def dof(self) -> int:
        return self.coefficients[0].dof

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, n):
        return self.coefficients[n]

    def __iter__(self):
        return iter(self.coefficients)

    def at(self, t):
        """The truncated sum at a rational time t."""
        t = to_rational(t)
        total = type(self.coefficients[0]).zero(self.dof)
        for n, c in enumerate(self.coefficients):
            total = total + c.scale(t**n)
        return total


@dataclass(frozen=True)
class UnitarySeries:
    """Star-unitary U(t) and its star-inverse, both truncated at order K."""

    coefficients: tuple
    inverse: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        object.__setattr__(self, "inverse", tuple(self.inverse))
        if self.inverse and len(self.inverse) != len(self.coefficients):
            raise ValueError("inverse series must have the same truncation as U")

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @property
    def dof(self) -> int:
        return self.coefficients[0].dof
