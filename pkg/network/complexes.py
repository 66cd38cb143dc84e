"""
network/complexes.py

Complexes as exact nonnegative rational combinations of species.

Responsibilities:
- Canonical, hashable representation (zero coefficients dropped)
- Arithmetic needed by reaction vectors and CF-RM (add, scale, difference)

This module MUST:
- Stay exact (Fraction only, no floats)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from errors import NetworkError


def format_coefficient(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True, order=True)
class Complex:
    terms: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def from_mapping(cls, coefficients: Mapping[str, object]) -> "Complex":
        merged: dict[str, Fraction] = {}
        for species, raw in coefficients.items():
            value = Fraction(raw)
            if value < 0:
                raise NetworkError(
                    f"negative stoichiometric coefficient {value} for {species}"
                )
            merged[species] = merged.get(species, Fraction(0)) + value
        return cls(tuple(sorted((s, v) for s, v in merged.items() if v != 0)))

    @classmethod
    def zero(cls) -> "Complex":
        return cls(())

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, species: str) -> Fraction:
        for s, v in self.terms:
            if s == species:
                return v
        return Fraction(0)

    def species(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.terms)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.terms)

    def scale(self, factor) -> "Complex":
        factor = Fraction(factor)
        return Complex.from_mapping({s: v * factor for s, v in self.terms})

    def __add__(self, other: "Complex") -> "Complex":
        merged = self.as_dict()
        for s, v in other.terms:
            merged[s] = merged.get(s, Fraction(0)) + v
        return Complex.from_mapping(merged)

    def difference(self, other: "Complex") -> dict[str, Fraction]:
        """Signed vector self - other, zero entries dropped."""
        out = self.as_dict()
        for s, v in other.terms:
            out[s] = out.get(s, Fraction(0)) - v
        return {s: v for s, v in out.items() if v != 0}

    def format(self, order: Iterable[str] | None = None) -> str:
        if self.is_zero:
            return "0"
        values = self.as_dict()
        names = [s for s in order if s in values] if order is not None else list(values)
        parts = []
        for s in names:
            v = values[s]
            if v == 1:
                parts.append(s)
            elif v.denominator == 1:
                parts.append(f"{v.numerator}{s}")
            else:
                parts.append(f"{format_coefficient(v)} {s}")
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.format()
