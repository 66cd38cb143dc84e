"""
linalg/constraints.py

Exact linear constraints over named variables.

Responsibilities:
- LinearConstraint: canonical coefficients, relation, right-hand side
- ConstraintSystem: ordered collection with variable bookkeeping
- Exact evaluation and partial substitution

This module MUST:
- Keep everything rational; evaluation at a point is exact comparison
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional

from linalg.rational import as_fraction


class Relation(Enum):
    EQ = "="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

    @property
    def is_strict(self) -> bool:
        return self in (Relation.LT, Relation.GT)

    def flipped(self) -> "Relation":
        return _FLIP[self]

    def holds(self, lhs, rhs) -> bool:
        if self is Relation.EQ:
            return lhs == rhs
        if self is Relation.LT:
            return lhs < rhs
        if self is Relation.LE:
            return lhs <= rhs
        if self is Relation.GT:
            return lhs > rhs
        return lhs >= rhs


_FLIP = {
    Relation.EQ: Relation.EQ,
    Relation.LT: Relation.GT,
    Relation.LE: Relation.GE,
    Relation.GT: Relation.LT,
    Relation.GE: Relation.LE,
}


def format_rational(value: Fraction) -> str:
    """Terminating decimals print as decimals, everything else as p/q."""
    value = as_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = max(twos, fives)
    scaled = abs(value) * 10 ** digits
    text = str(scaled.numerator).rjust(digits + 1, "0")
    body = f"{text[:-digits]}.{text[-digits:]}".rstrip("0").rstrip(".")
    return f"-{body}" if value < 0 else body


def format_linear(coefficients: Iterable[tuple[str, Fraction]]) -> str:
    parts = []
    for var, coef in coefficients:
        if coef == 1:
            term = var
        elif coef == -1:
            term = f"-{var}"
        else:
            term = f"{format_rational(coef)}*{var}"
        if parts and not term.startswith("-"):
            parts.append(f"+ {term}")
        elif parts:
            parts.append(f"- {term[1:]}")
        else:
            parts.append(term)
    return " ".join(parts) if parts else "0"


@dataclass(frozen=True)
class LinearConstraint:
    coefficients: tuple[tuple[str, Fraction], ...]
    relation: Relation
    rhs: Fraction = Fraction(0)
    label: str = field(default="", compare=False)

    @classmethod
    def build(
        cls,
        coefficients: Mapping[str, object],
        relation: Relation | str,
        rhs=0,
        label: str = "",
    ) -> "LinearConstraint":
        relation = relation if isinstance(relation, Relation) else Relation(relation)
        merged: dict[str, Fraction] = {}
        for var, value in coefficients.items():
            merged[var] = merged.get(var, Fraction(0)) + as_fraction(value)
        terms = tuple(sorted((v, c) for v, c in merged.items() if c != 0))
        return cls(terms, relation, as_fraction(rhs), label)

    @classmethod
    def compare(
        cls,
        left: Mapping[str, object],
        relation: Relation | str,
        right: Mapping[str, object],
        label: str = "",
    ) -> "LinearConstraint":
        """left REL right, both linear forms without constants."""
        merged: dict[str, Fraction] = {}
        for var, value in left.items():
            merged[var] = merged.get(var, Fraction(0)) + as_fraction(value)
        for var, value in right.items():
            merged[var] = merged.get(var, Fraction(0)) - as_fraction(value)
        return cls.build(merged, relation, 0, label)

    @property
    def is_strict(self) -> bool:
        return self.relation.is_strict

    @property
    def is_trivial(self) -> bool:
        return not self.coefficients

    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coefficients)

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        return sum(
            (c * as_fraction(point.get(v, 0)) for v, c in self.coefficients), Fraction(0)
        )

    def holds_at(self, point: Mapping[str, Fraction]) -> bool:
        return self.relation.holds(self.evaluate(point), self.rhs)

    def substitute(self, values: Mapping[str, Fraction]) -> "LinearConstraint":
        rhs = self.rhs
        kept = {}
        for var, coef in self.coefficients:
            if var in values:
                rhs -= coef * as_fraction(values[var])
            else:
                kept[var] = coef
        return LinearConstraint.build(kept, self.relation, rhs, self.label)

    def format(self) -> str:
        return f"{format_linear(self.coefficients)} {self.relation.value} {format_rational(self.rhs)}"

    def __str__(self) -> str:
        return self.format()


class ConstraintSystem:
    """Ordered, append-only list of constraints with first-seen variable order."""

    def __init__(self, constraints: Iterable[LinearConstraint] = (), variables: Iterable[str] = ()):
        self._constraints: list[LinearConstraint] = []
        self._variables: list[str] = []
        self._seen: set[str] = set()
        for v in variables:
            self._register(v)
        self.extend(constraints)

    def _register(self, var: str) -> None:
        if var not in self._seen:
            self._seen.add(var)
            self._variables.append(var)

    def add(self, constraint: LinearConstraint) -> None:
        self._constraints.append(constraint)
        for v in constraint.variables():
            self._register(v)

    def extend(self, constraints: Iterable[LinearConstraint]) -> None:
        for c in constraints:
            self.add(c)

    def copy(self) -> "ConstraintSystem":
        return ConstraintSystem(self._constraints, self._variables)

    @property
    def variables(self) -> list[str]:
        return list(self._variables)

    @property
    def constraints(self) -> list[LinearConstraint]:
        return list(self._constraints)

    def holds_at(self, point: Mapping[str, Fraction]) -> bool:
        return all(c.holds_at(point) for c in self._constraints)

    def violated_at(self, point: Mapping[str, Fraction]) -> list[LinearConstraint]:
        return [c for c in self._constraints if not c.holds_at(point)]

    def __iter__(self) -> Iterator[LinearConstraint]:
        return iter(self._constraints)

    def __len__(self) -> int:
        return len(self._constraints)

    def format(self, labels: Optional[bool] = False) -> list[str]:
        out = []
        for c in self._constraints:
            line = c.format()
            if labels and c.label:
                line = f"{line}    [{c.label}]"
            out.append(line)
        return out
