"""
engine/templates.py

Orderings of the M values forced by each basis vector of
Ker^perp L_O restricted to W (STEP 13).

Per basis vector b^j, with ND/D split by the sign of g_W:
- R+ / R- : ND representatives with b*g > 0 / < 0 (their M values are Q1 / Q2)
- exactly one of R+, R- empty      -> no ordering possible
- both empty                       -> one empty template iff sum_D b*h can vanish
- sum_D b*h > 0                    -> some Q2 element exceeds some Q1 element
- sum_D b*h < 0                    -> the converse
- sum_D b*h = 0                    -> Q1 and Q2 nonsegregated
When degenerate terms carry mixed signs all three cases are emitted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from engine.classes import FundamentalClassSet
from engine.patterns import SignPatternChoice
from linalg.constraints import Relation


@dataclass(frozen=True, order=True)
class OrderAtom:
    left: int
    relation: Relation
    right: int

    def normalized(self) -> "OrderAtom":
        if self.relation is Relation.GT:
            return OrderAtom(self.right, Relation.LT, self.left)
        if self.relation is Relation.EQ and self.left > self.right:
            return OrderAtom(self.right, Relation.EQ, self.left)
        return self

    def format(self) -> str:
        return f"M{self.left} {self.relation.value} M{self.right}"


Template = tuple[OrderAtom, ...]

# ============================================================
# -INF RESOLUTION
# ============================================================

def _resolve(atom: OrderAtom, finite) -> bool | None:
    """True/False when an -inf side decides the atom, None if both finite."""
    lf, rf = finite(atom.left), finite(atom.right)
    if lf and rf:
        return None
    if not lf and not rf:
        return True
    if atom.relation is Relation.EQ:
        return False
    # exactly one side is -inf
    left_is_smaller = not lf
    if atom.relation is Relation.LT:
        return left_is_smaller
    return not left_is_smaller


def resolve_template(template: Template, finite) -> Template | None:
    kept = []
    for atom in template:
        decided = _resolve(atom, finite)
        if decided is False:
            return None
        if decided is None:
            kept.append(atom.normalized())
    return tuple(sorted(set(kept)))


# ============================================================
# TEMPLATE GENERATION
# ============================================================

def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def degenerate_sum_signs(terms: Sequence[int]) -> set[int]:
    nonzero = {t for t in terms if t != 0}
    if not nonzero:
        return {0}
    if nonzero == {1}:
        return {1}
    if nonzero == {-1}:
        return {-1}
    return {1, -1, 0}


def _chain(indices: Sequence[int]) -> Template:
    return tuple(OrderAtom(a, Relation.EQ, b) for a, b in zip(indices, indices[1:]))


def _nonsegregated(q1: Sequence[int], q2: Sequence[int]) -> list[Template]:
    out: list[Template] = []
    for inner, outer in ((q1, q2), (q2, q1)):
        for a in inner:
            for b, c in itertools.permutations(outer, 2):
                out.append((OrderAtom(b, Relation.LT, a), OrderAtom(a, Relation.LT, c)))
    out.append(_chain(list(q1) + list(q2)))
    for a, b in itertools.permutations(q1, 2):
        for c, d in itertools.permutations(q2, 2):
            out.append((
                OrderAtom(c, Relation.EQ, a),
                OrderAtom(a, Relation.LT, b),
                OrderAtom(b, Relation.EQ, d),
            ))
    return out


def templates_for_vector(
    b: Sequence[Fraction], classes: FundamentalClassSet, pattern: SignPatternChoice
) -> list[Template]:
    positions = {c.index: classes.partition.orientation.position(c.representative)
                 for c in classes.classes}
    q1, q2, d_terms = [], [], []
    for c in classes.classes:
        coef = _sign(b[positions[c.index]])
        if coef == 0:
            continue
        g = pattern.g_sign(c.index)
        if g == 0:
            d_terms.append(coef * pattern.h_sign(c.index))
        elif coef * g > 0:
            q1.append(c.index)
        else:
            q2.append(c.index)

    signs = degenerate_sum_signs(d_terms)
    if not q1 and not q2:
        return [()] if 0 in signs else []
    if not q1 or not q2:
        return []

    raw: list[Template] = []
    if 1 in signs:
        raw.extend((OrderAtom(a, Relation.LT, c),) for a in q1 for c in q2)
    if -1 in signs:
        raw.extend((OrderAtom(c, Relation.LT, a),) for a in q1 for c in q2)
    if 0 in signs:
        raw.extend(_nonsegregated(q1, q2))

    resolved: list[Template] = []
    seen = set()
    for template in raw:
        t = resolve_template(template, pattern.m_finite)
        if t is None or t in seen:
            continue
        seen.add(t)
        resolved.append(t)
    return resolved


def m_constraints(
    basis: Sequence[Sequence[Fraction]], classes: FundamentalClassSet, pattern: SignPatternChoice
) -> list[list[Template]]:
    """Per basis vector, the disjunction of admissible orderings."""
    return [templates_for_vector(b, classes, pattern) for b in basis]


def template_stream(per_vector: list[list[Template]]) -> Iterator[tuple[Template, ...]]:
    if not per_vector:
        yield ()
        return
    yield from itertools.product(*per_vector)
