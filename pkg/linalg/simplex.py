"""
linalg/simplex.py

Exact linear programming and the strict/non-strict feasibility decision.

Responsibilities:
- maximize: max c.x over A x <= b, x >= 0, solved by sympy's rational
  two-phase simplex (Bland's rule)
- solve_feasibility: equalities eliminated exactly, strict rows slackened
  by a gap variable t <= 1 that is maximized; strictly feasible iff t* > 0

This module MUST:
- Return samples that satisfy every input constraint exactly
- Never use floating point
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from sympy import Rational
from sympy.solvers.simplex import InfeasibleLPError, UnboundedLPError, linprog

from errors import MsaError
from linalg.constraints import LinearConstraint, Relation
from linalg.rational import rref

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

# ============================================================
# LINEAR PROGRAM
# ============================================================

def _to_sympy(value) -> Rational:
    value = Fraction(value)
    return Rational(value.numerator, value.denominator)


def _to_fraction(value) -> Fraction:
    value = Rational(value)
    return Fraction(int(value.p), int(value.q))


def maximize(
    A: Sequence[Sequence[Fraction]], b: Sequence[Fraction], c: Sequence[Fraction]
) -> tuple[str, Optional[Fraction], Optional[list[Fraction]]]:
    """
    max c.x  s.t.  A x <= b,  x >= 0.

    Returns (status, optimum, x) with status in
    {"optimal", "infeasible", "unbounded"}.
    """
    n = len(c)
    if not A:
        if any(Fraction(v) > 0 for v in c):
            return "unbounded", None, None
        return "optimal", ZERO, [ZERO] * n

    cost = [-_to_sympy(v) for v in c]
    rows = [[_to_sympy(v) for v in row] for row in A]
    rhs = [_to_sympy(v) for v in b]
    try:
        low, x = linprog(cost, rows, rhs)
    except InfeasibleLPError:
        return "infeasible", None, None
    except UnboundedLPError:
        return "unbounded", None, None
    return "optimal", -_to_fraction(low), [_to_fraction(v) for v in x]


# ============================================================
# FEASIBILITY
# ============================================================

@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    sample: Optional[dict[str, Fraction]] = None
    gap: Optional[Fraction] = None

    @property
    def status(self) -> str:
        return "feasible" if self.feasible else "infeasible"


INFEASIBLE = FeasibilityResult(False)


def _equality_parametrization(eqs, variables):
    """
    Solve the equality rows exactly.

    Returns (particular, directions) with every solution equal to
    particular + sum z_k * directions[k], or None if inconsistent.
    """
    nvars = len(variables)
    if not eqs:
        particular = [ZERO] * nvars
        directions = [[ONE if i == k else ZERO for i in range(nvars)] for k in range(nvars)]
        return particular, directions

    index = {v: i for i, v in enumerate(variables)}
    rows = []
    for con in eqs:
        row = [ZERO] * (nvars + 1)
        for var, coef in con.coefficients:
            row[index[var]] = coef
        row[nvars] = con.rhs
        rows.append(row)
    reduced, pivots = rref(rows, nvars + 1)
    if nvars in pivots:
        return None

    particular = [ZERO] * nvars
    for r_i, p in enumerate(pivots):
        particular[p] = reduced[r_i][nvars]
    pivot_set = set(pivots)
    directions = []
    for free in range(nvars):
        if free in pivot_set:
            continue
        vec = [ZERO] * nvars
        vec[free] = ONE
        for r_i, p in enumerate(pivots):
            vec[p] = -reduced[r_i][free]
        directions.append(vec)
    return particular, directions


def solve_feasibility(
    constraints: Iterable[LinearConstraint], variables: Optional[Sequence[str]] = None
) -> FeasibilityResult:
    """
    Exact decision for a mixed system of =, <, <=, >, >= rows.

    A feasible result carries a rational sample meeting every row exactly
    (strict rows strictly).
    """
    constraints = list(constraints)
    if variables is None:
        seen: dict[str, None] = {}
        for con in constraints:
            for v in con.variables():
                seen.setdefault(v, None)
        variables = list(seen)
    else:
        variables = list(variables)
        known = set(variables)
        for con in constraints:
            for v in con.variables():
                if v not in known:
                    known.add(v)
                    variables.append(v)

    for con in constraints:
        if con.is_trivial and not con.relation.holds(ZERO, con.rhs):
            return INFEASIBLE

    eqs = [c for c in constraints if c.relation is Relation.EQ and not c.is_trivial]
    ineqs = [c for c in constraints if c.relation is not Relation.EQ and not c.is_trivial]

    param = _equality_parametrization(eqs, variables)
    if param is None:
        return INFEASIBLE
    particular, directions = param
    d = len(directions)
    index = {v: i for i, v in enumerate(variables)}

    # ------------------------------------------------------------
    # Reduce inequalities to the free parameters z
    # ------------------------------------------------------------
    reduced_rows = []  # (coeffs over z, relation, rhs)
    for con in ineqs:
        coeffs = [ZERO] * d
        shift = ZERO
        for var, coef in con.coefficients:
            i = index[var]
            shift += coef * particular[i]
            for k in range(d):
                if directions[k][i] != 0:
                    coeffs[k] += coef * directions[k][i]
        rhs = con.rhs - shift
        if all(v == 0 for v in coeffs):
            if not con.relation.holds(ZERO, rhs):
                return INFEASIBLE
            continue
        reduced_rows.append((coeffs, con.relation, rhs))

    if not reduced_rows:
        sample = {v: particular[i] for i, v in enumerate(variables)}
        return _checked(constraints, sample, None)

    # ------------------------------------------------------------
    # LP over z = z_plus - z_minus, and gap t for strict rows
    # ------------------------------------------------------------
    has_strict = any(rel.is_strict for _, rel, _ in reduced_rows)
    width = 2 * d + (1 if has_strict else 0)
    A, b = [], []
    for coeffs, rel, rhs in reduced_rows:
        sign = ONE if rel in (Relation.LE, Relation.LT) else -ONE
        row = [sign * v for v in coeffs] + [-sign * v for v in coeffs]
        if has_strict:
            row.append(ONE if rel.is_strict else ZERO)
        A.append(row)
        b.append(sign * rhs)
    objective = [ZERO] * width
    if has_strict:
        cap = [ZERO] * width
        cap[-1] = ONE
        A.append(cap)
        b.append(ONE)
        objective[-1] = ONE

    status, optimum, x = maximize(A, b, objective)
    if status != "optimal":
        return INFEASIBLE
    gap = x[-1] if has_strict else None
    if has_strict and gap <= 0:
        return INFEASIBLE

    z = [x[k] - x[d + k] for k in range(d)]
    sample = {}
    for i, v in enumerate(variables):
        value = particular[i]
        for k in range(d):
            if directions[k][i] != 0:
                value += directions[k][i] * z[k]
        sample[v] = value
    return _checked(constraints, sample, gap)


def _checked(constraints, sample, gap) -> FeasibilityResult:
    for con in constraints:
        if not con.holds_at(sample):
            logger.error(f"FEASIBILITY SAMPLE INVALID | constraint={con.format()}")
            raise MsaError(f"feasibility sample violates {con.format()}")
    return FeasibilityResult(True, sample, gap)


def is_feasible(constraints: Iterable[LinearConstraint], variables=None) -> bool:
    return solve_feasibility(constraints, variables).feasible


def point_from(sample: Mapping[str, Fraction], names: Sequence[str]) -> list[Fraction]:
    return [sample.get(n, ZERO) for n in names]


def fixed_by_equalities(
    constraints: Iterable[LinearConstraint], variables: Sequence[str]
) -> Optional[dict[str, Fraction]]:
    """
    Variables pinned to a single value by the equality rows alone, with
    that value. None when the equalities are inconsistent.
    """
    variables = list(variables)
    eqs = [c for c in constraints if c.relation is Relation.EQ and not c.is_trivial]
    known = set(variables)
    for con in eqs:
        for v in con.variables():
            if v not in known:
                known.add(v)
                variables.append(v)
    param = _equality_parametrization(eqs, variables)
    if param is None:
        return None
    particular, directions = param
    return {
        v: particular[i] for i, v in enumerate(variables)
        if all(d[i] == 0 for d in directions)
    }
