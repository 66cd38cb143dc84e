"""
linalg/sign_compat.py

Stoichiometric sign compatibility: find sigma in the column space of N
whose sign pattern equals that of a given vector.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from linalg.constraints import LinearConstraint, Relation
from linalg.rational import as_fraction, matvec, primitive
from linalg.simplex import solve_feasibility


def sign_pattern_rows(signs: Sequence[int], rows: Sequence[Sequence[Fraction]], prefix: str = "x"):
    """Constraints sign(rows[s] . x) == signs[s] over variables prefix[j]."""
    cons = []
    for s, row in enumerate(rows):
        coeffs = {f"{prefix}[{j}]": v for j, v in enumerate(row) if v != 0}
        sign = signs[s]
        rel = Relation.GT if sign > 0 else Relation.LT if sign < 0 else Relation.EQ
        cons.append(LinearConstraint.build(coeffs, rel, 0, label=f"sign[{s}]"))
    return cons


def sign_compatible_sigma(
    mu: Sequence, N: Sequence[Sequence[Fraction]]
) -> Optional[list[Fraction]]:
    """
    sigma = N x with sign(sigma_s) = sign(mu_s) for every species, scaled
    to a primitive integer vector; None when no such sigma exists.
    """
    mu = [as_fraction(v) for v in mu]
    if all(v == 0 for v in mu):
        return [Fraction(0)] * len(mu)
    ncols = len(N[0]) if N else 0
    signs = [(v > 0) - (v < 0) for v in mu]
    names = [f"x[{j}]" for j in range(ncols)]
    result = solve_feasibility(sign_pattern_rows(signs, N), names)
    if not result.feasible:
        return None
    x = [result.sample[n] for n in names]
    return primitive(matvec(N, x))


def is_sign_compatible(mu: Sequence, N: Sequence[Sequence[Fraction]]) -> bool:
    return sign_compatible_sigma(mu, N) is not None


def signs_match(mu: Sequence, sigma: Sequence) -> bool:
    return all(
        ((a > 0) - (a < 0)) == ((b > 0) - (b < 0))
        for a, b in zip((as_fraction(v) for v in mu), (as_fraction(v) for v in sigma))
    )
