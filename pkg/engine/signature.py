"""
engine/signature.py

Signatures: a nonzero mu (with its M values) that solves a branch's
constraint system and whose sign pattern some vector of S carries
(STEP 14).

Responsibilities:
- Depth-first walk over sign vectors tau of mu, pruned by the branch LP
  and by a cached S-compatibility LP on the partial tau
- Skip species the equalities pin to zero
- Scale the found mu so that max |T.mu| = 1
- Evaluate a user-supplied mu against a branch (equalities banded)

This module MUST:
- Return signatures that satisfy their constraint system exactly
  (the hinted path excepted, where equalities hold within the band)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from engine.assembly import NEG_INF, mu_name
from engine.patterns import SignPatternChoice
from kinetics.system import TMatrix
from linalg.constraints import ConstraintSystem, LinearConstraint, Relation, format_rational
from linalg.sign_compat import sign_compatible_sigma, sign_pattern_rows
from linalg.simplex import fixed_by_equalities, solve_feasibility

logger = logging.getLogger(__name__)

TAU_ORDER = (1, -1, 0)


@dataclass(frozen=True)
class Signature:
    species: tuple[str, ...]
    mu: tuple[Fraction, ...]
    M: dict = field(default_factory=dict)
    tau: tuple[int, ...] = ()
    sigma: Optional[tuple[Fraction, ...]] = None
    hinted: bool = False

    def mu_map(self) -> dict[str, Fraction]:
        return {mu_name(s): v for s, v in zip(self.species, self.mu)}

    def to_dict(self):
        return {
            "mu": {s: format_rational(v) for s, v in zip(self.species, self.mu)},
            "M": {
                str(i): (v if v == NEG_INF else format_rational(v))
                for i, v in sorted(self.M.items())
            },
            "sigma": None if self.sigma is None else [format_rational(v) for v in self.sigma],
            "hinted": self.hinted,
        }


def _sign(v: Fraction) -> int:
    return (v > 0) - (v < 0)


def _relation(sign: int) -> Relation:
    return Relation.GT if sign > 0 else Relation.LT if sign < 0 else Relation.EQ


def _m_values(sample, pattern: SignPatternChoice) -> dict:
    out = {}
    for i in range(1, len(pattern.g) + 1):
        if pattern.degenerate(i):
            continue
        out[i] = sample.get(f"M[{i}]", Fraction(0)) if pattern.m_finite(i) else NEG_INF
    return out


# ============================================================
# SCALING
# ============================================================

def scale_signature(mu: Sequence[Fraction], M: dict, T: TMatrix, species) -> tuple[list[Fraction], dict]:
    """Divide by max |T.y . mu| (or max |mu_s| when every T.mu vanishes)."""
    index = {s: i for i, s in enumerate(species)}
    values = []
    for col in T.columns:
        values.append(abs(sum((c * mu[index[s]] for s, c in zip(T.species, col)), Fraction(0))))
    factor = max(values, default=Fraction(0))
    if factor == 0:
        factor = max((abs(v) for v in mu), default=Fraction(0))
    if factor == 0:
        return list(mu), dict(M)
    scaled_M = {i: (v if v == NEG_INF else v / factor) for i, v in M.items()}
    return [v / factor for v in mu], scaled_M


# ============================================================
# SEARCH
# ============================================================

class SignCompatCache:
    """S-compatibility of partial sign vectors, keyed by the assigned part."""

    def __init__(self, N):
        self.N = N
        self.ncols = len(N[0]) if N else 0
        self._cache: dict[tuple, bool] = {}

    def admits(self, partial: dict[int, int]) -> bool:
        key = tuple(sorted(partial.items()))
        if key in self._cache:
            return self._cache[key]
        rows = [self.N[s] for s, _ in key]
        signs = [t for _, t in key]
        names = [f"x[{j}]" for j in range(self.ncols)]
        ok = solve_feasibility(sign_pattern_rows(signs, rows), names).feasible
        self._cache[key] = ok
        return ok


def iter_signatures(
    system: ConstraintSystem,
    species: Sequence[str],
    N,
    T: TMatrix,
    pattern: SignPatternChoice,
    *,
    compat: Optional[SignCompatCache] = None,
) -> Iterator[Signature]:
    """
    Nonzero mu solving `system` whose signs some vector of S shares, one
    per admissible tau, in tau order. Nothing is yielded when the branch
    only admits mu = 0 or incompatible signs.
    """
    species = list(species)
    names = [mu_name(s) for s in species]
    base = list(system)
    variables = system.variables

    fixed = fixed_by_equalities(base, variables)
    if fixed is None:
        return
    pinned = {i for i, n in enumerate(names) if fixed.get(n) == 0}
    if len(pinned) == len(species):
        logger.debug("SIGNATURE PRUNED | equalities force mu = 0")
        return

    compat = compat or SignCompatCache(N)
    order = list(reversed(range(len(species))))

    def descend(pos: int, partial: dict[int, int], rows: list[LinearConstraint]):
        if pos == len(order):
            if any(partial.values()):
                result = solve_feasibility(base + rows, variables)
                if result.feasible:
                    yield result
            return
        s = order[pos]
        choices = (0,) if s in pinned else TAU_ORDER
        for t in choices:
            trial = dict(partial)
            trial[s] = t
            if not compat.admits(trial):
                continue
            con = LinearConstraint.build({names[s]: 1}, _relation(t), 0, label=f"tau:{species[s]}")
            extended = rows + [con]
            if not solve_feasibility(base + extended, variables).feasible:
                continue
            yield from descend(pos + 1, trial, extended)

    for result in descend(0, {}, []):
        yield _signature_at(result.sample, system, species, N, T, pattern)


def _signature_at(sample, system: ConstraintSystem, species, N, T: TMatrix, pattern) -> Signature:
    names = [mu_name(s) for s in species]
    mu = [sample.get(n, Fraction(0)) for n in names]
    M = _m_values(sample, pattern)
    scaled_mu, scaled_M = scale_signature(mu, M, T, species)
    point = dict(zip(names, scaled_mu))
    point.update({f"M[{i}]": v for i, v in scaled_M.items() if v != NEG_INF})
    if system.holds_at(point):
        mu, M = scaled_mu, scaled_M
    sigma = sign_compatible_sigma(mu, N)
    tau = tuple(_sign(v) for v in mu)
    logger.debug(f"SIGNATURE FOUND | tau={tau}")
    return Signature(tuple(species), tuple(mu), M, tau, None if sigma is None else tuple(sigma))


# ============================================================
# HINTED MU
# ============================================================

def signature_from_hint(
    system: ConstraintSystem,
    species: Sequence[str],
    hint: Sequence[Fraction],
    pattern: SignPatternChoice,
    *,
    band: float = 1e-6,
) -> Optional[Signature]:
    """
    Evaluate the branch at a fixed mu. Equalities are relaxed to
    |lhs - rhs| <= band * max(1, largest term); only the M values are
    left to the solver.
    """
    species = list(species)
    point = {mu_name(s): v for s, v in zip(species, hint)}
    tol = Fraction(repr(band))
    rows = []
    for con in system:
        scale = max([Fraction(1)] + [abs(c * point[v]) for v, c in con.coefficients if v in point])
        width = tol * scale
        reduced = con.substitute(point)
        if reduced.is_trivial:
            lhs = Fraction(0)
            if con.relation is Relation.EQ:
                if abs(lhs - reduced.rhs) > width:
                    return None
            elif not con.relation.holds(lhs, reduced.rhs):
                return None
            continue
        if con.relation is Relation.EQ:
            coeffs = dict(reduced.coefficients)
            rows.append(LinearConstraint.build(coeffs, Relation.GE, reduced.rhs - width, con.label))
            rows.append(LinearConstraint.build(coeffs, Relation.LE, reduced.rhs + width, con.label))
        else:
            rows.append(reduced)

    result = solve_feasibility(rows)
    if not result.feasible:
        return None
    tau = tuple(_sign(v) for v in hint)
    return Signature(
        tuple(species), tuple(hint), _m_values(result.sample, pattern), tau, None, hinted=True
    )

