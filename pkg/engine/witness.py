"""
engine/witness.py

From a signature to two explicit equilibria (STEPS 15-17).

Responsibilities:
- sigma: user-supplied (checked) or the primitive sign-compatible one
- c** = sigma / (e^mu - 1), c* = c** + sigma, p where mu_s = 0
- kappa: exact LP with N.kappa = 0, the e^{T.mu}-weighted balance held
  inside a relative band, the branch g/h signs and h = e^{M_i} g per class
- A user-supplied kappa: validated, then turned into mu rows per branch
- rate constants k = kappa / c**^T

This module MUST:
- Keep N.kappa = 0 exact
- Never hand back a witness with a nonpositive concentration
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from engine.assembly import NEG_INF, mu_name
from engine.classes import FundamentalClassSet
from engine.patterns import SignPatternChoice
from engine.signature import Signature
from errors import WitnessError
from kinetics.system import KineticSystem, TMatrix
from linalg.constraints import LinearConstraint, Relation, format_rational
from linalg.rational import as_fraction, in_column_space, matvec
from linalg.sign_compat import sign_compatible_sigma, signs_match
from linalg.simplex import solve_feasibility
from network.matrices import stoichiometric_matrix
from network.reactions import ReactionNetwork

logger = logging.getLogger(__name__)

ZERO = Fraction(0)


@dataclass(frozen=True)
class Witness:
    species: tuple[str, ...]
    reactions: tuple[str, ...]
    mu: tuple[Fraction, ...]
    sigma: tuple[Fraction, ...]
    p: Fraction
    c_star: tuple[float, ...]
    c_double_star: tuple[float, ...]
    kappa: tuple[Fraction, ...]
    k: tuple[float, ...]

    def rated_system(self, system: KineticSystem) -> KineticSystem:
        return system.with_rates(self.k)

    def to_dict(self):
        return {
            "species": list(self.species),
            "reactions": list(self.reactions),
            "mu": {s: format_rational(v) for s, v in zip(self.species, self.mu)},
            "mu_float": {s: float(v) for s, v in zip(self.species, self.mu)},
            "sigma": {s: format_rational(v) for s, v in zip(self.species, self.sigma)},
            "p": format_rational(self.p),
            "c_star": {s: v for s, v in zip(self.species, self.c_star)},
            "c_double_star": {s: v for s, v in zip(self.species, self.c_double_star)},
            "kappa": {r: format_rational(v) for r, v in zip(self.reactions, self.kappa)},
            "k": {r: v for r, v in zip(self.reactions, self.k)},
        }


# ============================================================
# SIGMA AND CONCENTRATIONS
# ============================================================

def resolve_sigma(mu: Sequence[Fraction], N, sigma: Optional[Sequence] = None) -> Optional[list[Fraction]]:
    """
    The sigma a witness uses. A supplied sigma must lie in S and share the
    signs of mu (WitnessError otherwise).
    """
    if sigma is None:
        return sign_compatible_sigma(mu, N)
    sigma = [as_fraction(v) for v in sigma]
    if len(sigma) != len(mu):
        raise WitnessError(f"sigma has {len(sigma)} entries for {len(mu)} species")
    if not signs_match(mu, sigma):
        raise WitnessError("sigma must carry the sign pattern of mu")
    if not in_column_space(N, sigma):
        raise WitnessError("sigma is not in the stoichiometric subspace")
    return sigma


def concentrations(
    mu: Sequence[Fraction], sigma: Sequence[Fraction], p: Fraction = Fraction(1)
) -> tuple[list[float], list[float]]:
    """(c**, c*) with c*_s / c**_s = e^{mu_s} and c* - c** = sigma."""
    c2, c1 = [], []
    for m_s, s_s in zip(mu, sigma):
        if m_s == 0:
            c2.append(float(p))
            c1.append(float(p))
            continue
        low = float(s_s) / math.expm1(float(m_s))
        c2.append(low)
        c1.append(low + float(s_s))
    if any(not v > 0 for v in c2 + c1):
        raise WitnessError("constructed concentrations are not strictly positive")
    return c2, c1


# ============================================================
# KAPPA
# ============================================================

_SIGN_RELATION = {1: Relation.GT, -1: Relation.LT, 0: Relation.EQ}


@dataclass(frozen=True)
class PairSigns:
    """
    Signs a branch fixes for g_j = kappa_j - kappa_p and
    h_j = kappa_j e^a - kappa_p e^b, where p is the reverse partner of j
    (kappa_p = 0 for an irreversible j).
    """
    reaction: int
    partner: Optional[int]
    class_index: int
    g: int
    h: int

    @property
    def m_finite(self) -> bool:
        return self.g * self.h > 0


def pair_signs(net: ReactionNetwork, classes: FundamentalClassSet, pattern: SignPatternChoice) -> list[PairSigns]:
    """Member signs of every oriented reaction: sign(alpha_j) times the class signs."""
    out = []
    for j in classes.c0.members:
        partner = net.reverse_index(j)
        if partner is not None:
            out.append(PairSigns(j, partner, 0, 0, 0))
    alpha = classes.partition.alpha
    for cls in classes.classes:
        for j in cls.members:
            s = _sign(alpha[j])
            out.append(PairSigns(
                j, net.reverse_index(j), cls.index,
                s * pattern.g_sign(cls.index), s * pattern.h_sign(cls.index),
            ))
    return out


def reactant_exponentials(system: KineticSystem, T: TMatrix, mu: Sequence[Fraction]) -> list[float]:
    """e^{T.y . mu} for the reactant y of every reaction."""
    net = system.network
    mu_f = np.array([float(v) for v in mu], dtype=float)
    out = []
    for rx in net.reactions:
        col = np.array([float(v) for v in T.column(rx.reactant)], dtype=float)
        out.append(float(np.exp(col @ mu_f)))
    return out


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _rationalized(values: Sequence[float]) -> list[Fraction]:
    # 12 significant digits, relative to each value's own magnitude
    return [as_fraction(f"{v:.12e}") for v in values]


def _banded(coeffs: dict, weights: dict, band: Fraction, label: str) -> list[LinearConstraint]:
    """|sum c_v x_v| <= band * sum w_v x_v for x >= 0."""
    upper = {v: c - band * weights[v] for v, c in coeffs.items()}
    lower = {v: -c - band * weights[v] for v, c in coeffs.items()}
    return [
        LinearConstraint.build(upper, Relation.LE, 0, label=f"{label}+"),
        LinearConstraint.build(lower, Relation.LE, 0, label=f"{label}-"),
    ]


def _balance_rows(N, E, band, names) -> list[LinearConstraint]:
    """|sum_j N_sj E_j kappa_j| <= band * sum_j |N_sj| E_j kappa_j, per species."""
    rows = []
    for s, row in enumerate(N):
        coeffs = {names[j]: v * E[j] for j, v in enumerate(row) if v != 0}
        if coeffs:
            rows.extend(_banded(coeffs, {n: abs(c) for n, c in coeffs.items()}, band, f"balance[{s}]"))
    return rows


def _pair_forms(pair: PairSigns, E, names) -> tuple[dict, dict]:
    g = {names[pair.reaction]: Fraction(1)}
    h = {names[pair.reaction]: E[pair.reaction]}
    if pair.partner is not None:
        g[names[pair.partner]] = Fraction(-1)
        h[names[pair.partner]] = -E[pair.partner]
    return g, h


def _sign_rows(pairs: Sequence[PairSigns], E, band, names) -> list[LinearConstraint]:
    rows = []
    for pair in pairs:
        g, h = _pair_forms(pair, E, names)
        label = names[pair.reaction]
        rows.append(LinearConstraint.build(g, _SIGN_RELATION[pair.g], 0, label=f"g-sign:{label}"))
        if pair.h == 0:
            rows.extend(_banded(h, {n: abs(c) for n, c in h.items()}, band, f"h-zero:{label}"))
        else:
            rows.append(LinearConstraint.build(h, _SIGN_RELATION[pair.h], 0, label=f"h-sign:{label}"))
    return rows


def _branch_rho(pair: PairSigns, M: dict) -> Optional[float]:
    value = M.get(pair.class_index)
    if not pair.m_finite or value is None or value == NEG_INF:
        return None
    return math.exp(float(value))


def _closed_form_rows(pairs: Sequence[PairSigns], E, M: dict, band, names) -> list[LinearConstraint]:
    """h_j = rho_i g_j with rho_i = e^{M_i}, banded by |h_j| + rho_i |g_j|."""
    rows = []
    for pair in pairs:
        rho = _branch_rho(pair, M)
        if rho is None:
            continue
        rho = _rationalized([rho])[0]
        j, p = pair.reaction, pair.partner
        coeffs = {names[j]: E[j] - rho}
        weights = {names[j]: E[j] + rho}
        if p is not None:
            coeffs[names[p]] = rho - E[p]
            weights[names[p]] = E[p] + rho
        rows.extend(_banded(coeffs, weights, band, f"rho[{pair.class_index}]:{names[j]}"))
    return rows


def recover_kappa(
    system: KineticSystem,
    T: TMatrix,
    mu: Sequence[Fraction],
    *,
    pairs: Optional[Sequence[PairSigns]] = None,
    M: Optional[dict] = None,
    tol: float = 1e-9,
) -> Optional[list[Fraction]]:
    """
    kappa >= 1 with N.kappa = 0 exactly and N.diag(e^{T.mu}).kappa = 0 up
    to the relative band `tol`. With `pairs` the g and h signs of the
    branch are imposed; with `M` as well, every pair of a class with a
    finite M is pinned to h = e^{M_i} g. When the pinned problem has no
    solution the sign-constrained one is tried. None when no kappa exists.
    """
    net = system.network
    N = stoichiometric_matrix(net)
    names = [f"kappa[{j}]" for j in range(net.r)]
    E = _rationalized(reactant_exponentials(system, T, mu))
    band = as_fraction(f"{tol:.6e}")

    cons = [LinearConstraint.build({n: 1}, Relation.GE, 1, label=f"pos:{n}") for n in names]
    for s, row in enumerate(N):
        coeffs = {names[j]: v for j, v in enumerate(row) if v != 0}
        if coeffs:
            cons.append(LinearConstraint.build(coeffs, Relation.EQ, 0, label=f"kernel[{s}]"))
    cons.extend(_balance_rows(N, E, band, names))
    pinned = []
    if pairs:
        cons.extend(_sign_rows(pairs, E, band, names))
        if M:
            pinned = _closed_form_rows(pairs, E, M, band, names)

    result = solve_feasibility(cons + pinned, names)
    if not result.feasible and pinned:
        logger.info(f"KAPPA RHO RELAXED | pinned={len(pinned) // 2}")
        result = solve_feasibility(cons, names)
    if not result.feasible:
        logger.info(f"KAPPA NOT FOUND | tol={tol}")
        return None
    kappa = [result.sample[n] for n in names]
    if pairs and M:
        for rid, closed, found in closed_form_defects(system, T, mu, kappa, pairs, M):
            logger.warning(f"KAPPA PAIR MISMATCH | {rid} | closed={closed:.9g} | recovered={found:.9g}")
    return kappa


def pair_closed_form(g: float, rho: float, e_a: float, e_b: float) -> float:
    """kappa_p = g (rho - e^a) / (e^a - e^b), from h = rho g."""
    return g * (rho - e_a) / (e_a - e_b)


def closed_form_defects(
    system: KineticSystem, T: TMatrix, mu, kappa, pairs: Sequence[PairSigns], M: dict,
    *, rel_tol: float = 1e-6,
) -> list[tuple[str, float, float]]:
    """
    Reversible pairs whose partner kappa differs from the closed form at
    the branch's rho = e^{M_i}, as (reaction id, closed form, kappa_p).
    Pairs with e^a = e^b carry no closed form.
    """
    net = system.network
    E = reactant_exponentials(system, T, mu)
    out = []
    for pair in pairs:
        rho = _branch_rho(pair, M)
        j, p = pair.reaction, pair.partner
        if rho is None or p is None:
            continue
        a, b = E[j], E[p]
        if math.isclose(a, b, rel_tol=1e-12):
            continue
        g = float(kappa[j]) - float(kappa[p])
        closed = pair_closed_form(g, rho, a, b)
        if not math.isclose(closed, float(kappa[p]), rel_tol=rel_tol, abs_tol=1e-9):
            out.append((net.reactions[j].id, closed, float(kappa[p])))
    return out


def validate_kappa(system: KineticSystem, kappa) -> list[Fraction]:
    """A user-supplied kappa as Fractions; WitnessError unless positive and in ker N."""
    net = system.network
    try:
        kappa = [as_fraction(v) for v in kappa]
    except (TypeError, ValueError) as exc:
        raise WitnessError(f"kappa entries must be numbers: {exc}") from exc
    if len(kappa) != net.r:
        raise WitnessError(f"kappa has {len(kappa)} entries for {net.r} reactions")
    if any(v <= 0 for v in kappa):
        raise WitnessError("kappa must be strictly positive")
    if any(v != 0 for v in matvec(stoichiometric_matrix(net), kappa)):
        raise WitnessError("kappa is not in the kernel of N")
    return kappa


def kappa_balanced(system: KineticSystem, T: TMatrix, mu, kappa, *, tol: float) -> bool:
    """N.diag(e^{T.mu}).kappa = 0 within the relative band `tol`, per species."""
    net = system.network
    E = reactant_exponentials(system, T, mu)
    for s, row in enumerate(stoichiometric_matrix(net)):
        weighted = [float(v) * E[j] * float(kappa[j]) for j, v in enumerate(row)]
        if abs(sum(weighted)) > tol * max(1.0, sum(abs(w) for w in weighted)):
            logger.info(f"KAPPA UNBALANCED | species={net.species[s]}")
            return False
    return True


def kappa_rows(
    system: KineticSystem, T: TMatrix, kappa: Sequence[Fraction], pairs: Sequence[PairSigns]
) -> Optional[list[LinearConstraint]]:
    """
    Rows a fixed kappa imposes on mu within a branch:
    sign(kappa_j e^a - kappa_p e^b) = h_j becomes
    (T.y - T.y') . mu  {rel}  ln(kappa_p / kappa_j).
    None when the signs of kappa_j - kappa_p contradict the branch.
    """
    net = system.network
    rows = []
    for pair in pairs:
        j, p = pair.reaction, pair.partner
        partner_kappa = kappa[p] if p is not None else ZERO
        if _sign(kappa[j] - partner_kappa) != pair.g:
            return None
        if p is None:
            if pair.h != 1:
                return None
            continue
        a = T.column(net.reactions[j].reactant)
        b = T.column(net.reactions[p].reactant)
        coeffs = {mu_name(s): x - y for s, x, y in zip(T.species, a, b) if x != y}
        rhs = as_fraction(f"{math.log(float(partner_kappa / kappa[j])):.12e}")
        rows.append(LinearConstraint.build(
            coeffs, _SIGN_RELATION[pair.h], rhs, label=f"kappa-h:{net.reactions[j].id}"
        ))
    return rows


def rate_constants(system: KineticSystem, kappa, c_double_star) -> list[float]:
    """k_j = kappa_j / prod_s (c**_s)^F_js, evaluated in log space."""
    F = np.array([[float(v) for v in row] for row in system.F], dtype=float).reshape(
        system.network.r, system.network.m
    )
    logs = np.log(np.asarray(c_double_star, dtype=float))
    kappa_f = np.array([float(v) for v in kappa], dtype=float)
    return [float(v) for v in np.exp(np.log(kappa_f) - F @ logs)]


# ============================================================
# WITNESS
# ============================================================

def construct_witness(
    system: KineticSystem,
    T: TMatrix,
    signature: Signature,
    *,
    sigma: Optional[Sequence] = None,
    p: Fraction = Fraction(1),
    kappa: Optional[Sequence] = None,
    kappa_tol: float = 1e-9,
    pairs: Optional[Sequence[PairSigns]] = None,
) -> Optional[Witness]:
    """
    Witness for `signature`, or None when no kappa exists (the signature
    is then only a pre-signature). `pairs` carries the branch signs the
    recovered kappa has to realize.
    """
    net = system.network
    N = stoichiometric_matrix(net)
    mu = list(signature.mu)
    chosen = resolve_sigma(mu, N, sigma if sigma is not None else signature.sigma)
    if chosen is None:
        logger.info("WITNESS SKIPPED | mu is not sign-compatible with S")
        return None
    c2, c1 = concentrations(mu, chosen, as_fraction(p))

    if kappa is not None:
        kappa_values = validate_kappa(system, kappa)
        if not kappa_balanced(system, T, mu, kappa_values, tol=kappa_tol):
            return None
    else:
        kappa_values = recover_kappa(system, T, mu, pairs=pairs, M=signature.M, tol=kappa_tol)
        if kappa_values is None:
            return None

    k = rate_constants(system, kappa_values, c2)
    logger.info(
        f"WITNESS BUILT | sigma={[format_rational(v) for v in chosen]} | "
        f"min_c={min(c2 + c1):.6g}"
    )
    return Witness(
        species=tuple(net.species),
        reactions=tuple(rx.id for rx in net.reactions),
        mu=tuple(mu),
        sigma=tuple(chosen),
        p=as_fraction(p),
        c_star=tuple(c1),
        c_double_star=tuple(c2),
        kappa=tuple(kappa_values),
        k=tuple(k),
    )
