"""
verification/checks.py

Independent numerical check of a witness against a rated system.

Responsibilities:
- Equilibrium residuals of f at c* and c**, relative to the largest flux
- Stoichiometric compatibility of c* - c** (exact for rational sigma,
  least squares otherwise)
- Positivity and distinctness

This module MUST:
- Depend only on the kinetics layer, never on how the witness was found
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from errors import KineticsError, WitnessError
from kinetics.sfrf import fluxes, sfrf, stoichiometric_array
from kinetics.system import KineticSystem
from linalg.rational import as_fraction, in_column_space
from network.matrices import stoichiometric_matrix

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class VerificationReport:
    residual_c_star: float
    residual_c_double_star: float
    compat_defect: float
    distinct: bool
    positive: bool
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.residual_c_star <= self.tol
            and self.residual_c_double_star <= self.tol
            and self.compat_defect <= self.tol
            and self.distinct
            and self.positive
        )

    def to_dict(self):
        out = asdict(self)
        out["pass"] = self.passed
        return out


def relative_residual(system: KineticSystem, x: Sequence[float]) -> float:
    """max |f_s(x)| divided by the largest single-reaction flux."""
    flux = fluxes(system, x)
    scale = float(np.max(np.abs(flux))) if flux.size else 0.0
    residual = float(np.max(np.abs(sfrf(system, x)))) if flux.size else 0.0
    if scale == 0.0:
        return residual
    return residual / scale


def compat_defect(system: KineticSystem, c_star, c_double_star, sigma=None) -> float:
    """
    Distance of c* - c** to S, relative to |c* - c**|. Zero or one when an
    exact rational sigma is given (in S or not).
    """
    if sigma is not None:
        try:
            exact = [as_fraction(v) for v in sigma]
        except (TypeError, ValueError):
            exact = None
        if exact is not None:
            diff = np.asarray(c_star, dtype=float) - np.asarray(c_double_star, dtype=float)
            target = np.array([float(v) for v in exact])
            scale = max(1.0, float(np.max(np.abs(target))))
            if float(np.max(np.abs(diff - target))) > 1e-9 * scale:
                return float(np.max(np.abs(diff - target))) / scale
            return 0.0 if in_column_space(stoichiometric_matrix(system.network), exact) else 1.0

    diff = np.asarray(c_star, dtype=float) - np.asarray(c_double_star, dtype=float)
    norm = float(np.linalg.norm(diff))
    if norm == 0.0:
        return 0.0
    N = stoichiometric_array(system)
    if N.size == 0:
        return 1.0
    coef, *_ = np.linalg.lstsq(N, diff, rcond=None)
    return float(np.linalg.norm(N @ coef - diff)) / norm


def check_witness(
    system: KineticSystem,
    c_star: Sequence[float],
    c_double_star: Sequence[float],
    *,
    sigma: Optional[Sequence] = None,
    tol: float = DEFAULT_TOL,
) -> VerificationReport:
    """
    Evaluate a candidate pair of equilibria of a system that carries rate
    constants. Raises WitnessError on nonpositive concentrations.
    """
    m = system.network.m
    c1 = np.asarray([float(v) for v in c_star], dtype=float)
    c2 = np.asarray([float(v) for v in c_double_star], dtype=float)
    if c1.shape != (m,) or c2.shape != (m,):
        raise WitnessError(f"witness concentrations must have {m} entries")
    if np.any(c1 <= 0) or np.any(c2 <= 0):
        raise WitnessError("witness concentrations must be strictly positive")

    try:
        r1 = relative_residual(system, c1)
        r2 = relative_residual(system, c2)
    except KineticsError as exc:
        raise WitnessError(str(exc)) from exc

    report = VerificationReport(
        residual_c_star=r1,
        residual_c_double_star=r2,
        compat_defect=compat_defect(system, c1, c2, sigma),
        distinct=bool(np.any(c1 != c2)),
        positive=True,
        tol=tol,
    )
    logger.info(
        f"WITNESS CHECK | pass={report.passed} | res*={r1:.3e} | res**={r2:.3e} | "
        f"compat={report.compat_defect:.3e}"
    )
    return report
