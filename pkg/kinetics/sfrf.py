"""
kinetics/sfrf.py

Species formation rate function f(x) = N . K(x), K_j(x) = k_j * prod x^F_j.

Floats for verification (numpy), exact sympy evaluation for structural
equivalence checks at rational points.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
import sympy as sp

from errors import KineticsError
from kinetics.system import KineticSystem
from network.matrices import stoichiometric_matrix


def _require_rates(system: KineticSystem):
    if system.k is None:
        raise KineticsError("rate constants are required to evaluate the rate function")


def _positive_point(system: KineticSystem, x: Sequence) -> np.ndarray:
    arr = np.asarray([float(v) for v in x], dtype=float)
    if arr.shape != (system.network.m,):
        raise KineticsError(f"expected {system.network.m} concentrations, got {arr.shape[0]}")
    if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
        raise KineticsError("concentrations must be finite and strictly positive")
    return arr


def stoichiometric_array(system: KineticSystem) -> np.ndarray:
    return np.array(
        [[float(v) for v in row] for row in stoichiometric_matrix(system.network)], dtype=float
    ).reshape(system.network.m, system.network.r)


def fluxes(system: KineticSystem, x: Sequence) -> np.ndarray:
    _require_rates(system)
    arr = _positive_point(system, x)
    F = np.array([[float(v) for v in row] for row in system.F], dtype=float).reshape(
        system.network.r, system.network.m
    )
    k = np.array([float(v) for v in system.k], dtype=float)
    # log-space keeps large kinetic orders from overflowing intermediate powers
    return k * np.exp(F @ np.log(arr))


def sfrf(system: KineticSystem, x: Sequence) -> np.ndarray:
    return stoichiometric_array(system) @ fluxes(system, x)


def sfrf_exact(system: KineticSystem, x: Sequence) -> list:
    """Exact f(x) at a positive rational point, as sympy expressions."""
    _require_rates(system)
    point = [sp.Rational(str(v)) if not isinstance(v, sp.Basic) else v for v in x]
    if any(v <= 0 for v in point):
        raise KineticsError("concentrations must be strictly positive")
    net = system.network
    N = stoichiometric_matrix(net)
    rates = []
    for j in range(net.r):
        term = sp.Rational(system.k[j].numerator, system.k[j].denominator)
        for s_i, order in enumerate(system.F[j]):
            if order != 0:
                term *= sp.Pow(point[s_i], sp.Rational(order.numerator, order.denominator))
        rates.append(term)
    out = []
    for i in range(net.m):
        total = sp.Integer(0)
        for j in range(net.r):
            if N[i][j] != 0:
                total += sp.Rational(N[i][j].numerator, N[i][j].denominator) * rates[j]
        out.append(total)
    return out
