"""
kinetics/system.py

Power-law kinetic systems on a reaction network.

Responsibilities:
- Hold the kinetic order matrix F (r x m) and optional rate constants
- Classify reactant-determined (RDK) vs non-reactant-determined (NDK)
- Build the T-matrix (species x reactant complexes) for RDK systems

This module MUST:
- Refuse to build a T-matrix for NDK systems
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from errors import KineticsError
from linalg.rational import as_fraction
from network.complexes import Complex
from network.reactions import ReactionNetwork

logger = logging.getLogger(__name__)


class KineticsClass(Enum):
    RDK = "PL-RDK"
    NDK = "PL-NDK"


@dataclass(frozen=True)
class KineticSystem:
    network: ReactionNetwork
    F: tuple[tuple[Fraction, ...], ...]
    k: Optional[tuple[Fraction, ...]] = None

    def __post_init__(self):
        net = self.network
        if len(self.F) != net.r:
            raise KineticsError(f"F has {len(self.F)} rows for {net.r} reactions")
        for j, row in enumerate(self.F):
            if len(row) != net.m:
                raise KineticsError(
                    f"F row for {net.reactions[j].id} has {len(row)} entries, expected {net.m}"
                )
        if self.k is not None:
            if len(self.k) != net.r:
                raise KineticsError(f"{len(self.k)} rate constants for {net.r} reactions")
            bad = [net.reactions[j].id for j, v in enumerate(self.k) if v <= 0]
            if bad:
                raise KineticsError(f"rate constants must be positive: {', '.join(bad)}")

    @classmethod
    def from_orders(
        cls,
        network: ReactionNetwork,
        orders: Sequence[Mapping[str, object]],
        k: Optional[Sequence] = None,
    ) -> "KineticSystem":
        """Build F from one species->order mapping per reaction."""
        rows = []
        for j, mapping in enumerate(orders):
            unknown = [s for s in mapping if s not in network.species]
            if unknown:
                raise KineticsError(
                    f"unknown species in kinetic orders of {network.reactions[j].id}: "
                    f"{', '.join(unknown)}"
                )
            rows.append(tuple(as_fraction(mapping.get(s, 0)) for s in network.species))
        rates = None if k is None else tuple(as_fraction(v) for v in k)
        return cls(network, tuple(rows), rates)

    @classmethod
    def mass_action(cls, network: ReactionNetwork, k: Optional[Sequence] = None) -> "KineticSystem":
        rows = tuple(
            tuple(rx.reactant.coefficient(s) for s in network.species) for rx in network.reactions
        )
        rates = None if k is None else tuple(as_fraction(v) for v in k)
        return cls(network, rows, rates)

    def with_rates(self, k: Optional[Sequence]) -> "KineticSystem":
        rates = None if k is None else tuple(as_fraction(v) for v in k)
        return KineticSystem(self.network, self.F, rates)

    def orders(self, j: int) -> dict[str, Fraction]:
        return {s: v for s, v in zip(self.network.species, self.F[j]) if v != 0}


def classify(system: KineticSystem) -> KineticsClass:
    rows_at: dict[Complex, tuple] = {}
    for j, rx in enumerate(system.network.reactions):
        row = system.F[j]
        seen = rows_at.setdefault(rx.reactant, row)
        if seen != row:
            return KineticsClass.NDK
    return KineticsClass.RDK


def is_rdk(system: KineticSystem) -> bool:
    return classify(system) is KineticsClass.RDK


@dataclass(frozen=True)
class TMatrix:
    species: tuple[str, ...]
    reactants: tuple[Complex, ...]
    columns: tuple[tuple[Fraction, ...], ...]

    def column(self, reactant: Complex) -> tuple[Fraction, ...]:
        return self.columns[self.reactants.index(reactant)]

    def rows(self) -> list[list[Fraction]]:
        return [[col[i] for col in self.columns] for i in range(len(self.species))]

    def linear_form(self, reactant: Complex, prefix: str = "mu") -> dict[str, Fraction]:
        """T_{.y} . mu as a {variable: coefficient} mapping."""
        col = self.column(reactant)
        return {f"{prefix}[{s}]": v for s, v in zip(self.species, col) if v != 0}


def t_matrix(system: KineticSystem) -> TMatrix:
    if classify(system) is not KineticsClass.RDK:
        raise KineticsError("T-matrix is defined only for PL-RDK systems; apply CF-RM first")
    net = system.network
    cols = []
    for y in net.reactant_complexes:
        j = net.reactions_from(y)[0]
        cols.append(tuple(system.F[j]))
    return TMatrix(net.species, net.reactant_complexes, tuple(cols))
