"""
engine/partition.py

Equivalence classes of an orientation induced by Ker L_O (STEP 2).

Responsibilities:
- Build L_O and a canonical kernel basis
- Group reactions by proportional kernel rows (P_0 = zero rows)
- Pick representatives and record each reaction's scalar against it
- Detect the structural early exits

This module MUST:
- Stay exact; proportionality is tested on Fractions
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from engine.orientation import Orientation
from linalg.rational import nullspace
from network.matrices import columns, stoichiometric_matrix
from network.reactions import ReactionNetwork

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EquivalencePartition:
    orientation: Orientation
    kernel: tuple[tuple[Fraction, ...], ...]
    p0: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]
    alpha: dict

    @property
    def w(self) -> int:
        return len(self.classes)

    def row(self, reaction: int) -> tuple[Fraction, ...]:
        pos = self.orientation.position(reaction)
        return tuple(v[pos] for v in self.kernel)

    def class_of(self, reaction: int) -> int:
        """0 for P_0, i >= 1 for P_i, -1 when the reaction is not in O."""
        if reaction in self.p0:
            return 0
        for i, members in enumerate(self.classes, start=1):
            if reaction in members:
                return i
        return -1


def orientation_matrix(net: ReactionNetwork, orientation: Orientation) -> list[list[Fraction]]:
    return columns(stoichiometric_matrix(net), orientation.reactions)


def kernel_basis(net: ReactionNetwork, orientation: Orientation) -> list[list[Fraction]]:
    return nullspace(orientation_matrix(net, orientation), len(orientation))


def _direction(row: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    lead = next(v for v in row if v != 0)
    return tuple(v / lead for v in row)


def _ratio(row: tuple[Fraction, ...], ref: tuple[Fraction, ...]) -> Fraction:
    for a, b in zip(row, ref):
        if b != 0:
            return a / b
    raise ValueError("reference row is zero")


def partition_equivalence_classes(
    net: ReactionNetwork, orientation: Orientation, kernel=None
) -> EquivalencePartition:
    if kernel is None:
        kernel = kernel_basis(net, orientation)
    kernel = tuple(tuple(v) for v in kernel)
    p0: list[int] = []
    groups: dict[tuple, list[int]] = {}
    for pos, j in enumerate(orientation.reactions):
        row = tuple(v[pos] for v in kernel)
        if all(x == 0 for x in row):
            p0.append(j)
        else:
            groups.setdefault(_direction(row), []).append(j)

    classes = tuple(tuple(members) for members in groups.values())
    reps = []
    alpha: dict[int, Fraction] = {}
    for members in classes:
        irreversible = [j for j in members if not net.reactions[j].is_reversible]
        rep = min(irreversible) if irreversible else min(members)
        reps.append(rep)
        ref = tuple(v[orientation.position(rep)] for v in kernel)
        for j in members:
            alpha[j] = _ratio(tuple(v[orientation.position(j)] for v in kernel), ref)

    partition = EquivalencePartition(
        orientation=orientation,
        kernel=kernel,
        p0=tuple(p0),
        classes=classes,
        representatives=tuple(reps),
        alpha=alpha,
    )
    logger.debug(
        f"PARTITION | |O|={len(orientation)} | d={len(kernel)} | "
        f"p0={len(p0)} | w={len(classes)}"
    )
    return partition


def early_exit(net: ReactionNetwork, partition: EquivalencePartition) -> Optional[str]:
    """
    Reason string when the STEP 2 conditions already rule out
    multistationarity, else None.
    """
    for j in partition.p0:
        if not net.reactions[j].is_reversible:
            return f"irreversible reaction {net.reactions[j].id} lies in P0"
    for members in partition.classes:
        irreversible = [j for j in members if not net.reactions[j].is_reversible]
        signs = {partition.alpha[j] > 0 for j in irreversible}
        if len(signs) > 1:
            ids = ", ".join(net.reactions[j].id for j in irreversible)
            return f"irreversible reactions {ids} share a class with opposite orientation"
    return None
