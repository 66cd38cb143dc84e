"""
kinetics/cfrm.py

CF-RM transformation: make a PL-NDK system reactant-determined by moving
the reactions of each extra CF-subset onto a fresh reactant multiple.

Responsibilities:
- Partition branching reactions into CF-subsets (identical kinetic rows)
- Keep the largest subset per NF-reactant, relocate the others to q*y
- Record what changed so reports can show it

This module MUST:
- Leave F, rate constants and every reaction vector unchanged
- Be deterministic (lowest reaction index wins ties)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

from errors import KineticsError
from kinetics.system import KineticSystem
from network.complexes import Complex
from network.reactions import Reaction, ReactionNetwork, network_with_reactions

logger = logging.getLogger(__name__)


@dataclass
class CfRmRecord:
    transformed: dict[str, Reaction] = field(default_factory=dict)
    original: dict[str, Reaction] = field(default_factory=dict)
    new_reactants: list[Complex] = field(default_factory=list)
    cf_counts: dict[Complex, int] = field(default_factory=dict)

    @property
    def is_identity(self) -> bool:
        return not self.transformed

    def to_dict(self, species=None):
        return {
            "transformed": {
                rid: {
                    "from": self.original[rid].format(species),
                    "to": rx.format(species),
                }
                for rid, rx in self.transformed.items()
            },
            "new_reactants": [c.format(species) for c in self.new_reactants],
            "nf_reactants": {
                c.format(species): n for c, n in self.cf_counts.items() if n > 1
            },
        }


def cf_subsets(system: KineticSystem, reactant: Complex) -> tuple[list[list[int]], int]:
    """
    CF-subsets at a reactant complex, ordered by their lowest reaction
    index, together with N_R(y).
    """
    net = system.network
    branching = net.reactions_from(reactant)
    if not branching:
        raise KineticsError(f"{reactant} is not a reactant complex")
    groups: dict[tuple, list[int]] = {}
    for j in branching:
        groups.setdefault(system.F[j], []).append(j)
    subsets = list(groups.values())
    return subsets, len(subsets)


def _kept_subset(net: ReactionNetwork, subsets: list[list[int]], keep: set[str]) -> int:
    for pos, subset in enumerate(subsets):
        if any(net.reactions[j].id in keep for j in subset):
            return pos
    # largest, then the one holding the lowest reaction index
    return max(range(len(subsets)), key=lambda p: (len(subsets[p]), -subsets[p][0]))


def _fresh_reactant(net: ReactionNetwork, y: Complex, current: set[Complex]) -> Complex:
    """
    Smallest multiple q*y (q >= 2) not yet a reactant. Every multiple of
    the zero complex is zero, so there the multiples of the complex holding
    each species once are scanned from q = 1.
    """
    if y.is_zero:
        base, q = Complex.from_mapping({s: 1 for s in net.species}), 1
    else:
        base, q = y, 2
    while base.scale(q) in current:
        q += 1
    return base.scale(q)


def cf_rm_transform(
    system: KineticSystem, *, keep: Optional[Iterable[str]] = None
) -> tuple[KineticSystem, CfRmRecord]:
    """
    Return the CF-RM transform and its record.

    `keep` optionally names reactions whose CF-subset must stay on the
    original reactant (one id per NF-reactant is enough).
    """
    net = system.network
    keep = set(keep or ())
    record = CfRmRecord()
    reactions = list(net.reactions)
    current_reactants = set(net.reactant_complexes)

    for y in net.reactant_complexes:
        subsets, count = cf_subsets(system, y)
        record.cf_counts[y] = count
        if count == 1:
            continue
        kept = _kept_subset(net, subsets, keep)
        for pos, subset in enumerate(subsets):
            if pos == kept:
                continue
            new_reactant = _fresh_reactant(net, y, current_reactants)
            shift = Complex.from_mapping(new_reactant.difference(y))
            current_reactants.add(new_reactant)
            record.new_reactants.append(new_reactant)
            for j in subset:
                old = reactions[j]
                moved = Reaction(old.id, new_reactant, old.product + shift, None)
                reactions[j] = moved
                record.original[old.id] = net.reactions[j]
                record.transformed[old.id] = moved
                logger.info(
                    f"CF-RM | {old.id} | {old.format(net.species)} -> {moved.format(net.species)}"
                )

    if record.is_identity:
        return system, record

    # a relocated reaction no longer reverses its former partner
    moved_ids = set(record.transformed)
    relinked = []
    for rx in reactions:
        if rx.reverse_of is not None and (rx.id in moved_ids or rx.reverse_of in moved_ids):
            rx = Reaction(rx.id, rx.reactant, rx.product, None)
        relinked.append(rx)

    new_net = network_with_reactions(net, relinked)
    return KineticSystem(new_net, system.F, system.k), record
