"""
network/reactions.py

Reactions and reaction networks.

Responsibilities:
- Expand reversible specs into paired directed reactions
- Deduplicate complexes into a canonical ordered list
- Provide id/index lookups used by every downstream package

This module MUST:
- Reject self-loops and duplicate reactions
- Keep input order (forward before reverse) for determinism
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

from errors import NetworkError
from network.complexes import Complex

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Reaction:
    id: str
    reactant: Complex
    product: Complex
    reverse_of: Optional[str] = None

    @property
    def is_reversible(self) -> bool:
        return self.reverse_of is not None

    def vector(self) -> dict[str, Fraction]:
        return self.product.difference(self.reactant)

    def format(self, order=None) -> str:
        return f"{self.reactant.format(order)} -> {self.product.format(order)}"


@dataclass(frozen=True)
class ReactionSpec:
    reactant: Complex
    product: Complex
    reversible: bool = False
    id: Optional[str] = None
    reverse_id: Optional[str] = None


@dataclass(frozen=True)
class ReactionNetwork:
    species: tuple[str, ...]
    complexes: tuple[Complex, ...]
    reactions: tuple[Reaction, ...]

    # --- counts ---

    @property
    def m(self) -> int:
        return len(self.species)

    @property
    def n(self) -> int:
        return len(self.complexes)

    @property
    def r(self) -> int:
        return len(self.reactions)

    # --- lookups ---

    @cached_property
    def _reaction_index(self) -> dict[str, int]:
        return {rx.id: i for i, rx in enumerate(self.reactions)}

    @cached_property
    def _complex_index(self) -> dict[Complex, int]:
        return {c: i for i, c in enumerate(self.complexes)}

    @cached_property
    def _species_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.species)}

    def reaction_index(self, reaction_id: str) -> int:
        try:
            return self._reaction_index[reaction_id]
        except KeyError:
            raise NetworkError(f"unknown reaction id {reaction_id!r}") from None

    def reaction(self, reaction_id: str) -> Reaction:
        return self.reactions[self.reaction_index(reaction_id)]

    def complex_index(self, complex_: Complex) -> int:
        try:
            return self._complex_index[complex_]
        except KeyError:
            raise NetworkError(f"complex {complex_} is not in the network") from None

    def species_index(self, species: str) -> int:
        return self._species_index[species]

    def reverse_index(self, index: int) -> Optional[int]:
        partner = self.reactions[index].reverse_of
        return None if partner is None else self._reaction_index[partner]

    @cached_property
    def reactant_complexes(self) -> tuple[Complex, ...]:
        reactants = {rx.reactant for rx in self.reactions}
        return tuple(c for c in self.complexes if c in reactants)

    @property
    def n_r(self) -> int:
        return len(self.reactant_complexes)

    def reactions_from(self, reactant: Complex) -> list[int]:
        return [i for i, rx in enumerate(self.reactions) if rx.reactant == reactant]

    def reaction_vector(self, index: int) -> list[Fraction]:
        vec = self.reactions[index].vector()
        return [vec.get(s, Fraction(0)) for s in self.species]

    def format_reaction(self, index: int) -> str:
        rx = self.reactions[index]
        return f"{rx.id}: {rx.format(self.species)}"


# ============================================================
# BUILDER
# ============================================================

def _coerce_spec(spec) -> ReactionSpec:
    if isinstance(spec, ReactionSpec):
        return spec
    reactant, product, *rest = spec
    reversible = bool(rest[0]) if rest else False
    if not isinstance(reactant, Complex):
        reactant = Complex.from_mapping(reactant)
    if not isinstance(product, Complex):
        product = Complex.from_mapping(product)
    return ReactionSpec(reactant=reactant, product=product, reversible=reversible)


def build_network(
    specs: Iterable, *, species: Optional[Sequence[str]] = None
) -> ReactionNetwork:
    """
    Build a network from (reactant, product, reversible) specs.

    Reactions are numbered R1, R2, ... in expansion order unless a ReactionSpec
    carries explicit ids; a reversible spec expands to forward then reverse.
    """
    specs = [_coerce_spec(s) for s in specs]
    if not specs:
        raise NetworkError("a reaction network needs at least one reaction")

    directed: list[tuple[str, Complex, Complex, Optional[str]]] = []
    counter = 0
    for spec in specs:
        counter += 1
        fwd_id = spec.id or f"R{counter}"
        if spec.reversible:
            counter += 1
            rev_id = spec.reverse_id or f"R{counter}"
            directed.append((fwd_id, spec.reactant, spec.product, rev_id))
            directed.append((rev_id, spec.product, spec.reactant, fwd_id))
        else:
            directed.append((fwd_id, spec.reactant, spec.product, None))

    seen_ids: set[str] = set()
    seen_pairs: dict[tuple[Complex, Complex], str] = {}
    complexes: list[Complex] = []
    complex_set: set[Complex] = set()
    found_species: list[str] = []
    reactions: list[Reaction] = []

    for rid, reactant, product, partner in directed:
        if rid in seen_ids:
            raise NetworkError(f"duplicate reaction id {rid!r}")
        if reactant == product:
            raise NetworkError(f"self-loop {rid}: {reactant} -> {product}")
        pair = (reactant, product)
        if pair in seen_pairs:
            raise NetworkError(
                f"duplicate reaction {rid}: {reactant} -> {product} "
                f"already declared as {seen_pairs[pair]}"
            )
        seen_ids.add(rid)
        seen_pairs[pair] = rid
        for c in (reactant, product):
            if c not in complex_set:
                complex_set.add(c)
                complexes.append(c)
            for s in c.species():
                if s not in found_species:
                    found_species.append(s)
        reactions.append(Reaction(rid, reactant, product, partner))

    if species is None:
        species_order = tuple(found_species)
    else:
        species_order = tuple(species)
        missing = [s for s in found_species if s not in species_order]
        if missing:
            raise NetworkError(f"species used but not declared: {', '.join(missing)}")

    net = ReactionNetwork(species_order, tuple(complexes), tuple(reactions))
    logger.debug(f"NETWORK BUILT | m={net.m} | n={net.n} | r={net.r}")
    return net


def network_with_reactions(net: ReactionNetwork, reactions: Sequence[Reaction]) -> ReactionNetwork:
    """Rebuild complexes for a replaced reaction list, keeping species order."""
    complexes: list[Complex] = []
    seen: set[Complex] = set()
    for rx in reactions:
        for c in (rx.reactant, rx.product):
            if c not in seen:
                seen.add(c)
                complexes.append(c)
    return ReactionNetwork(net.species, tuple(complexes), tuple(reactions))
