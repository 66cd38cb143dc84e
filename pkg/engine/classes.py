"""
engine/classes.py

Fundamental classes (STEPS 3-4): each P_i closed under reversible
pairing, and the strong linkage structure of the subnetwork it spans.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from engine.partition import EquivalencePartition
from network.linkage import strong_linkage_classes, terminal_strong_linkage_classes
from network.reactions import ReactionNetwork


@dataclass(frozen=True)
class FundamentalClass:
    index: int
    members: tuple[int, ...]
    reactions: tuple[int, ...]
    representative: Optional[int]
    reversible: bool


@dataclass(frozen=True)
class FundamentalClassSet:
    partition: EquivalencePartition
    c0: FundamentalClass
    classes: tuple[FundamentalClass, ...]

    @property
    def W(self) -> tuple[int, ...]:
        return tuple(c.representative for c in self.classes)

    def get(self, index: int) -> FundamentalClass:
        return self.c0 if index == 0 else self.classes[index - 1]

    def class_of_reaction(self, reaction: int) -> int:
        if reaction in self.c0.reactions:
            return 0
        for c in self.classes:
            if reaction in c.reactions:
                return c.index
        return -1


def _closure(net: ReactionNetwork, members) -> tuple[int, ...]:
    out = set(members)
    for j in members:
        partner = net.reverse_index(j)
        if partner is not None:
            out.add(partner)
    return tuple(sorted(out))


def fundamental_classes(partition: EquivalencePartition, net: ReactionNetwork) -> FundamentalClassSet:
    c0 = FundamentalClass(
        index=0,
        members=partition.p0,
        reactions=_closure(net, partition.p0),
        representative=None,
        reversible=all(net.reactions[j].is_reversible for j in partition.p0),
    )
    classes = []
    for i, (members, rep) in enumerate(zip(partition.classes, partition.representatives), start=1):
        classes.append(FundamentalClass(
            index=i,
            members=members,
            reactions=_closure(net, members),
            representative=rep,
            reversible=all(net.reactions[j].is_reversible for j in members),
        ))
    return FundamentalClassSet(partition=partition, c0=c0, classes=tuple(classes))


@dataclass(frozen=True)
class ColinkageSubnetwork:
    class_index: int
    reactions: tuple[int, ...]
    nonterminal: tuple[frozenset, ...]
    terminal: tuple[frozenset, ...]

    def terminal_class_of(self, complex_index: int) -> Optional[int]:
        for pos, cls in enumerate(self.terminal):
            if complex_index in cls:
                return pos
        return None


def colinkage_subnetwork(net: ReactionNetwork, cls: FundamentalClass) -> ColinkageSubnetwork:
    strong = strong_linkage_classes(net, cls.reactions)
    terminal = terminal_strong_linkage_classes(net, cls.reactions)
    return ColinkageSubnetwork(
        class_index=cls.index,
        reactions=cls.reactions,
        nonterminal=tuple(c for c in strong if c not in terminal),
        terminal=tuple(terminal),
    )


def colinkage_subnetworks(classes: FundamentalClassSet, net: ReactionNetwork) -> list[ColinkageSubnetwork]:
    return [colinkage_subnetwork(net, c) for c in classes.classes]
