"""
engine/shelving.py

Three-shelf assignments for nondegenerate fundamental classes (STEP 9).

Rules enforced while enumerating:
- (i)   irreversible reactions go to the middle shelf
- (ii)  rho <= 0 puts every reaction on the upper shelf
- (iii) a reversible pair shares a shelf
- (iv)  reactions with the same reactant share a shelf
- (v)   reactant in a nonterminal strong class -> middle
- (vi)  reactants in one terminal strong class share a shelf
- (vii) the P_i subnetwork has an undirected cycle of >= 3 complexes -> middle

Shelf options for a free group are tried middle, lower, upper.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import networkx as nx

from engine.classes import ColinkageSubnetwork, FundamentalClass
from engine.patterns import SignPatternChoice
from network.linkage import has_big_cycle
from network.reactions import ReactionNetwork

logger = logging.getLogger(__name__)


class Shelf(Enum):
    UPPER = "upper"
    MIDDLE = "middle"
    LOWER = "lower"


SHELF_ORDER = (Shelf.MIDDLE, Shelf.LOWER, Shelf.UPPER)


@dataclass(frozen=True)
class ShelvingAssignment:
    class_index: int
    shelves: tuple[tuple[int, Shelf], ...]

    def shelf_of(self, reaction: int) -> Shelf:
        return dict(self.shelves)[reaction]

    def on(self, shelf: Shelf) -> list[int]:
        return [j for j, s in self.shelves if s is shelf]

    def format(self, net: ReactionNetwork) -> str:
        parts = []
        for shelf, tag in ((Shelf.UPPER, "U"), (Shelf.MIDDLE, "M"), (Shelf.LOWER, "L")):
            ids = ", ".join(net.reactions[j].id for j in self.on(shelf))
            parts.append(f"{tag}{self.class_index} = {{{ids}}}")
        return "  ".join(parts)


# ============================================================
# RULE HELPERS
# ============================================================

def _reactant_index(net: ReactionNetwork, j: int) -> int:
    return net.complex_index(net.reactions[j].reactant)


def _groups(net: ReactionNetwork, cls: FundamentalClass, sub: ColinkageSubnetwork) -> list[list[int]]:
    g = nx.Graph()
    g.add_nodes_from(cls.reactions)
    for j in cls.reactions:
        partner = net.reverse_index(j)
        if partner is not None and partner in cls.reactions:
            g.add_edge(j, partner)  # (iii)
    by_reactant: dict[int, int] = {}
    by_terminal: dict[int, int] = {}
    for j in cls.reactions:
        y = _reactant_index(net, j)
        if y in by_reactant:
            g.add_edge(j, by_reactant[y])  # (iv)
        else:
            by_reactant[y] = j
        t = sub.terminal_class_of(y)
        if t is not None:
            if t in by_terminal:
                g.add_edge(j, by_terminal[t])  # (vi)
            else:
                by_terminal[t] = j
    return sorted((sorted(c) for c in nx.connected_components(g)), key=lambda c: c[0])


def _forced_middle(net: ReactionNetwork, cls: FundamentalClass, sub: ColinkageSubnetwork) -> dict[int, str]:
    forced: dict[int, str] = {}
    big_cycle = has_big_cycle(net, cls.members)
    for j in cls.reactions:
        if not net.reactions[j].is_reversible:
            forced.setdefault(j, "i")
        if sub.terminal_class_of(_reactant_index(net, j)) is None:
            forced.setdefault(j, "v")
        if big_cycle:
            forced.setdefault(j, "vii")
    return forced


# ============================================================
# ENUMERATION
# ============================================================

def enumerate_class_shelvings(
    net: ReactionNetwork,
    cls: FundamentalClass,
    sub: ColinkageSubnetwork,
    pattern: SignPatternChoice,
) -> Iterator[ShelvingAssignment]:
    forced_middle = _forced_middle(net, cls, sub)
    forced_upper = not pattern.m_finite(cls.index)

    options = []
    for group in _groups(net, cls, sub):
        choices = list(SHELF_ORDER)
        if any(j in forced_middle for j in group):
            choices = [s for s in choices if s is Shelf.MIDDLE]
        if forced_upper:
            choices = [s for s in choices if s is Shelf.UPPER]
        if not choices:
            logger.debug(f"SHELVING CONFLICT | class={cls.index} | group={group}")
            return
        options.append((group, choices))

    for combo in itertools.product(*(choices for _, choices in options)):
        shelves = {}
        for (group, _), shelf in zip(options, combo):
            for j in group:
                shelves[j] = shelf
        yield ShelvingAssignment(cls.index, tuple(sorted(shelves.items())))


def check_shelving_rules(
    net: ReactionNetwork,
    cls: FundamentalClass,
    sub: ColinkageSubnetwork,
    pattern: SignPatternChoice,
    assignment: ShelvingAssignment,
) -> list[str]:
    """Labels of the rules the assignment violates, checked independently."""
    shelf = dict(assignment.shelves)
    violated = []

    def flag(label):
        if label not in violated:
            violated.append(label)

    if set(shelf) != set(cls.reactions):
        flag("coverage")
        return violated
    for j in cls.reactions:
        rx = net.reactions[j]
        if not rx.is_reversible and shelf[j] is not Shelf.MIDDLE:
            flag("i")
        if not pattern.m_finite(cls.index) and shelf[j] is not Shelf.UPPER:
            flag("ii")
        partner = net.reverse_index(j)
        if partner is not None and partner in shelf and shelf[partner] is not shelf[j]:
            flag("iii")
        y = _reactant_index(net, j)
        for k in cls.reactions:
            if _reactant_index(net, k) == y and shelf[k] is not shelf[j]:
                flag("iv")
        t = sub.terminal_class_of(y)
        if t is None and shelf[j] is not Shelf.MIDDLE:
            flag("v")
        if t is not None:
            for k in cls.reactions:
                if sub.terminal_class_of(_reactant_index(net, k)) == t and shelf[k] is not shelf[j]:
                    flag("vi")
    if has_big_cycle(net, cls.members) and any(s is not Shelf.MIDDLE for s in shelf.values()):
        flag("vii")
    return violated


def shelving_options(net, classes, subs, pattern: SignPatternChoice) -> list[list[ShelvingAssignment]]:
    """Admissible assignments per nondegenerate class, in class order."""
    return [
        list(enumerate_class_shelvings(net, c, subs[c.index - 1], pattern))
        for c in classes.classes
        if not pattern.degenerate(c.index)
    ]


def enumerate_shelvings(net, classes, subs, pattern: SignPatternChoice) -> Iterator[tuple[ShelvingAssignment, ...]]:
    """Every combined shelving of the nondegenerate classes."""
    yield from itertools.product(*shelving_options(net, classes, subs, pattern))
