"""
network/linkage.py

Linkage structure of the complex graph via networkx.

Responsibilities:
- Linkage classes (weak components), strong linkage classes (SCCs)
- Terminal strong linkage classes (sink components of the condensation)
- Same queries on any reaction subset, so fundamental subnetworks reuse them

Classes are returned as frozensets of complex indices, ordered by their
smallest member.
"""

from __future__ import annotations

from typing import Iterable, Optional

import networkx as nx

from network.reactions import ReactionNetwork

ComplexClass = frozenset


def complex_graph(net: ReactionNetwork, reactions: Optional[Iterable[int]] = None) -> nx.DiGraph:
    g = nx.DiGraph()
    if reactions is None:
        reactions = range(net.r)
        g.add_nodes_from(range(net.n))
    for j in reactions:
        rx = net.reactions[j]
        g.add_edge(net.complex_index(rx.reactant), net.complex_index(rx.product), reaction=j)
    return g


def _ordered(components) -> list[ComplexClass]:
    return sorted((frozenset(c) for c in components), key=min)


def linkage_classes(net: ReactionNetwork, reactions=None) -> list[ComplexClass]:
    return _ordered(nx.weakly_connected_components(complex_graph(net, reactions)))


def strong_linkage_classes(net: ReactionNetwork, reactions=None) -> list[ComplexClass]:
    return _ordered(nx.strongly_connected_components(complex_graph(net, reactions)))


def terminal_strong_linkage_classes(net: ReactionNetwork, reactions=None) -> list[ComplexClass]:
    g = complex_graph(net, reactions)
    cond = nx.condensation(g)
    terminal = [cond.nodes[c]["members"] for c in cond.nodes if cond.out_degree(c) == 0]
    return _ordered(terminal)


def has_big_cycle(net: ReactionNetwork, reactions: Iterable[int]) -> bool:
    """Any undirected cycle through at least three complexes."""
    und = complex_graph(net, reactions).to_undirected()
    # Antiparallel arrows collapse to one undirected edge, so any cycle left is >= 3.
    try:
        nx.find_cycle(und)
    except nx.NetworkXNoCycle:
        return False
    return True
