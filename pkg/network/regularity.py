"""
network/regularity.py

Ingredients of network regularity: cut pairs, positive dependence,
t-minimality.

Responsibilities:
- Decide whether two adjacent complexes form a cut pair
- Decide positive dependence of the reaction vectors exactly
- Bundle the three regularity conditions into a report
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Union

import networkx as nx

from errors import NetworkError
from linalg.constraints import LinearConstraint, Relation
from linalg.simplex import solve_feasibility
from network.complexes import Complex
from network.linkage import complex_graph, terminal_strong_linkage_classes
from network.numbers import is_t_minimal
from network.reactions import ReactionNetwork

logger = logging.getLogger(__name__)

ComplexRef = Union[int, Complex]


def _index(net: ReactionNetwork, ref: ComplexRef) -> int:
    return ref if isinstance(ref, int) else net.complex_index(ref)


def is_cut_pair(net: ReactionNetwork, first: ComplexRef, second: ComplexRef) -> bool:
    i, j = _index(net, first), _index(net, second)
    und = complex_graph(net).to_undirected()
    if not und.has_edge(i, j):
        raise NetworkError(
            f"complexes {net.complexes[i]} and {net.complexes[j]} are not adjacent"
        )
    und.remove_edge(i, j)
    return not nx.has_path(und, i, j)


def positive_dependence(net: ReactionNetwork) -> Optional[list[Fraction]]:
    """Positive alpha with sum alpha_j (reaction vector j) = 0, or None."""
    names = [f"a[{rx.id}]" for rx in net.reactions]
    cons = []
    for s in net.species:
        coeffs = {}
        for j, rx in enumerate(net.reactions):
            v = rx.vector().get(s)
            if v:
                coeffs[names[j]] = v
        if coeffs:
            cons.append(LinearConstraint.build(coeffs, Relation.EQ, 0))
    for name in names:
        cons.append(LinearConstraint.build({name: 1}, Relation.GT, 0))
    result = solve_feasibility(cons, names)
    if not result.feasible:
        return None
    return [result.sample[n] for n in names]


def is_positive_dependent(net: ReactionNetwork) -> bool:
    return positive_dependence(net) is not None


def terminal_reaction_pairs(net: ReactionNetwork) -> list[tuple[int, int]]:
    """Unordered adjacent complex pairs with both ends in terminal classes."""
    terminal = set()
    for cls in terminal_strong_linkage_classes(net):
        terminal |= cls
    pairs = []
    for rx in net.reactions:
        i, j = net.complex_index(rx.reactant), net.complex_index(rx.product)
        key = (min(i, j), max(i, j))
        if i in terminal and j in terminal and key not in pairs:
            pairs.append(key)
    return pairs


@dataclass
class RegularityReport:
    positive_dependent: bool
    t_minimal: bool
    cut_pair_condition: bool
    non_cut_pairs: list[tuple[str, str]] = field(default_factory=list)

    @property
    def regular(self) -> bool:
        return self.positive_dependent and self.t_minimal and self.cut_pair_condition

    def to_dict(self):
        out = asdict(self)
        out["non_cut_pairs"] = [list(p) for p in self.non_cut_pairs]
        out["regular"] = self.regular
        return out


def regularity_report(net: ReactionNetwork) -> RegularityReport:
    failing = [
        (net.complexes[i].format(net.species), net.complexes[j].format(net.species))
        for i, j in terminal_reaction_pairs(net)
        if not is_cut_pair(net, i, j)
    ]
    report = RegularityReport(
        positive_dependent=is_positive_dependent(net),
        t_minimal=is_t_minimal(net),
        cut_pair_condition=not failing,
        non_cut_pairs=failing,
    )
    logger.debug(
        f"REGULARITY | positive_dependent={report.positive_dependent} | "
        f"t_minimal={report.t_minimal} | cut_pairs={report.cut_pair_condition}"
    )
    return report
