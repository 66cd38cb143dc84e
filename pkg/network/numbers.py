"""
network/numbers.py

Network numbers: the structural counts reported by `info`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from linalg.rational import rank as exact_rank
from network.linkage import (
    linkage_classes,
    strong_linkage_classes,
    terminal_strong_linkage_classes,
)
from network.matrices import stoichiometric_matrix
from network.reactions import ReactionNetwork


@dataclass(frozen=True)
class NetworkNumbers:
    m: int
    n: int
    n_r: int
    r: int
    r_irrev: int
    l: int  # noqa: E741
    sl: int
    t: int
    s: int
    deficiency: int

    def to_dict(self):
        return asdict(self)


def rank(net: ReactionNetwork) -> int:
    return exact_rank(stoichiometric_matrix(net), net.r)


def deficiency(net: ReactionNetwork) -> int:
    return net.n - len(linkage_classes(net)) - rank(net)


def is_weakly_reversible(net: ReactionNetwork) -> bool:
    return len(strong_linkage_classes(net)) == len(linkage_classes(net))


def is_t_minimal(net: ReactionNetwork) -> bool:
    return len(terminal_strong_linkage_classes(net)) == len(linkage_classes(net))


def network_numbers(net: ReactionNetwork) -> NetworkNumbers:
    l = len(linkage_classes(net))  # noqa: E741
    s = rank(net)
    return NetworkNumbers(
        m=net.m,
        n=net.n,
        n_r=net.n_r,
        r=net.r,
        r_irrev=sum(1 for rx in net.reactions if not rx.is_reversible),
        l=l,
        sl=len(strong_linkage_classes(net)),
        t=len(terminal_strong_linkage_classes(net)),
        s=s,
        deficiency=net.n - l - s,
    )
