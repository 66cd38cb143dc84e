"""
engine/orientation.py

Orientations: one direction per reversible pair plus every irreversible
reaction.

Responsibilities:
- Default / preferred orientation (STEP 1)
- Flips and the realignment pass (STEP 5)
- Deterministic enumeration of the full orientation space

An orientation lists reaction indices in slot order: one slot per
irreversible reaction or reversible pair, in network order.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from errors import NetworkError
from network.reactions import ReactionNetwork

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Orientation:
    reactions: tuple[int, ...]

    def __contains__(self, index: int) -> bool:
        return index in self.reactions

    def __len__(self) -> int:
        return len(self.reactions)

    def position(self, index: int) -> int:
        return self.reactions.index(index)

    def ids(self, net: ReactionNetwork) -> list[str]:
        return [net.reactions[j].id for j in self.reactions]


def slots(net: ReactionNetwork) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    placed: set[int] = set()
    for j in range(net.r):
        if j in placed:
            continue
        partner = net.reverse_index(j)
        if partner is None:
            out.append((j,))
            placed.add(j)
        else:
            out.append((j, partner))
            placed.update((j, partner))
    return out


def choose_orientation(net: ReactionNetwork, preferred: Optional[Iterable[str]] = None) -> Orientation:
    """Forward member of each pair unless `preferred` names the reverse one."""
    chosen_ids = set(preferred or ())
    unknown = [rid for rid in chosen_ids if rid not in {rx.id for rx in net.reactions}]
    if unknown:
        raise NetworkError(f"orientation names unknown reactions: {', '.join(sorted(unknown))}")
    picked = []
    for slot in slots(net):
        if len(slot) == 2 and net.reactions[slot[1]].id in chosen_ids:
            picked.append(slot[1])
        else:
            picked.append(slot[0])
    return Orientation(tuple(picked))


def flip(net: ReactionNetwork, orientation: Orientation, indices: Iterable[int]) -> Orientation:
    swap = set(indices)
    out = []
    for j in orientation.reactions:
        partner = net.reverse_index(j)
        if j in swap and partner is not None:
            out.append(partner)
        else:
            out.append(j)
    return Orientation(tuple(out))


def realign_orientation(net: ReactionNetwork, orientation: Orientation, partition) -> Orientation:
    """
    Swap every reversible reaction whose kernel row is a negative multiple
    of its class representative. Flipping negates one kernel coordinate, so
    the classes are unchanged and one pass suffices.
    """
    negatives = [
        j for j, alpha in partition.alpha.items()
        if alpha < 0 and net.reactions[j].is_reversible
    ]
    if not negatives:
        return orientation
    logger.debug(
        f"REALIGN | flipped={','.join(net.reactions[j].id for j in negatives)}"
    )
    return flip(net, orientation, negatives)


def enumerate_orientations(
    net: ReactionNetwork, preferred: Optional[Iterable[str]] = None
) -> Iterator[Orientation]:
    """Preferred orientation first, then the rest in binary-counter order."""
    first = choose_orientation(net, preferred)
    yield first
    pairs = [s for s in slots(net) if len(s) == 2]
    singles = {s[0] for s in slots(net) if len(s) == 1}
    for choice in itertools.product((0, 1), repeat=len(pairs)):
        picked = set(singles)
        picked.update(pair[bit] for pair, bit in zip(pairs, choice))
        candidate = Orientation(tuple(
            s[0] if len(s) == 1 else (s[0] if s[0] in picked else s[1]) for s in slots(net)
        ))
        if candidate != first:
            yield candidate
