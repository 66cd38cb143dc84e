"""
engine/patterns.py

Sign patterns for g_W and h_W (STEP 8).

Nonreversible classes are pinned to (+,+). Reversible classes range over
{+,-,0}^2. A pattern is kept only if, separately for g and for h, some
vector of Ker L_O restricted to W carries exactly those signs.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator

from engine.classes import FundamentalClassSet
from linalg.constraints import LinearConstraint, Relation
from linalg.simplex import solve_feasibility

logger = logging.getLogger(__name__)

SIGN_ORDER = (1, -1, 0)
_SYMBOL = {1: "+", -1: "-", 0: "0"}


@dataclass(frozen=True)
class SignPatternChoice:
    g: tuple[int, ...]
    h: tuple[int, ...]

    def g_sign(self, class_index: int) -> int:
        return self.g[class_index - 1]

    def h_sign(self, class_index: int) -> int:
        return self.h[class_index - 1]

    def degenerate(self, class_index: int) -> bool:
        return self.g_sign(class_index) == 0

    def m_finite(self, class_index: int) -> bool:
        """rho = h/g > 0, so M = ln(rho) is a real number."""
        return self.g_sign(class_index) * self.h_sign(class_index) > 0

    def format(self) -> str:
        return " ".join(f"({_SYMBOL[a]},{_SYMBOL[b]})" for a, b in zip(self.g, self.h))

    def to_dict(self):
        return {"g": [_SYMBOL[v] for v in self.g], "h": [_SYMBOL[v] for v in self.h]}


class KernelSignOracle:
    """Memoized test: does some kernel vector have these signs on W?"""

    def __init__(self, classes: FundamentalClassSet):
        partition = classes.partition
        self.kernel = partition.kernel
        self.positions = [partition.orientation.position(j) for j in classes.W]
        self._cache: dict[tuple[int, ...], bool] = {}

    def admits(self, signs: tuple[int, ...]) -> bool:
        if signs in self._cache:
            return self._cache[signs]
        names = [f"lam[{l}]" for l in range(len(self.kernel))]
        cons = []
        for pos, sign in zip(self.positions, signs):
            coeffs = {names[l]: v[pos] for l, v in enumerate(self.kernel) if v[pos] != 0}
            rel = Relation.GT if sign > 0 else Relation.LT if sign < 0 else Relation.EQ
            cons.append(LinearConstraint.build(coeffs, rel, 0))
        ok = solve_feasibility(cons, names).feasible
        self._cache[signs] = ok
        return ok


def enumerate_sign_patterns(classes: FundamentalClassSet) -> Iterator[SignPatternChoice]:
    oracle = KernelSignOracle(classes)
    per_class = []
    for c in classes.classes:
        if c.reversible:
            per_class.append(list(itertools.product(SIGN_ORDER, SIGN_ORDER)))
        else:
            per_class.append([(1, 1)])

    for combo in itertools.product(*per_class):
        g = tuple(pair[0] for pair in combo)
        h = tuple(pair[1] for pair in combo)
        if not oracle.admits(g) or not oracle.admits(h):
            continue
        yield SignPatternChoice(g, h)
