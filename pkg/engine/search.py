"""
engine/search.py

Branch enumeration driver (STEPS 1-17).

Responsibilities:
- Walk orientations -> sign patterns -> per-class shelvings -> per-vector
  ordering templates, depth first and in a fixed order
- Prune every node with the exact LP and count it against the budget
- Try the signatures of a leaf in tau order until one is witnessed
- Turn the first witnessed signature into a multistationary verdict
- Conclude monostationary only after an exhaustive, budget-respecting walk

This module MUST:
- Refuse PL-NDK systems (callers transform first)
- Never report monostationary when the budget ran out
- Be deterministic: same system and config, same verdict and witness
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from engine.assembly import (
    build_constraints,
    class_constraints,
    degenerate_constraints,
    equation_groups,
    mu_name,
    p0_constraints,
    template_constraints,
)
from engine.classes import ColinkageSubnetwork, FundamentalClassSet, colinkage_subnetworks, fundamental_classes
from engine.config_loader import AnalysisConfig
from engine.orientation import Orientation, choose_orientation, enumerate_orientations, realign_orientation
from engine.partition import early_exit, orientation_matrix, partition_equivalence_classes
from engine.patterns import SignPatternChoice, enumerate_sign_patterns
from engine.prechecks import run_prechecks
from engine.shelving import ShelvingAssignment, enumerate_class_shelvings, shelving_options
from engine.signature import Signature, SignCompatCache, iter_signatures, signature_from_hint
from engine.templates import Template, m_constraints
from engine.witness import Witness, construct_witness, kappa_rows, pair_signs, validate_kappa
from errors import KineticsError, WitnessError
from kinetics.system import KineticSystem, TMatrix, is_rdk, t_matrix
from linalg.constraints import ConstraintSystem, format_rational
from linalg.rational import as_fraction, orthocomplement_restricted
from linalg.sign_compat import sign_compatible_sigma
from linalg.simplex import solve_feasibility
from network.matrices import stoichiometric_matrix
from network.reactions import ReactionNetwork
from verification.checks import VerificationReport, check_witness

logger = logging.getLogger(__name__)


class VerdictStatus(Enum):
    MULTISTATIONARY = "multistationary"
    MONOSTATIONARY = "monostationary"
    INCONCLUSIVE = "inconclusive"


# ============================================================
# RECORDS
# ============================================================

@dataclass
class SearchStats:
    orientations: int = 0
    patterns: int = 0
    nodes: int = 0
    leaves: int = 0
    signatures: int = 0
    pre_signatures: int = 0
    budget: int = 0

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class BranchRecord:
    """One branch of the walk, with everything the report displays."""
    network: ReactionNetwork
    classes: FundamentalClassSet
    subnetworks: tuple[ColinkageSubnetwork, ...]
    pattern: SignPatternChoice
    shelvings: tuple[ShelvingAssignment, ...]
    templates: tuple[Template, ...]
    constraints: ConstraintSystem

    def equation_groups(self):
        return equation_groups(self.constraints)

    def partition_rows(self) -> list[dict]:
        net = self.network

        def ids(js):
            return [net.reactions[j].id for j in js]

        partition = self.classes.partition
        rows = [{
            "class": 0,
            "members": ids(self.classes.c0.members),
            "reactions": ids(self.classes.c0.reactions),
            "representative": None,
            "reversible": self.classes.c0.reversible,
            "nonterminal": [],
            "terminal": [],
        }]
        for cls, sub in zip(self.classes.classes, self.subnetworks):
            rows.append({
                "class": cls.index,
                "members": ids(cls.members),
                "reactions": ids(cls.reactions),
                "representative": net.reactions[cls.representative].id,
                "reversible": cls.reversible,
                "alpha": {net.reactions[j].id: format_rational(partition.alpha[j]) for j in cls.members},
                "nonterminal": [sorted(str(net.complexes[c]) for c in s) for s in sub.nonterminal],
                "terminal": [sorted(str(net.complexes[c]) for c in s) for s in sub.terminal],
            })
        return rows

    def to_dict(self):
        net = self.network
        return {
            "orientation": self.classes.partition.orientation.ids(net),
            "partition": self.partition_rows(),
            "pattern": self.pattern.to_dict(),
            "shelvings": [s.format(net) for s in self.shelvings],
            "templates": [[a.format() for a in t] for t in self.templates],
            "constraints": self.constraints.format(labels=True),
            "equation_groups": [
                {"M": m_vars, "expressions": exprs} for m_vars, exprs in self.equation_groups()
            ],
        }


@dataclass
class Verdict:
    status: VerdictStatus
    reason: str = ""
    signature: Optional[Signature] = None
    witness: Optional[Witness] = None
    verification: Optional[VerificationReport] = None
    branch: Optional[BranchRecord] = None
    display: Optional[BranchRecord] = None
    stats: SearchStats = field(default_factory=SearchStats)
    trace: list = field(default_factory=list)

    @property
    def decided(self) -> bool:
        return self.status is not VerdictStatus.INCONCLUSIVE

    @property
    def exit_code(self) -> int:
        return 0 if self.decided else 2


class _Decided(Exception):
    def __init__(self, verdict: Verdict):
        super().__init__(verdict.status.value)
        self.verdict = verdict


class _BudgetExhausted(Exception):
    pass


# ============================================================
# DRIVER
# ============================================================

class _Search:
    def __init__(
        self,
        system: KineticSystem,
        config: AnalysisConfig,
        *,
        mu_hint: Optional[Sequence[Fraction]],
        sigma: Optional[Sequence],
        kappa: Optional[Sequence],
        p: Fraction,
        preferred: Optional[Sequence[str]],
    ):
        self.system = system
        self.net = system.network
        self.config = config
        self.mu_hint = mu_hint
        self.sigma = sigma
        self.kappa = kappa
        self.p = p
        self.preferred = preferred
        self.T: TMatrix = t_matrix(system)
        self.N = stoichiometric_matrix(self.net)
        self.species = list(self.net.species)
        self.stats = SearchStats(budget=config.max_branches)
        self.trace: list[tuple[str, str]] = []
        self.compat = SignCompatCache(self.N)
        self.display: Optional[BranchRecord] = None
        self.pre_signature: Optional[tuple[Signature, BranchRecord]] = None

    # --------------------------------------------------------
    # bookkeeping
    # --------------------------------------------------------

    def _note(self, step: str, detail: str) -> None:
        if self.config.trace:
            self.trace.append((step, detail))

    def _verdict(self, status: VerdictStatus, reason: str, **extra) -> Verdict:
        return Verdict(
            status=status, reason=reason, display=self.display,
            stats=self.stats, trace=self.trace, **extra,
        )

    def _spend(self) -> None:
        if self.stats.nodes >= self.config.max_branches:
            raise _BudgetExhausted()
        self.stats.nodes += 1

    def _feasible(self, rows) -> bool:
        self._spend()
        return solve_feasibility(rows).feasible

    # --------------------------------------------------------
    # walk
    # --------------------------------------------------------

    def orientations(self) -> Iterator[Orientation]:
        if self.config.explore_orientations:
            yield from enumerate_orientations(self.net, self.preferred)
        else:
            yield choose_orientation(self.net, self.preferred)

    def run(self) -> Verdict:
        if self.config.run_prechecks:
            fired = run_prechecks(self.system)
            if fired is not None:
                name, reason = fired
                self._note("precheck", f"{name}: {reason}")
                return self._verdict(VerdictStatus.MONOSTATIONARY, f"precheck {name}: {reason}")

        visited: set[Orientation] = set()
        try:
            for orientation in self.orientations():
                self.walk_orientation(orientation, visited)
        except _Decided as decided:
            return decided.verdict
        except _BudgetExhausted:
            logger.warning(f"BUDGET EXHAUSTED | max_branches={self.config.max_branches}")
            return self._inconclusive("budget")

        if self.pre_signature is not None:
            return self._inconclusive("pre-signature")
        if self.mu_hint is not None:
            return self._verdict(VerdictStatus.INCONCLUSIVE, "mu hint fits no branch")
        return self._verdict(
            VerdictStatus.MONOSTATIONARY, "no branch admits a sign-compatible signature"
        )

    def _inconclusive(self, reason: str) -> Verdict:
        sig, branch = self.pre_signature if self.pre_signature else (None, None)
        return self._verdict(VerdictStatus.INCONCLUSIVE, reason, signature=sig, branch=branch)

    def walk_orientation(self, orientation: Orientation, visited: set) -> None:
        net = self.net
        partition = partition_equivalence_classes(net, orientation)
        reason = early_exit(net, partition)
        if reason:
            self._note("partition", f"early exit: {reason}")
            raise _Decided(self._verdict(VerdictStatus.MONOSTATIONARY, reason))

        realigned = realign_orientation(net, orientation, partition)
        if realigned != orientation:
            self._note("realign", ",".join(realigned.ids(net)))
            orientation = realigned
            partition = partition_equivalence_classes(net, orientation)
        if orientation in visited:
            return
        visited.add(orientation)
        self.stats.orientations += 1
        self._note("orientation", ",".join(orientation.ids(net)))

        classes = fundamental_classes(partition, net)
        subs = tuple(colinkage_subnetworks(classes, net))
        positions = [orientation.position(j) for j in classes.W]
        basis = orthocomplement_restricted(orientation_matrix(net, orientation), positions, len(orientation))
        self._note("partition", f"p0={len(partition.p0)} | w={partition.w} | q={len(basis)}")

        for pattern in enumerate_sign_patterns(classes):
            self.stats.patterns += 1
            self._note("pattern", pattern.format())
            self.walk_pattern(classes, subs, basis, pattern)

    def walk_pattern(self, classes, subs, basis, pattern: SignPatternChoice) -> None:
        net, T = self.net, self.T
        nondegenerate = [c for c in classes.classes if not pattern.degenerate(c.index)]
        options = shelving_options(net, classes, subs, pattern)
        if any(not o for o in options):
            self._note("shelving", "no admissible shelving")
            return
        per_vector = m_constraints(basis, classes, pattern)
        if any(not t for t in per_vector):
            self._note("templates", "some basis vector admits no ordering")
            return

        base = p0_constraints(T, net, classes) + degenerate_constraints(T, net, classes, pattern)
        if not self._feasible(base):
            return
        depth = len(nondegenerate)

        def record(rows, shelvings, templates) -> BranchRecord:
            return BranchRecord(
                network=net, classes=classes, subnetworks=subs, pattern=pattern,
                shelvings=tuple(shelvings), templates=tuple(templates),
                constraints=ConstraintSystem(rows, [mu_name(s) for s in self.species]),
            )

        def descend(level, rows, shelvings, templates):
            if level == depth and self.display is None:
                self.display = record(rows, shelvings, templates)
            if level < depth:
                cls = nondegenerate[level]
                for assignment in options[level]:
                    extra = class_constraints(T, net, cls, pattern, assignment)
                    if extra is None or not self._feasible(rows + extra):
                        continue
                    descend(level + 1, rows + extra, shelvings + [assignment], templates)
                return
            j = level - depth
            if j < len(per_vector):
                for template in per_vector[j]:
                    extra = template_constraints([template])
                    if not self._feasible(rows + extra):
                        continue
                    descend(level + 1, rows + extra, shelvings, templates + [template])
                return
            self.leaf(record(rows, shelvings, templates))

        descend(0, base, [], [])

    # --------------------------------------------------------
    # leaves
    # --------------------------------------------------------

    def leaf(self, branch: BranchRecord) -> None:
        self.stats.leaves += 1
        pairs = pair_signs(self.net, branch.classes, branch.pattern)
        constraints = branch.constraints
        if self.kappa is not None:
            rows = kappa_rows(self.system, self.T, self.kappa, pairs)
            if rows is None:
                self._note("kappa", "g signs contradict the supplied kappa")
                return
            if self.mu_hint is None:
                constraints = constraints.copy()
                constraints.extend(rows)

        if self.mu_hint is not None:
            hinted = signature_from_hint(
                constraints, self.species, self.mu_hint, branch.pattern,
                band=self.config.hint_tol,
            )
            candidates = iter(() if hinted is None else (hinted,))
        else:
            candidates = iter_signatures(
                constraints, self.species, self.N, self.T, branch.pattern, compat=self.compat
            )
        for signature in candidates:
            self._spend()
            self.try_signature(signature, branch, pairs)

    def try_signature(self, signature: Signature, branch: BranchRecord, pairs) -> None:
        self.stats.signatures += 1
        self._note("signature", ", ".join(format_rational(v) for v in signature.mu))

        kappa_tol = self.config.kappa_tol
        if signature.hinted:
            kappa_tol = max(kappa_tol, self.config.hint_tol)
        witness = construct_witness(
            self.system, self.T, signature,
            sigma=self.sigma, p=self.p, kappa=self.kappa, kappa_tol=kappa_tol, pairs=pairs,
        )
        if witness is None:
            self._keep_pre_signature(signature, branch)
            return

        report = check_witness(
            witness.rated_system(self.system), witness.c_star, witness.c_double_star,
            sigma=witness.sigma, tol=self.config.tol,
        )
        if not report.passed:
            logger.info(f"WITNESS REJECTED | {report.to_dict()}")
            self._keep_pre_signature(signature, branch)
            return

        self._note("witness", "verified")
        raise _Decided(self._verdict(
            VerdictStatus.MULTISTATIONARY, "verified witness",
            signature=signature, witness=witness, verification=report, branch=branch,
        ))

    def _keep_pre_signature(self, signature: Signature, branch: BranchRecord) -> None:
        self.stats.pre_signatures += 1
        if self.pre_signature is None:
            self.pre_signature = (signature, branch)


def _check_hint(system: KineticSystem, mu_hint, sigma) -> list[Fraction]:
    net = system.network
    hint = [as_fraction(v) for v in mu_hint]
    if len(hint) != net.m:
        raise WitnessError(f"mu hint has {len(hint)} entries for {net.m} species")
    if all(v == 0 for v in hint):
        raise WitnessError("mu hint must be nonzero")
    if sigma is None and sign_compatible_sigma(hint, stoichiometric_matrix(net)) is None:
        raise WitnessError("mu hint is not sign-compatible with the stoichiometric subspace")
    return hint


def analyze(
    system: KineticSystem,
    config: Optional[AnalysisConfig] = None,
    *,
    mu_hint: Optional[Sequence] = None,
    sigma: Optional[Sequence] = None,
    kappa: Optional[Sequence] = None,
    p=None,
    preferred_orientation: Optional[Sequence[str]] = None,
) -> Verdict:
    """
    Decide the capacity for multistationarity of a PL-RDK system.

    With `mu_hint` the signature search is replaced by evaluating each
    branch at the given mu; `sigma`, `kappa` and `p` override the
    corresponding witness choices.
    """
    config = config or AnalysisConfig()
    if not is_rdk(system):
        raise KineticsError("analyze needs a PL-RDK system; apply the CF-RM transform first")
    hint = _check_hint(system, mu_hint, sigma) if mu_hint is not None else None
    if kappa is not None:
        kappa = validate_kappa(system, kappa)
    search = _Search(
        system, config,
        mu_hint=hint, sigma=sigma, kappa=kappa,
        p=as_fraction(p) if p is not None else config.p,
        preferred=preferred_orientation,
    )
    logger.info(
        f"ANALYZE START | species={system.network.m} | reactions={system.network.r} | "
        f"budget={config.max_branches}"
    )
    verdict = search.run()
    logger.info(
        f"ANALYZE DONE | verdict={verdict.status.value} | reason={verdict.reason} | "
        f"nodes={verdict.stats.nodes} | leaves={verdict.stats.leaves}"
    )
    return verdict


def constraint_display(system: KineticSystem, preferred_orientation=None) -> Optional[BranchRecord]:
    """First fully shelved branch of the default walk, without solving it."""
    net = system.network
    T = t_matrix(system)
    orientation = choose_orientation(net, preferred_orientation)
    partition = partition_equivalence_classes(net, orientation)
    orientation = realign_orientation(net, orientation, partition)
    partition = partition_equivalence_classes(net, orientation)
    classes = fundamental_classes(partition, net)
    subs = tuple(colinkage_subnetworks(classes, net))
    for pattern in enumerate_sign_patterns(classes):
        shelvings = {}
        for cls in classes.classes:
            if pattern.degenerate(cls.index):
                continue
            first = next(iter(enumerate_class_shelvings(net, cls, subs[cls.index - 1], pattern)), None)
            if first is None:
                break
            shelvings[cls.index] = first
        else:
            constraints = build_constraints(T, net, classes, shelvings, pattern)
            if constraints is None:
                continue
            return BranchRecord(
                network=net, classes=classes, subnetworks=subs, pattern=pattern,
                shelvings=tuple(shelvings.values()), templates=(), constraints=constraints,
            )
    return None
