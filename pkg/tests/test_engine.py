import itertools
import math
import random
from fractions import Fraction

import pytest

from data.models import load_model
from engine.assembly import equation_groups, format_group
from engine.classes import colinkage_subnetworks, fundamental_classes
from engine.config_loader import AnalysisConfig
from engine.orientation import choose_orientation, enumerate_orientations, realign_orientation, slots
from engine.partition import early_exit, orientation_matrix, partition_equivalence_classes
from engine.patterns import enumerate_sign_patterns
from engine.prechecks import precheck_inflow_outflow, run_prechecks
import engine.search as search_module
from engine.search import VerdictStatus, analyze, constraint_display
from engine.shelving import (
    Shelf,
    ShelvingAssignment,
    check_shelving_rules,
    enumerate_class_shelvings,
    enumerate_shelvings,
    shelving_options,
)
from engine.signature import iter_signatures
from engine.templates import OrderAtom, degenerate_sum_signs, resolve_template
from engine.witness import (
    PairSigns,
    closed_form_defects,
    kappa_rows,
    pair_closed_form,
    pair_signs,
    reactant_exponentials,
)
from errors import KineticsError, NetworkError, WitnessError
from kinetics.cfrm import cf_rm_transform
from kinetics.system import KineticSystem, t_matrix
from linalg.constraints import Relation
from linalg.rational import orthocomplement_restricted
from network.complexes import Complex
from network.matrices import stoichiometric_matrix
from network.reactions import build_network
from tests.oracles import brute_force_partition

_SEED = 99
_RANDOM_NETWORKS = 50
_SHELVING_CAP = 40
_PATTERN_CAP = 30
_SPECIES = ("A", "B", "C", "D")

# STEP-10 display of the yeast model: middle-shelf expressions per group
_ERMOG_GROUPS = {
    frozenset({"-0.2344*mu[X2]", "0.7464*mu[X1] + 0.0243*mu[X5]"}),
    frozenset({"8.6107*mu[X2]"}),
    frozenset({"0.7318*mu[X2] - 0.3941*mu[X5]"}),
    frozenset({"0.6159*mu[X3] + 0.1308*mu[X5]", "0.05*mu[X3] + 0.533*mu[X4] - 0.0822*mu[X5]"}),
    frozenset({"mu[X5]"}),
}
_ERMOG_GROUP_SIZES = [1, 1, 2, 3, 4]


def _c(**coefficients):
    return Complex.from_mapping(coefficients)


def _random_network(rng):
    specs, seen = [], set()
    target = rng.randint(2, 6)
    while len(specs) < target:
        reactant = Complex.from_mapping({s: rng.randint(0, 2) for s in _SPECIES if rng.random() < 0.4})
        product = Complex.from_mapping({s: rng.randint(0, 2) for s in _SPECIES if rng.random() < 0.4})
        if reactant == product or (reactant, product) in seen or (product, reactant) in seen:
            continue
        seen.add((reactant, product))
        specs.append((reactant, product, rng.random() < 0.4))
    return build_network(specs)


def _corpus_networks():
    out = []
    for name in ("ermog-yeast", "heck-carbon", "anderies", "defone-cutpair"):
        out.append(load_model(name).system.network)
    out.append(cf_rm_transform(load_model("ndk-defone").system)[0].network)
    return out


# ============================================================
# ORIENTATIONS
# ============================================================

def test_choose_orientation_prefers_named_reverse():
    net = load_model("heck-carbon").system.network
    default = choose_orientation(net)
    preferred = choose_orientation(net, ["R4"])
    assert "R3" in default.ids(net) and "R4" not in default.ids(net)
    assert "R4" in preferred.ids(net) and "R3" not in preferred.ids(net)
    assert len(preferred) == len(slots(net)) == 8


def test_choose_orientation_rejects_unknown_ids():
    net = load_model("anderies").system.network
    with pytest.raises(NetworkError, match="unknown reactions"):
        choose_orientation(net, ["R99"])


def test_enumerate_orientations_covers_every_choice_once():
    net = load_model("heck-carbon").system.network
    seen = list(enumerate_orientations(net, ["R4"]))
    assert seen[0] == choose_orientation(net, ["R4"])
    assert len(seen) == len(set(seen)) == 4


def test_realignment_leaves_no_negative_reversible_alpha():
    rng = random.Random(_SEED)
    for _ in range(_RANDOM_NETWORKS):
        net = _random_network(rng)
        orientation = choose_orientation(net)
        partition = partition_equivalence_classes(net, orientation)
        realigned = realign_orientation(net, orientation, partition)
        again = partition_equivalence_classes(net, realigned)
        assert {frozenset(realigned.position(j) for j in members) for members in again.classes} == {
            frozenset(orientation.position(j) for j in members) for members in partition.classes
        }
        assert all(
            alpha > 0 for j, alpha in again.alpha.items() if net.reactions[j].is_reversible
        )


# ============================================================
# PARTITION
# ============================================================

def test_partition_matches_brute_force_oracle():
    rng = random.Random(_SEED + 1)
    for _ in range(_RANDOM_NETWORKS):
        net = _random_network(rng)
        orientation = choose_orientation(net)
        partition = partition_equivalence_classes(net, orientation)
        p0, classes = brute_force_partition(orientation_matrix(net, orientation), len(orientation))
        at = orientation.reactions
        assert set(partition.p0) == {at[pos] for pos in p0}
        assert {frozenset(c) for c in partition.classes} == {
            frozenset(at[pos] for pos in cls) for cls in classes
        }


def test_representative_prefers_irreversible_and_has_unit_alpha():
    net = load_model("heck-carbon").system.network
    partition = partition_equivalence_classes(net, choose_orientation(net, ["R4"]))
    for members, rep in zip(partition.classes, partition.representatives):
        assert partition.alpha[rep] == 1
        if any(not net.reactions[j].is_reversible for j in members):
            assert not net.reactions[rep].is_reversible


def test_early_exit_for_irreversible_reaction_in_p0():
    net = build_network([(_c(), _c(A=1)), (_c(A=1), _c(B=1))])
    partition = partition_equivalence_classes(net, choose_orientation(net))
    assert partition.p0 == (0, 1)
    assert "lies in P0" in early_exit(net, partition)


def test_fundamental_classes_close_reversible_pairs():
    net = load_model("anderies").system.network
    partition = partition_equivalence_classes(net, choose_orientation(net))
    classes = fundamental_classes(partition, net)
    # R3 (A2 -> A3) is the only reaction of P0; its reverse joins C0
    assert partition.p0 == (net.reaction_index("R3"),)
    assert classes.c0.reactions == (net.reaction_index("R3"), net.reaction_index("R4"))
    orientation = partition.orientation
    positions = [orientation.position(j) for j in classes.W]
    assert orthocomplement_restricted(orientation_matrix(net, orientation), positions, len(orientation)) == []


# ============================================================
# PATTERNS, SHELVINGS, TEMPLATES
# ============================================================

def test_irreversible_classes_take_positive_pattern():
    net = load_model("ermog-yeast").system.network
    classes = fundamental_classes(partition_equivalence_classes(net, choose_orientation(net)), net)
    patterns = list(enumerate_sign_patterns(classes))
    assert len(patterns) == 1
    assert set(patterns[0].g) == set(patterns[0].h) == {1}


def _shelvings_of(net):
    orientation = choose_orientation(net)
    partition = partition_equivalence_classes(net, orientation)
    orientation = realign_orientation(net, orientation, partition)
    classes = fundamental_classes(partition_equivalence_classes(net, orientation), net)
    subs = colinkage_subnetworks(classes, net)
    for pattern in itertools.islice(enumerate_sign_patterns(classes), _PATTERN_CAP):
        for cls, sub in zip(classes.classes, subs):
            if pattern.degenerate(cls.index):
                continue
            for assignment in itertools.islice(
                enumerate_class_shelvings(net, cls, sub, pattern), _SHELVING_CAP
            ):
                yield cls, sub, pattern, assignment


def test_emitted_shelvings_pass_every_rule():
    rng = random.Random(_SEED + 2)
    networks = _corpus_networks() + [_random_network(rng) for _ in range(_RANDOM_NETWORKS)]
    emitted = 0
    for net in networks:
        if early_exit(net, partition_equivalence_classes(net, choose_orientation(net))):
            continue
        for cls, sub, pattern, assignment in _shelvings_of(net):
            assert check_shelving_rules(net, cls, sub, pattern, assignment) == []
            emitted += 1
    assert emitted > 0


def test_combined_shelvings_are_the_product_of_class_options():
    net = load_model("anderies").system.network
    orientation = choose_orientation(net)
    classes = fundamental_classes(partition_equivalence_classes(net, orientation), net)
    subs = colinkage_subnetworks(classes, net)
    for pattern in enumerate_sign_patterns(classes):
        options = shelving_options(net, classes, subs, pattern)
        combined = list(enumerate_shelvings(net, classes, subs, pattern))
        expected = 1
        for o in options:
            expected *= len(o)
        assert len(combined) == expected
        for combo in combined:
            assert [a.class_index for a in combo] == [
                c.index for c in classes.classes if not pattern.degenerate(c.index)
            ]


def test_shelving_rule_check_flags_irreversible_off_middle():
    net = load_model("ermog-yeast").system.network
    cls, sub, pattern, assignment = next(_shelvings_of(net))
    moved = ShelvingAssignment(
        assignment.class_index, tuple((j, Shelf.UPPER) for j, _ in assignment.shelves)
    )
    assert check_shelving_rules(net, cls, sub, pattern, assignment) == []
    assert "i" in check_shelving_rules(net, cls, sub, pattern, moved)


def test_degenerate_sum_signs():
    assert degenerate_sum_signs([]) == {0}
    assert degenerate_sum_signs([1, 0, 1]) == {1}
    assert degenerate_sum_signs([-1]) == {-1}
    assert degenerate_sum_signs([1, -1]) == {1, -1, 0}


def test_resolve_template_with_minus_infinity():
    finite = {1: True, 2: False, 3: True}.__getitem__
    assert resolve_template((OrderAtom(2, Relation.LT, 1),), finite) == ()
    assert resolve_template((OrderAtom(1, Relation.LT, 2),), finite) is None
    assert resolve_template((OrderAtom(1, Relation.EQ, 2),), finite) is None
    assert resolve_template((OrderAtom(3, Relation.GT, 1),), finite) == (OrderAtom(1, Relation.LT, 3),)


# ============================================================
# DISPLAY
# ============================================================

def test_ermog_constraint_display_groups():
    system = load_model("ermog-yeast").system
    branch = constraint_display(system)
    assert branch is not None
    groups = branch.equation_groups()
    assert {frozenset(exprs) for _, exprs in groups} == _ERMOG_GROUPS
    assert sorted(len(m_vars) for m_vars, _ in groups) == _ERMOG_GROUP_SIZES
    assert all(s.on(Shelf.MIDDLE) for s in branch.shelvings)


def test_format_group_chains_expressions_and_m_values():
    assert format_group((["M[1]", "M[2]"], ["a", "b"])) == "a = M[1] = M[2] = b"
    assert format_group((["M[3]"], [])) == "M[3]"


def test_equation_groups_only_join_middle_equalities():
    branch = constraint_display(load_model("ermog-yeast").system)
    grouped = {m for m_vars, _ in equation_groups(branch.constraints) for m in m_vars}
    assert grouped == {f"M[{c.index}]" for c in branch.classes.classes}


# ============================================================
# PRECHECKS AND VERDICTS
# ============================================================

def _isolated_inflow():
    net = build_network([(_c(), _c(A=1)), (_c(B=1), _c(C=1), True)])
    return KineticSystem.mass_action(net)


def test_inflow_precheck_agrees_with_full_analysis():
    system = _isolated_inflow()
    assert "inflow R1" in precheck_inflow_outflow(system)
    quick = analyze(system)
    full = analyze(system, AnalysisConfig(run_prechecks=False))
    assert quick.status is VerdictStatus.MONOSTATIONARY
    assert quick.reason.startswith("precheck inflow_outflow")
    assert full.status is VerdictStatus.MONOSTATIONARY


def test_positive_dependence_precheck():
    net = build_network([(_c(A=1), _c(B=1)), (_c(B=1), _c(C=1))])
    assert run_prechecks(KineticSystem.mass_action(net))[0] == "positive_dependence"


def test_prechecks_stay_silent_on_cycles():
    net = build_network([(_c(A=1), _c(B=1), True)])
    assert run_prechecks(KineticSystem.mass_action(net)) is None


def test_analyze_refuses_ndk():
    with pytest.raises(KineticsError, match="CF-RM"):
        analyze(load_model("ndk-defone").system)


def test_budget_exhaustion_is_inconclusive():
    verdict = analyze(load_model("heck-carbon").system, AnalysisConfig(max_branches=1))
    assert verdict.status is VerdictStatus.INCONCLUSIVE
    assert verdict.reason == "budget"
    assert verdict.exit_code == 2
    assert verdict.stats.nodes <= 1


def test_trace_records_steps():
    verdict = analyze(load_model("anderies").system, AnalysisConfig(trace=True))
    steps = {step for step, _ in verdict.trace}
    assert {"orientation", "partition", "pattern"} <= steps


def test_analysis_is_deterministic():
    system = load_model("anderies").system
    first, second = analyze(system), analyze(system)
    assert first.status is second.status
    assert first.witness == second.witness
    assert first.stats == second.stats


# ============================================================
# SIGNATURES AND WITNESSES
# ============================================================

def _ndk_transform():
    return cf_rm_transform(load_model("ndk-defone").system)[0]


def _assert_branch_signs(system, verdict):
    branch, witness = verdict.branch, verdict.witness
    E = reactant_exponentials(system, t_matrix(system), witness.mu)
    kappa = witness.kappa
    for pair in pair_signs(system.network, branch.classes, branch.pattern):
        j, p = pair.reaction, pair.partner
        partner = kappa[p] if p is not None else Fraction(0)
        partner_flux = float(partner) * E[p] if p is not None else 0.0
        g = kappa[j] - partner
        h = float(kappa[j]) * E[j] - partner_flux
        assert (g > 0) - (g < 0) == pair.g
        if pair.h == 0:
            assert abs(h) <= 1e-6 * (float(kappa[j]) * E[j] + partner_flux)
        else:
            assert h * pair.h > 0


def test_pair_closed_form_reproduces_the_partner():
    # kappa = (3, 1), e^a = 1, e^b = 2: g = 2, h = 1, rho = 1/2
    assert pair_closed_form(2.0, 0.5, 1.0, 2.0) == pytest.approx(1.0)


def test_closed_form_defects_use_the_branch_rho():
    system = _ndk_transform()
    T = t_matrix(system)
    pair = PairSigns(reaction=0, partner=1, class_index=1, g=1, h=1)
    M = {1: Fraction(1)}
    # rho = e with e^a = 1 and e^b = e^(1/2)
    partner = (math.e - 1) / (math.e - math.sqrt(math.e))
    assert closed_form_defects(system, T, [Fraction(1)], [1, partner, 5, 11], [pair], M) == []

    defects = closed_form_defects(system, T, [Fraction(1)], [97, 3, 5, 11], [pair], M)
    assert [rid for rid, _, _ in defects] == ["R1"]
    assert defects[0][2] == 3.0


def test_closed_form_defects_skip_classes_without_finite_m():
    system = _ndk_transform()
    pair = PairSigns(reaction=0, partner=1, class_index=1, g=1, h=0)
    assert closed_form_defects(system, t_matrix(system), [Fraction(1)], [97, 3, 5, 11], [pair], {1: "-inf"}) == []


@pytest.mark.parametrize("name", ["anderies", "ndk-transform"])
def test_recovered_kappa_realizes_the_branch_signs(name):
    system = _ndk_transform() if name == "ndk-transform" else load_model(name).system
    verdict = analyze(system)
    assert verdict.status is VerdictStatus.MULTISTATIONARY
    _assert_branch_signs(system, verdict)


def test_kappa_rows_turn_a_supplied_kappa_into_mu_rows():
    system = _ndk_transform()
    T = t_matrix(system)
    kappa = [Fraction(v) for v in (2, 1, 1, 1)]
    pairs = [PairSigns(0, 1, 1, 1, 0), PairSigns(2, None, 2, 1, 1)]
    rows = kappa_rows(system, T, kappa, pairs)
    assert len(rows) == 1
    (row,) = rows
    assert row.relation is Relation.EQ
    assert dict(row.coefficients) == {"mu[A1]": Fraction(-1, 2)}
    assert abs(float(row.rhs) - math.log(0.5)) <= 1e-12

    assert kappa_rows(system, T, kappa, [PairSigns(0, 1, 1, -1, 0)]) is None


def test_iter_signatures_yields_distinct_taus_that_solve_the_branch():
    system = load_model("anderies").system
    branch = constraint_display(system)
    assert branch is not None
    T = t_matrix(system)
    N = stoichiometric_matrix(system.network)
    signatures = list(itertools.islice(
        iter_signatures(branch.constraints, system.network.species, N, T, branch.pattern), 5
    ))
    taus = [s.tau for s in signatures]
    assert len(set(taus)) == len(taus)
    for signature in signatures:
        assert any(signature.tau)
        point = signature.mu_map()
        point.update({f"M[{i}]": v for i, v in signature.M.items() if v != "-inf"})
        assert branch.constraints.holds_at(point)


def test_leaf_tries_the_next_signature_after_a_failed_witness(monkeypatch):
    log = []
    real_signatures = search_module.iter_signatures
    real_witness = search_module.construct_witness

    def first_twice(*args, **kwargs):
        log.append(("leaf",))
        signatures = real_signatures(*args, **kwargs)
        first = next(signatures, None)
        if first is not None:
            yield first
            yield first
        yield from signatures

    def failing_once(*args, **kwargs):
        log.append(("try", args[2].tau))
        if sum(entry[0] == "try" for entry in log) == 1:
            return None
        return real_witness(*args, **kwargs)

    monkeypatch.setattr(search_module, "iter_signatures", first_twice)
    monkeypatch.setattr(search_module, "construct_witness", failing_once)

    verdict = analyze(load_model("anderies").system)
    assert verdict.status is VerdictStatus.MULTISTATIONARY
    assert verdict.stats.pre_signatures >= 1
    first_try = next(i for i, entry in enumerate(log) if entry[0] == "try")
    assert log[first_try + 1][0] == "try"


def test_signature_tries_count_against_the_budget():
    verdict = analyze(load_model("anderies").system)
    assert verdict.stats.nodes >= verdict.stats.signatures


def test_supplied_kappa_is_validated_before_the_walk():
    with pytest.raises(WitnessError, match="kernel"):
        analyze(_ndk_transform(), kappa=(1, 1, 1, 1))
    with pytest.raises(WitnessError, match="positive"):
        analyze(_ndk_transform(), kappa=(2, 1, 0, 1))
