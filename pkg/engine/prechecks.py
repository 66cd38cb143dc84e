# engine/prechecks.py

import logging

from kinetics.system import KineticSystem
from network.regularity import is_positive_dependent

logger = logging.getLogger(__name__)

# ============================================================
# CHECKS
# ============================================================
# Each check returns a reason string when the system provably has no
# capacity for multiple equilibria, else None.


def _single_species(complex_):
    if len(complex_.terms) != 1:
        return None
    return complex_.terms[0][0]


def precheck_inflow_outflow(system: KineticSystem):
    """
    An irreversible inflow 0 -> A (or outflow B -> 0) whose species no
    other reaction vector touches makes that species' rate one-signed, so
    no positive equilibrium exists.
    """
    net = system.network
    for j, rx in enumerate(net.reactions):
        if rx.is_reversible:
            continue
        if rx.reactant.is_zero:
            species, kind = _single_species(rx.product), "inflow"
        elif rx.product.is_zero:
            species, kind = _single_species(rx.reactant), "outflow"
        else:
            continue
        if species is None:
            continue
        s = net.species_index(species)
        if all(net.reaction_vector(i)[s] == 0 for i in range(net.r) if i != j):
            return f"{kind} {rx.id} is the only reaction changing {species}"
    return None


def precheck_positive_dependence(system: KineticSystem):
    """Without a positive kernel vector of N, f never vanishes on positive x."""
    if not is_positive_dependent(system.network):
        return "reaction vectors are not positively dependent"
    return None


# ============================================================
# REGISTRY
# ============================================================

PRECHECKS = {
    "inflow_outflow": precheck_inflow_outflow,
    "positive_dependence": precheck_positive_dependence,
}


def run_prechecks(system: KineticSystem):
    """(name, reason) of the first check that fires, else None."""
    for name, check in PRECHECKS.items():
        reason = check(system)
        if reason:
            logger.info(f"PRECHECK FIRED | {name} | {reason}")
            return name, reason
    return None
