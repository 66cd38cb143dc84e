"""
engine/assembly.py

Constraint assembly for one branch (STEPS 10-12 plus the STEP 13 orderings).

Variables are mu[<species>] and M[<class index>]. A class whose rho is
nonpositive has M = -inf; such atoms are decided here and never reach the
solver:
    -inf <  finite   true       finite <  -inf   false
    -inf =  finite   false      -inf vs -inf     true
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import networkx as nx

from engine.classes import FundamentalClass, FundamentalClassSet
from engine.patterns import SignPatternChoice
from engine.shelving import Shelf, ShelvingAssignment
from engine.templates import Template
from kinetics.system import TMatrix
from linalg.constraints import ConstraintSystem, LinearConstraint, Relation, format_linear
from network.reactions import ReactionNetwork

NEG_INF = "-inf"


def mu_name(species: str) -> str:
    return f"mu[{species}]"


def m_name(class_index: int) -> str:
    return f"M[{class_index}]"


def m_value(pattern: SignPatternChoice, class_index: int):
    """Variable name of M_i, or the NEG_INF token."""
    return m_name(class_index) if pattern.m_finite(class_index) else NEG_INF


def _tmu(T: TMatrix, net: ReactionNetwork, complex_) -> dict:
    return T.linear_form(complex_, prefix="mu")


def _reactant_form(T, net, j):
    return _tmu(T, net, net.reactions[j].reactant)


def _product_form(T, net, j):
    return _tmu(T, net, net.reactions[j].product)


# ============================================================
# PIECES
# ============================================================

def p0_constraints(T: TMatrix, net: ReactionNetwork, classes: FundamentalClassSet) -> list[LinearConstraint]:
    out = []
    for j in classes.c0.members:
        if net.reactions[j].is_reversible:
            out.append(LinearConstraint.compare(
                _reactant_form(T, net, j), Relation.EQ, _product_form(T, net, j),
                label=f"p0:{net.reactions[j].id}",
            ))
    return out


def degenerate_constraints(
    T: TMatrix, net: ReactionNetwork, classes: FundamentalClassSet, pattern: SignPatternChoice
) -> list[LinearConstraint]:
    out = []
    for cls in classes.classes:
        if not pattern.degenerate(cls.index):
            continue
        h = pattern.h_sign(cls.index)
        rel = Relation.GT if h > 0 else Relation.LT if h < 0 else Relation.EQ
        for j in cls.members:
            out.append(LinearConstraint.compare(
                _reactant_form(T, net, j), rel, _product_form(T, net, j),
                label=f"degenerate:C{cls.index}:{net.reactions[j].id}",
            ))
    return out


def class_constraints(
    T: TMatrix,
    net: ReactionNetwork,
    cls: FundamentalClass,
    pattern: SignPatternChoice,
    assignment: ShelvingAssignment,
) -> Optional[list[LinearConstraint]]:
    """
    Shelf rows for every reaction of a nondegenerate class and the cross
    inequalities for its P_i members; None if an -inf atom is false.
    """
    out = []
    m = m_value(pattern, cls.index)
    shelves = dict(assignment.shelves)
    for j in cls.reactions:
        shelf = shelves[j]
        form = _reactant_form(T, net, j)
        label = f"shelf:C{cls.index}:{net.reactions[j].id}"
        if m == NEG_INF:
            if shelf is not Shelf.UPPER:
                return None
            continue
        rel = {Shelf.MIDDLE: Relation.EQ, Shelf.UPPER: Relation.GT, Shelf.LOWER: Relation.LT}[shelf]
        out.append(LinearConstraint.compare(form, rel, {m: 1}, label=label))

    g = pattern.g_sign(cls.index)
    for j in cls.members:
        shelf = shelves[j]
        if shelf is Shelf.MIDDLE:
            continue
        increasing = (g > 0) == (shelf is Shelf.UPPER)
        rel = Relation.LT if increasing else Relation.GT
        out.append(LinearConstraint.compare(
            _reactant_form(T, net, j), rel, _product_form(T, net, j),
            label=f"cross:C{cls.index}:{net.reactions[j].id}",
        ))
    return out


def template_constraints(templates: Iterable[Template], basis_labels: Sequence[str] = ()) -> list[LinearConstraint]:
    out = []
    for pos, template in enumerate(templates):
        tag = basis_labels[pos] if pos < len(basis_labels) else f"b{pos + 1}"
        for atom in template:
            out.append(LinearConstraint.compare(
                {m_name(atom.left): 1}, atom.relation, {m_name(atom.right): 1},
                label=f"order:{tag}",
            ))
    return out


# ============================================================
# FULL SYSTEM
# ============================================================

def build_constraints(
    T: TMatrix,
    net: ReactionNetwork,
    classes: FundamentalClassSet,
    shelvings: dict[int, ShelvingAssignment],
    pattern: SignPatternChoice,
    templates: Iterable[Template] = (),
) -> Optional[ConstraintSystem]:
    system = ConstraintSystem(variables=[mu_name(s) for s in net.species])
    system.extend(p0_constraints(T, net, classes))
    system.extend(degenerate_constraints(T, net, classes, pattern))
    for cls in classes.classes:
        if pattern.degenerate(cls.index):
            continue
        rows = class_constraints(T, net, cls, pattern, shelvings[cls.index])
        if rows is None:
            return None
        system.extend(rows)
    system.extend(template_constraints(templates))
    return system


def equation_groups(constraints: Iterable[LinearConstraint]) -> list[tuple[list[str], list[str]]]:
    """
    Middle-shelf equalities joined into chains "expr = M_i = M_j = expr".

    Two M variables share a group when they equal the same expression
    (classes with a common reactant). Groups keep first-seen order.
    """
    graph = nx.Graph()
    for con in constraints:
        if con.relation is not Relation.EQ or not con.label.startswith("shelf:"):
            continue
        m_vars = [v for v in con.variables() if v.startswith("M[")]
        if len(m_vars) != 1:
            continue
        # stored as T.mu - M = 0
        expr = format_linear([(v, c) for v, c in con.coefficients if not v.startswith("M[")])
        graph.add_edge(("M", m_vars[0]), ("E", expr))

    order = {node: pos for pos, node in enumerate(graph.nodes)}
    groups = []
    for component in sorted(nx.connected_components(graph), key=lambda c: min(order[n] for n in c)):
        ordered = sorted(component, key=order.__getitem__)
        groups.append((
            [name for kind, name in ordered if kind == "M"],
            [name for kind, name in ordered if kind == "E"],
        ))
    return groups


def format_group(group: tuple[list[str], list[str]]) -> str:
    m_vars, exprs = group
    if not exprs:
        return " = ".join(m_vars)
    return " = ".join([exprs[0], *m_vars, *exprs[1:]])
