"""
network/matrices.py

Structural matrices of a reaction network (exact rationals, row-major).

Y  : m x n molecularity matrix
Ia : n x r incidence matrix
N  : m x r stoichiometric matrix, N = Y . Ia
"""

from __future__ import annotations

from fractions import Fraction

from network.reactions import ReactionNetwork

Rows = list[list[Fraction]]


def molecularity_matrix(net: ReactionNetwork) -> Rows:
    return [[c.coefficient(s) for c in net.complexes] for s in net.species]


def incidence_matrix(net: ReactionNetwork) -> Rows:
    out = [[Fraction(0)] * net.r for _ in range(net.n)]
    for j, rx in enumerate(net.reactions):
        out[net.complex_index(rx.reactant)][j] = Fraction(-1)
        out[net.complex_index(rx.product)][j] = Fraction(1)
    return out


def stoichiometric_matrix(net: ReactionNetwork) -> Rows:
    Y = molecularity_matrix(net)
    Ia = incidence_matrix(net)
    out = []
    for i in range(net.m):
        row = []
        for j in range(net.r):
            row.append(sum((Y[i][k] * Ia[k][j] for k in range(net.n)), Fraction(0)))
        out.append(row)
    return out


def columns(rows: Rows, indices) -> Rows:
    """Sub-matrix keeping the given columns, in the given order."""
    return [[row[j] for j in indices] for row in rows]
