"""
linalg/rational.py

Exact rational matrix kernels on top of sympy's DomainMatrix over QQ.

Responsibilities:
- rref / rank / nullspace with canonical, reproducible bases
- Orthocomplement of a kernel restricted to a coordinate support
- Column-space membership

This module MUST:
- Never round; every entry crossing the boundary is a Fraction
"""

from __future__ import annotations

import math
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ, Rational
from sympy.polys.matrices import DomainMatrix

Vector = list[Fraction]
Rows = list[list[Fraction]]

# ============================================================
# CONVERSION
# ============================================================

def as_fraction(value) -> Fraction:
    """
    Exact conversion. Strings are read as decimals ("0.7464", "-86.03",
    "3/2"); floats are converted through their shortest repr so that 0.1
    means one tenth.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(Decimal(repr(value)))
    if isinstance(value, Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        return Fraction(value.strip())
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    return Fraction(value)


def to_domain(rows: Sequence[Sequence], ncols: int | None = None) -> DomainMatrix:
    rows = [[as_fraction(v) for v in row] for row in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return DomainMatrix.zeros((0, ncols), QQ)
    return DomainMatrix.from_list(
        [[(v.numerator, v.denominator) for v in row] for row in rows], QQ
    )


def from_domain(dm: DomainMatrix) -> Rows:
    return [
        [Fraction(int(e.numerator), int(e.denominator)) for e in row]
        for row in dm.to_list()
    ]


def primitive(vec: Iterable) -> Vector:
    """Scale to coprime integers, keeping sign. Zero stays zero."""
    vec = [as_fraction(v) for v in vec]
    if all(v == 0 for v in vec):
        return vec
    lcm = 1
    for v in vec:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    return [Fraction(x // g) for x in ints]


# ============================================================
# ELIMINATION
# ============================================================

def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[Rows, tuple[int, ...]]:
    dm = to_domain(rows, ncols)
    if dm.shape[0] == 0 or dm.shape[1] == 0:
        return [[Fraction(0)] * dm.shape[1] for _ in range(dm.shape[0])], ()
    reduced, pivots = dm.rref()
    return from_domain(reduced), tuple(pivots)


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[Vector]:
    """
    Kernel basis, one vector per free column of the rref (in column order).
    Each vector is primitive-integer with +1-direction on its free column.
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    reduced, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for row_i, p in enumerate(pivots):
            vec[p] = -reduced[row_i][free]
        basis.append(primitive(vec))
    return basis


def orthocomplement_restricted(
    rows: Sequence[Sequence], support: Sequence[int], ncols: int | None = None
) -> list[Vector]:
    """
    Basis of Ker(L)^perp intersected with vectors supported on `support`.

    A vector z supported on W is orthogonal to the kernel iff
    sum_{j in W} z_j v_j = 0 for every kernel basis vector v, so the answer
    is the nullspace of the kernel basis restricted to W.
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    support = list(support)
    kernel = nullspace(rows, ncols)
    if not support:
        return []
    if not kernel:
        restricted_basis = [[Fraction(int(i == j)) for j in range(len(support))]
                            for i in range(len(support))]
    else:
        restricted = [[v[j] for j in support] for v in kernel]
        restricted_basis = nullspace(restricted, len(support))
    out = []
    for z in restricted_basis:
        full = [Fraction(0)] * ncols
        for value, j in zip(z, support):
            full[j] = value
        out.append(full)
    return out


def in_column_space(columns_rows: Sequence[Sequence], vec: Sequence) -> bool:
    """True iff vec is a rational combination of the columns of the matrix."""
    rows = [list(r) for r in columns_rows]
    ncols = len(rows[0]) if rows else 0
    augmented = [r + [as_fraction(v)] for r, v in zip(rows, vec)]
    return rank(rows, ncols) == rank(augmented, ncols + 1)


def transpose(rows: Sequence[Sequence], ncols: int | None = None) -> Rows:
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return [[rows[i][j] for i in range(len(rows))] for j in range(ncols)]


def matvec(rows: Sequence[Sequence], vec: Sequence) -> Vector:
    return [sum((as_fraction(a) * as_fraction(b) for a, b in zip(row, vec)), Fraction(0))
            for row in rows]


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((as_fraction(x) * as_fraction(y) for x, y in zip(a, b)), Fraction(0))
