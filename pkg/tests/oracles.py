# tests/oracles.py
#
# Slow, obviously-correct reference implementations the property suites
# compare the package against. Nothing here imports sympy or networkx.

from fractions import Fraction
from itertools import combinations

# ============================================================
# RANK
# ============================================================

def incremental_rank(rows):
    """Rank by adding rows one at a time to a reduced independent set."""
    basis = []  # (pivot column, row)
    for row in rows:
        vec = [Fraction(v) for v in row]
        for pivot, b in basis:
            if vec[pivot] != 0:
                factor = vec[pivot] / b[pivot]
                vec = [x - factor * y for x, y in zip(vec, b)]
        lead = next((i for i, v in enumerate(vec) if v != 0), None)
        if lead is not None:
            basis.append((lead, vec))
    return len(basis)


def unit(n, i):
    return [Fraction(int(k == i)) for k in range(n)]


# ============================================================
# FOURIER-MOTZKIN
# ============================================================

def _normalize(coeffs, relation, rhs):
    """(coeffs, strict, rhs) rows meaning coeffs.x < rhs or <= rhs."""
    coeffs = {v: Fraction(c) for v, c in coeffs.items() if c != 0}
    rhs = Fraction(rhs)
    neg = {v: -c for v, c in coeffs.items()}
    if relation == "<":
        return [(coeffs, True, rhs)]
    if relation == "<=":
        return [(coeffs, False, rhs)]
    if relation == ">":
        return [(neg, True, -rhs)]
    if relation == ">=":
        return [(neg, False, -rhs)]
    return [(coeffs, False, rhs), (neg, False, -rhs)]


def fourier_motzkin_feasible(rows):
    """
    rows: iterable of (coeffs, relation, rhs) with relation one of
    "=", "<", "<=", ">", ">=". Exact, tracks strictness.
    """
    system = []
    for coeffs, relation, rhs in rows:
        system.extend(_normalize(coeffs, relation, rhs))

    variables = sorted({v for coeffs, _, _ in system for v in coeffs})
    for var in variables:
        pos, neg, rest = [], [], []
        for row in system:
            c = row[0].get(var, Fraction(0))
            (pos if c > 0 else neg if c < 0 else rest).append(row)
        for (pc, ps, pr), (nc, ns, nr) in ((p, n) for p in pos for n in neg):
            a, b = pc[var], -nc[var]
            merged = {}
            for v in set(pc) | set(nc):
                value = b * pc.get(v, Fraction(0)) + a * nc.get(v, Fraction(0))
                if v != var and value != 0:
                    merged[v] = value
            rest.append((merged, ps or ns, b * pr + a * nr))
        system = rest

    for coeffs, strict, rhs in system:
        if coeffs:
            continue
        if strict and not 0 < rhs:
            return False
        if not strict and not 0 <= rhs:
            return False
    return True


# ============================================================
# GRAPHS
# ============================================================

def _reach(adjacency, start):
    seen, stack = {start}, [start]
    while stack:
        node = stack.pop()
        for nxt in adjacency.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def brute_force_scc(nodes, edges):
    """(strong classes, terminal classes) as sets of frozensets."""
    adjacency = {}
    for a, b in edges:
        adjacency.setdefault(a, set()).add(b)
    reach = {v: _reach(adjacency, v) for v in nodes}
    classes = {frozenset(w for w in nodes if w in reach[v] and v in reach[w]) for v in nodes}
    terminal = {c for c in classes if all(reach[v] <= c for v in c)}
    return classes, terminal


def brute_force_linkage(nodes, edges):
    undirected = set(edges) | {(b, a) for a, b in edges}
    return brute_force_scc(nodes, undirected)[0]


# ============================================================
# KINETICS
# ============================================================

def pairwise_cf_count(system, reactant):
    """Number of distinct kinetic-order rows among reactions from `reactant`."""
    rows = [system.F[j] for j, rx in enumerate(system.network.reactions) if rx.reactant == reactant]
    distinct = []
    for row in rows:
        if all(row != other for other in distinct):
            distinct.append(row)
    return len(distinct)


# ============================================================
# EQUIVALENCE CLASSES
# ============================================================

def brute_force_partition(matrix, ncols):
    """
    (p0, classes) of the columns of `matrix` by kernel-row proportionality.

    Coordinate j vanishes on the kernel iff e_j lies in the row space;
    j and k are proportional iff span(e_j, e_k) meets the row space.
    """
    rows = [list(r) for r in matrix]
    base = incremental_rank(rows)
    p0 = {j for j in range(ncols) if incremental_rank(rows + [unit(ncols, j)]) == base}
    live = [j for j in range(ncols) if j not in p0]
    parent = {j: j for j in live}

    def find(j):
        while parent[j] != j:
            j = parent[j]
        return j

    for j, k in combinations(live, 2):
        if incremental_rank(rows + [unit(ncols, j), unit(ncols, k)]) <= base + 1:
            parent[find(k)] = find(j)
    groups = {}
    for j in live:
        groups.setdefault(find(j), set()).add(j)
    return p0, {frozenset(g) for g in groups.values()}
