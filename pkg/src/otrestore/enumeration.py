"""Brute-force optimal transport oracle for small instances.

Every vertex of the m x n transportation polytope is the basic solution
of some spanning tree of the complete bipartite graph K_{m,n}.  This
module enumerates all m^(n-1) * n^(m-1) spanning trees (as rooted parent
arrays, validated by pointer jumping), solves the tree flows for the
given marginals in one vectorized pass, and returns the cheapest feasible
basic solution.  Completely independent of the simplex solver: no pivots,
no duals, no shared code paths.
"""

from functools import lru_cache

import numpy as np

from .measures import DiscreteMeasure, TransportPlan
from .transport import build_cost_matrix

MAX_ATOMS = 10


@lru_cache(maxsize=None)
def _spanning_trees(m, n):
    """Parent arrays of all spanning trees of K_{m,n}, rooted at column 0.

    Vertices 0..m-1 are rows, m..m+n-1 columns; the root is vertex m.
    Candidates assign each row a column parent and each non-root column a
    row parent (n^m * m^(n-1) combinations); exactly the acyclic ones are
    trees, and their count is m^(n-1) * n^(m-1).
    """
    nvert = m + n
    root = m
    free_cols = [m + c for c in range(n) if m + c != root]
    total = n ** m * m ** len(free_cols)
    par = np.empty((total, nvert), dtype=np.int8)
    par[:, root] = root
    idx = np.arange(total, dtype=np.int64)
    radix = total
    for r in range(m):  # row parents: any column
        radix //= n
        par[:, r] = m + (idx // radix) % n
    for c in free_cols:  # non-root column parents: any row
        radix //= m
        par[:, c] = (idx // radix) % m
    # pointer jumping: after k doublings pointers advance 2^k steps, so
    # ceil(log2(depth_max)) jumps reach the root from any vertex iff the
    # functional graph is a tree
    jump = par.copy()
    steps = 1
    while steps < nvert:
        jump = np.take_along_axis(jump, jump, axis=1)
        steps *= 2
    trees = par[np.all(jump == root, axis=1)]
    assert trees.shape[0] == m ** (n - 1) * n ** (m - 1)
    return trees


def _tree_flows(trees, balances, root):
    """Per-tree signed subtree sums: flow carried by each vertex's up-edge."""
    ntrees, nvert = trees.shape
    g = np.zeros((ntrees, nvert))
    rows = np.repeat(np.arange(ntrees), nvert)
    val = np.tile(balances, ntrees)
    cur = np.tile(np.arange(nvert, dtype=np.int64), ntrees)
    tr = trees.astype(np.int64)
    for _ in range(nvert - 1):
        active = cur != root
        np.add.at(g, (rows[active], cur[active]), val[active])
        cur = tr[rows, cur]
    return g


def enumerate_oracle(mu, nu, cost):
    """Global minimum over all basic feasible solutions (<= 10 atoms total).

    Ties on total cost break to the lexicographically smallest plan in
    row-major order, making the result deterministic regardless of
    enumeration order.
    """
    if not isinstance(mu, DiscreteMeasure) or not isinstance(nu, DiscreteMeasure):
        raise TypeError("mu and nu must be DiscreteMeasure")
    m, n = len(nu), len(mu)
    if m + n > MAX_ATOMS:
        raise ValueError(f"instance too large for enumeration: {m}+{n} atoms > {MAX_ATOMS}")
    if isinstance(cost, (tuple, list)) and len(cost) == 2:
        C = build_cost_matrix(nu.atoms, mu.atoms, cost[0], cost[1])
    else:
        C = np.asarray(cost, dtype=np.float64)
    if C.shape != (m, n):
        raise ValueError(f"cost matrix shape {C.shape}, expected {(m, n)}")
    gap = abs(nu.weights.sum() - mu.weights.sum())
    if gap > 1e-9:
        raise ValueError(f"measure masses differ by {gap:.3e}")

    root = m
    trees = _spanning_trees(m, n)
    balances = np.concatenate([nu.weights, -mu.weights])
    g = _tree_flows(trees, balances, root)

    # up-edge of row r carries +g, of column c carries -g; both must be >= 0
    verts = np.arange(m + n)
    is_row = verts < m
    feas_tol = 1e-12
    flows = np.where(is_row[None, :], g, -g)
    flows[:, root] = 0.0
    feasible = np.all(flows >= -feas_tol, axis=1)
    if not np.any(feasible):
        raise ValueError("no feasible basic solution (inconsistent marginals)")
    flows = np.maximum(flows, 0.0)

    # map each vertex's up-edge to its plan cell (row-major flat index)
    tr = trees.astype(np.int64)
    cell = np.where(
        is_row[None, :],
        verts[None, :] * n + (tr - m),
        tr * n + (verts[None, :] - m),
    )
    cell[:, root] = 0  # carries zero flow; index value irrelevant
    costs = np.sum(flows * C.ravel()[cell], axis=1)
    costs[~feasible] = np.inf

    best = float(np.min(costs))
    tie_tol = 1e-12 * max(1.0, float(np.max(np.abs(C)))) * (m + n)
    candidates = np.flatnonzero(costs <= best + tie_tol)
    best_plan = None
    for t in candidates:
        plan = np.zeros(m * n)
        np.add.at(plan, cell[t], flows[t])
        key = tuple(plan)
        if best_plan is None or key < best_plan:
            best_plan = key
    pi = np.array(best_plan).reshape(m, n)
    return TransportPlan(
        pi, float(np.sum(pi * C)), nu, mu,
        diagnostics={"solver": "tree-enumeration", "trees": int(trees.shape[0])},
    )
