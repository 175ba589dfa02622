"""Exact and entropic discrete optimal transport, plus the energy distance.

The exact solver is a primal transportation simplex on the bipartite
graph: northwest-corner start, Bland's rule for anti-cycling, and an
optional lexicographic post-pass that selects the lexicographically
smallest vertex (row-major plan order) among all optimal vertices, so
golden-plan tests are stable under cost ties.
"""

import numpy as np
from scipy.spatial.distance import cdist

from .costs import L0_THRESHOLD
from .measures import DiscreteMeasure, TransportPlan

PIVOT_TOL = 1e-12


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance."""


def build_cost_matrix(source_atoms, target_atoms, kind, exponent):
    """Pairwise transport costs c(target, source) as a function of the gap.

    kind "lbeta": (sum d^2)^(beta/2), beta >= 1 (beta=2 is squared l2).
    kind "lq":    sum |d|^q with 0 <= q <= 1 (q=0 counts nonzeros).
    """
    s = np.atleast_2d(np.asarray(source_atoms, dtype=np.float64))
    t = np.atleast_2d(np.asarray(target_atoms, dtype=np.float64))
    if s.shape[1] != t.shape[1]:
        raise ValueError(f"dimension mismatch: {s.shape[1]} vs {t.shape[1]}")
    diff = s[:, None, :] - t[None, :, :]
    exponent = float(exponent)
    if kind == "lbeta":
        if exponent < 1.0:
            raise ValueError(f"beta must be >= 1, got {exponent}")
        return np.sum(diff * diff, axis=2) ** (exponent / 2.0)
    if kind == "lq":
        if not 0.0 <= exponent <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {exponent}")
        if exponent == 0.0:
            return np.sum(np.abs(diff) > L0_THRESHOLD, axis=2).astype(np.float64)
        return np.sum(np.abs(diff) ** exponent, axis=2)
    raise ValueError(f"unknown cost kind {kind!r} (want 'lbeta' or 'lq')")


class _TransportationSimplex:
    """Primal simplex state on an m x n transportation problem."""

    def __init__(self, a, b, cost):
        self.a = np.asarray(a, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.cost = np.asarray(cost, dtype=np.float64)
        self.m, self.n = self.cost.shape
        self.flow = np.zeros((self.m, self.n))
        self.basis = np.zeros((self.m, self.n), dtype=bool)
        self._northwest_start()

    def _northwest_start(self):
        ra, rb = self.a.copy(), self.b.copy()
        i = j = 0
        while True:
            t = min(ra[i], rb[j])
            self.flow[i, j] = t
            self.basis[i, j] = True
            ra[i] -= t
            rb[j] -= t
            if i == self.m - 1 and j == self.n - 1:
                break
            # advance one index per step: exactly m+n-1 basic cells, a tree
            if j == self.n - 1 or (ra[i] <= rb[j] and i < self.m - 1):
                i += 1
            else:
                j += 1

    def _adjacency(self):
        adj = [[] for _ in range(self.m + self.n)]
        for i, j in zip(*np.nonzero(self.basis)):
            adj[i].append(self.m + j)
            adj[self.m + j].append(int(i))
        return adj

    def duals(self):
        """Node potentials with u[0] = 0, from the basis tree."""
        adj = self._adjacency()
        u = np.full(self.m, np.nan)
        v = np.full(self.n, np.nan)
        u[0] = 0.0
        stack = [0]
        seen = {0}
        while stack:
            node = stack.pop()
            for nb in adj[node]:
                if nb in seen:
                    continue
                seen.add(nb)
                if node < self.m:  # row -> col: u_i + v_j = c_ij
                    v[nb - self.m] = self.cost[node, nb - self.m] - u[node]
                else:
                    u[nb] = self.cost[nb, node - self.m] - v[node - self.m]
                stack.append(nb)
        if len(seen) != self.m + self.n:
            raise ConvergenceError("basis lost spanning-tree structure")
        return u, v

    def _tree_path(self, start, goal):
        """Vertex path start -> goal through basis edges."""
        adj = self._adjacency()
        parent = {start: None}
        stack = [start]
        while stack:
            node = stack.pop()
            if node == goal:
                break
            for nb in adj[node]:
                if nb not in parent:
                    parent[nb] = node
                    stack.append(nb)
        path = [goal]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        return path[::-1]

    def solve(self, allowed=None, max_pivots=None):
        """Pivot to optimality over the allowed cells (Bland's rule)."""
        if allowed is None:
            allowed = np.ones((self.m, self.n), dtype=bool)
        if max_pivots is None:
            max_pivots = 1000 + 50 * self.m * self.n * (self.m + self.n)
        scale = max(1.0, float(np.max(np.abs(self.cost))))
        tol = PIVOT_TOL * scale
        for _ in range(max_pivots):
            u, v = self.duals()
            rc = self.cost - u[:, None] - v[None, :]
            eligible = allowed & ~self.basis & (rc < -tol)
            flat = np.flatnonzero(eligible.ravel())
            if flat.size == 0:
                return
            enter = int(flat[0])  # Bland: smallest index enters
            ei, ej = divmod(enter, self.n)
            path = self._tree_path(ei, self.m + ej)
            # cycle cells: entering cell plus the tree path back; signs
            # alternate starting with + on the entering cell
            cells = [(ei, ej, +1)]
            sign = -1
            for p, qv in zip(path, path[1:]):
                i, j = (p, qv - self.m) if p < self.m else (qv, p - self.m)
                cells.append((i, j, sign))
                sign = -sign
            neg = [(i, j) for i, j, s in cells if s < 0]
            theta = min(self.flow[i, j] for i, j in neg)
            ties = [(i, j) for i, j in neg if self.flow[i, j] <= theta]
            leave = min(ties, key=lambda ij: ij[0] * self.n + ij[1])
            for i, j, s in cells:
                self.flow[i, j] += s * theta
            self.flow[leave] = 0.0
            self.basis[leave] = False
            self.basis[ei, ej] = True
        raise ConvergenceError(f"simplex exceeded {max_pivots} pivots")

    def objective(self):
        return float(np.sum(self.flow * self.cost))


def _lexicographic_refine(sx, face_tol):
    """Move to the lexicographically smallest vertex of the optimal face.

    The optimal face is the set of feasible flows supported on cells with
    zero reduced cost.  Minimizing each coordinate in row-major order
    (restricting the face by complementary slackness after each step)
    lands on the unique lex-min point, which is a vertex.
    """
    u, v = sx.duals()
    rc = sx.cost - u[:, None] - v[None, :]
    allowed = sx.basis | (rc <= face_tol)
    unit = np.zeros_like(sx.cost)
    for k in range(sx.m * sx.n):
        i, j = divmod(k, sx.n)
        if not allowed[i, j]:
            continue
        unit[:] = 0.0
        unit[i, j] = 1.0
        sx.cost = unit
        sx.solve(allowed)
        u, v = sx.duals()
        rc = unit - u[:, None] - v[None, :]
        allowed &= sx.basis | (rc <= face_tol)


def solve_exact(mu, nu, cost, lexicographic=True):
    """Minimum-cost coupling from source ``nu`` onto target ``mu``.

    ``cost`` is an explicit (len(nu), len(mu)) matrix or a ("lbeta"|"lq",
    exponent) pair evaluated on atom differences.  Returns a vertex plan;
    with ``lexicographic`` the lexicographically smallest optimal vertex.
    """
    if not isinstance(mu, DiscreteMeasure):
        raise TypeError("mu must be a DiscreteMeasure")
    if not isinstance(nu, DiscreteMeasure):
        raise TypeError("nu must be a DiscreteMeasure")
    if isinstance(cost, (tuple, list)) and len(cost) == 2:
        C = build_cost_matrix(nu.atoms, mu.atoms, cost[0], cost[1])
    else:
        C = np.asarray(cost, dtype=np.float64)
    if C.shape != (len(nu), len(mu)):
        raise ValueError(f"cost matrix shape {C.shape}, expected {(len(nu), len(mu))}")
    if not np.all(np.isfinite(C)):
        raise ValueError("cost matrix contains non-finite entries")
    gap = abs(nu.weights.sum() - mu.weights.sum())
    if gap > 1e-9:
        raise ValueError(f"measure masses differ by {gap:.3e}")

    sx = _TransportationSimplex(nu.weights, mu.weights, C.copy())
    sx.solve()
    total = float(np.sum(sx.flow * C))
    if lexicographic:
        scale = max(1.0, float(np.max(np.abs(C))))
        _lexicographic_refine(sx, 1e-10 * scale)
        total = float(np.sum(sx.flow * C))
    return TransportPlan(
        sx.flow.copy(), total, nu, mu,
        diagnostics={"solver": "transportation-simplex", "lexicographic": bool(lexicographic)},
    )


def sinkhorn(mu, nu, cost, epsilon, max_iters=5000, tol=1e-9):
    """Entropic-regularized coupling, log-domain, rounded to exact marginals.

    The raw Sinkhorn iterate is rounded onto the transportation polytope
    so the returned plan always satisfies the marginal invariants; the
    pre-rounding violation and a convergence flag land in diagnostics.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if isinstance(cost, (tuple, list)) and len(cost) == 2:
        C = build_cost_matrix(nu.atoms, mu.atoms, cost[0], cost[1])
    else:
        C = np.asarray(cost, dtype=np.float64)
    a, b = nu.weights, mu.weights
    if C.shape != (a.size, b.size):
        raise ValueError(f"cost matrix shape {C.shape}, expected {(a.size, b.size)}")
    loga, logb = np.log(a), np.log(b)
    f = np.zeros(a.size)
    g = np.zeros(b.size)
    violation = np.inf
    it = 0
    for it in range(1, max_iters + 1):
        M = (g[None, :] - C) / epsilon
        f = epsilon * (loga - _logsumexp_rows(M))
        M = (f[:, None] - C) / epsilon
        g = epsilon * (logb - _logsumexp_rows(M.T))
        pi = np.exp((f[:, None] + g[None, :] - C) / epsilon)
        violation = float(
            np.abs(pi.sum(axis=1) - a).sum() + np.abs(pi.sum(axis=0) - b).sum()
        )
        if violation < tol:
            break
    converged = violation < tol
    pi = _round_to_marginals(pi, a, b)
    return TransportPlan(
        pi, float(np.sum(pi * C)), nu, mu,
        diagnostics={
            "solver": "sinkhorn",
            "epsilon": float(epsilon),
            "iterations": it,
            "pre_rounding_violation": violation,
            "converged": bool(converged),
        },
    )


def _logsumexp_rows(M):
    mx = np.max(M, axis=1, keepdims=True)
    return (mx + np.log(np.sum(np.exp(M - mx), axis=1, keepdims=True))).ravel()


def _round_to_marginals(pi, a, b):
    """Project a near-coupling onto exact marginals (scale, then patch)."""
    row = pi.sum(axis=1)
    pi = pi * np.minimum(1.0, a / np.where(row > 0, row, 1.0))[:, None]
    col = pi.sum(axis=0)
    pi = pi * np.minimum(1.0, b / np.where(col > 0, col, 1.0))[None, :]
    da = a - pi.sum(axis=1)
    db = b - pi.sum(axis=0)
    mass = da.sum()
    if mass > 1e-15:
        pi = pi + np.outer(da, db) / mass
    return pi


def energy_distance(samples_a, samples_b):
    """Energy distance V-statistic: 2 E|u-v| - E|u-u'| - E|v-v'|.

    Zero iff the two empirical distributions coincide; symmetric and
    nonnegative.  Inputs are (n, d) arrays of samples.
    """
    A = np.atleast_2d(np.asarray(samples_a, dtype=np.float64))
    B = np.atleast_2d(np.asarray(samples_b, dtype=np.float64))
    if A.shape[0] == 0 or B.shape[0] == 0:
        raise ValueError("both sample sets must be nonempty")
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    cross = cdist(A, B).mean()
    within_a = cdist(A, A).mean()
    within_b = cdist(B, B).mean()
    return float(max(0.0, 2.0 * cross - within_a - within_b))
