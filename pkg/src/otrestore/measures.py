"""Finite discrete probability measures and transport plans."""

import json

import numpy as np

WEIGHT_SUM_TOL = 1e-12
MARGINAL_TOL = 1e-9


class DiscreteMeasure:
    """Probability measure supported on finitely many points in R^d.

    Zero-weight atoms are dropped and duplicate atoms are merged with
    summed weight, so the support is always a set.
    """

    def __init__(self, atoms, weights):
        atoms = np.atleast_2d(np.asarray(atoms, dtype=np.float64))
        weights = np.asarray(weights, dtype=np.float64).ravel()
        if atoms.shape[0] != weights.shape[0]:
            raise ValueError(
                f"{atoms.shape[0]} atoms but {weights.shape[0]} weights"
            )
        if not np.all(np.isfinite(atoms)):
            raise ValueError("atoms contain non-finite coordinates")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        total = float(weights.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, expected 1")
        keep = weights > 0
        atoms, weights = atoms[keep], weights[keep]
        if atoms.shape[0] == 0:
            raise ValueError("measure has no support")
        # merge exactly-equal atoms, preserving first-occurrence order
        seen = {}
        order, merged = [], []
        for k in range(atoms.shape[0]):
            key = atoms[k].tobytes()
            if key in seen:
                merged[seen[key]] += weights[k]
            else:
                seen[key] = len(order)
                order.append(atoms[k])
                merged.append(weights[k])
        self.atoms = np.array(order, dtype=np.float64)
        self.weights = np.array(merged, dtype=np.float64)

    def __len__(self):
        return self.atoms.shape[0]

    @property
    def dim(self):
        return self.atoms.shape[1]

    def to_dict(self):
        return {"atoms": self.atoms.tolist(), "weights": self.weights.tolist()}


class TransportPlan:
    """Coupling between a source and a target measure.

    ``pi[i, j]`` is the mass moved from source atom i to target atom j.
    Row sums match the source weights and column sums the target weights
    within MARGINAL_TOL.
    """

    def __init__(self, pi, total_cost, source, target, diagnostics=None):
        pi = np.asarray(pi, dtype=np.float64)
        if np.any(pi < -MARGINAL_TOL):
            raise ValueError("plan has negative entries")
        self.pi = np.maximum(pi, 0.0)
        self.total_cost = float(total_cost)
        self.source = source
        self.target = target
        self.diagnostics = dict(diagnostics or {})
        row_err = np.max(np.abs(self.pi.sum(axis=1) - source.weights))
        col_err = np.max(np.abs(self.pi.sum(axis=0) - target.weights))
        if max(row_err, col_err) > MARGINAL_TOL:
            raise ValueError(
                f"plan marginals violated: row {row_err:.3e}, col {col_err:.3e}"
            )

    def marginal_violation(self):
        row = np.abs(self.pi.sum(axis=1) - self.source.weights).sum()
        col = np.abs(self.pi.sum(axis=0) - self.target.weights).sum()
        return float(row + col)

    def is_deterministic(self, tol=1e-12):
        """True when every source atom sends all its mass to one target."""
        return all(
            np.count_nonzero(row > tol) <= 1 for row in self.pi
        )

    def induced_map(self, tol=1e-12):
        """Target index for each source atom, or None if the plan splits mass."""
        if not self.is_deterministic(tol):
            return None
        return [int(np.argmax(row)) for row in self.pi]

    def to_dict(self):
        return {
            "pi": self.pi.tolist(),
            "total_cost": self.total_cost,
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
            "diagnostics": self.diagnostics,
        }

    def to_json(self, **kwargs):
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)
