"""Analytic two-point restoration instance with a closed-form inverse.

The source X takes two values in R^(m+1): x1 = [-a, b, ..., b] and
x2 = [a, -b, ..., -b] with a >> b > 0.  The degradation N shifts the
first coordinate by +-2a and leaves the rest untouched, so N is maximally
sparse (one nonzero entry).  The observation Y = X + N then has four
supports, and the correct inverse map y -> x is known exactly.

When a^2 > m b^2, quadratic transport cost prefers matching the m small
coordinates over the single large one and inverts two of the four
supports incorrectly (positive distortion).  When a^q < m b^q, the
sparsity-seeking lq cost (0 <= q <= 1) prefers the single-coordinate gap
and recovers the exact inverse with zero distortion.  This module builds
the instance, checks the two regime conditions, and evaluates the true
expected distortion of any transport plan on it.
"""

import numpy as np

from .measures import DiscreteMeasure, TransportPlan


class TwoPointInstance:
    """Container for the two-point instance and its true joint law."""

    def __init__(self, a, b, m, p1, ptilde1, x_atoms, n_atoms, y_atoms, joint, conditions):
        self.a = a
        self.b = b
        self.m = m
        self.p = np.array([p1, 1.0 - p1])
        self.ptilde = np.array([ptilde1, 1.0 - ptilde1])
        self.x_atoms = x_atoms      # (2, m+1)
        self.n_atoms = n_atoms      # (2, m+1)
        self.y_atoms = y_atoms      # (4, m+1), order (x1+n1, x1+n2, x2+n1, x2+n2)
        self.joint = joint          # (2, 2): P(X = x_i, N = n_j)
        self.conditions = conditions

    @property
    def p_x(self):
        return DiscreteMeasure(self.x_atoms, self.p)

    @property
    def p_n(self):
        return DiscreteMeasure(self.n_atoms, self.ptilde)

    @property
    def p_y(self):
        return DiscreteMeasure(self.y_atoms, self.joint.ravel())

    def to_dict(self):
        return {
            "a": self.a, "b": self.b, "m": self.m,
            "p": self.p.tolist(), "ptilde": self.ptilde.tolist(),
            "x_atoms": self.x_atoms.tolist(),
            "n_atoms": self.n_atoms.tolist(),
            "y_atoms": self.y_atoms.tolist(),
            "joint": self.joint.tolist(),
            "conditions": self.conditions,
        }


def build_two_point_instance(a, b, m, p1=0.5, ptilde1=0.5, q_values=(0.0, 0.5, 1.0),
                             uncorrected_signs=False):
    """Construct the instance and report which cost-regime conditions hold.

    Condition failures are recorded in ``conditions`` rather than raised:
    the instance is still well defined outside the dichotomy regime.

    ``uncorrected_signs`` flips the first coordinate of x2 to -a (both
    source atoms on the same side); with that convention the four
    observation supports no longer decompose as x_i + n_j, so it exists
    only for comparison and the y supports keep the decomposition-based
    definition.
    """
    a, b = float(a), float(b)
    m = int(m)
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if m < 1:
        raise ValueError("m must be a positive integer")
    if not (0.0 <= p1 <= 1.0 and 0.0 <= ptilde1 <= 1.0):
        raise ValueError("p1 and ptilde1 must be probabilities")

    x1 = np.concatenate([[-a], np.full(m, b)])
    x2_first = -a if uncorrected_signs else a
    x2 = np.concatenate([[x2_first], np.full(m, -b)])
    n1 = np.concatenate([[-2.0 * a], np.zeros(m)])
    n2 = np.concatenate([[2.0 * a], np.zeros(m)])
    x_corrected = np.concatenate([[a], np.full(m, -b)])
    y = np.stack([x1 + n1, x1 + n2, x_corrected + n1, x_corrected + n2])

    conditions = {
        "l2_regime": bool(a * a > m * b * b),      # quadratic cost mis-inverts here
        "lq_regime": {},                           # lq cost inverts exactly here
    }
    for q in q_values:
        q = float(q)
        conditions["lq_regime"][f"q={q:g}"] = bool(a ** q < m * b ** q)
    conditions["all_hold"] = conditions["l2_regime"] and all(
        conditions["lq_regime"].values()
    )

    joint = np.outer([p1, 1.0 - p1], [ptilde1, 1.0 - ptilde1])
    return TwoPointInstance(a, b, m, p1, ptilde1,
                            np.stack([x1, x2]), np.stack([n1, n2]), y, joint,
                            conditions)


def map_distortion(plan, instance):
    """Expected squared restoration error E||f(Y) - X||^2 under the true joint.

    For a deterministic plan this is the distortion of the induced map;
    for a split plan the expectation runs over the plan's conditional
    distribution of targets given each observation atom.
    """
    if not isinstance(plan, TransportPlan):
        raise TypeError("plan must be a TransportPlan")
    x_atoms = instance.x_atoms
    tgt = plan.target.atoms
    if tgt.shape[1] != x_atoms.shape[1]:
        raise ValueError("plan target dimension does not match the instance")
    # plan targets must be exactly the instance's source values
    tgt_index = {}
    for k in range(tgt.shape[0]):
        tgt_index[tgt[k].tobytes()] = k
    for i in range(2):
        if instance.p[i] > 0 and x_atoms[i].tobytes() not in tgt_index:
            raise ValueError("plan target support does not cover the instance sources")

    src_index = {}
    for r in range(plan.source.atoms.shape[0]):
        src_index[plan.source.atoms[r].tobytes()] = r

    total = 0.0
    for i in range(2):
        for j in range(2):
            w = instance.joint[i, j]
            if w == 0.0:
                continue
            y_ij = instance.y_atoms[2 * i + j]
            r = src_index.get(y_ij.tobytes())
            if r is None:
                raise ValueError(
                    f"plan source lacks the observation atom for (x{i+1}, n{j+1})"
                )
            row = plan.pi[r]
            mass = row.sum()
            if mass <= 0:
                raise ValueError("plan row carries no mass for a positive-probability atom")
            cond = row / mass
            sq = np.sum((tgt - x_atoms[i]) ** 2, axis=1)
            total += w * float(np.dot(cond, sq))
    return total


def correct_inverse_distortion(instance):
    """Distortion of the exact inverse map (zero by construction)."""
    gap = float(np.sum((instance.x_atoms[0] - instance.x_atoms[1]) ** 2))
    return 0.0 * gap


def quadratic_inverse_distortion(instance):
    """Distortion of the plan the quadratic cost selects in its regime.

    That plan mis-assigns the two cross supports, each carrying its joint
    probability times the squared gap between the source atoms.
    """
    gap = float(np.sum((instance.x_atoms[0] - instance.x_atoms[1]) ** 2))
    p, pt = instance.p, instance.ptilde
    return (p[0] * pt[1] + p[1] * pt[0]) * gap
