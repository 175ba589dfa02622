"""Deterministic, counter-based random number generation.

All synthetic data and training schedules in this package draw from the
SplitMix64 sequence, a published 64-bit mixing function.  Because the
generator is a pure function of (seed, counter), streams are reproducible
bit-for-bit across runs and platforms, can be generated out of order, and
a training run can be resumed mid-stream by restoring the counter.

Uniform doubles are exact (pure integer arithmetic followed by a single
multiply by 2**-53).  Gaussian deviates use Box-Muller and therefore
inherit the platform's libm accuracy for log/cos/sin (identical in
practice on IEEE-754 doubles).
"""

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


def _mix(z):
    # uint64 wraparound is the algorithm, not an error
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


class Rng:
    """SplitMix64 stream identified by (seed, counter).

    The k-th raw draw is ``mix(seed + (counter + k + 1) * GOLDEN)``, so any
    draw can be reproduced from the counter alone.
    """

    def __init__(self, seed, counter=0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.counter = int(counter)

    def state(self):
        return {"seed": self.seed, "counter": self.counter}

    def _raw(self, n):
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            base = (np.uint64(self.seed) + idx * _GOLDEN) & _MASK
        return _mix(base)

    def uniform(self, n=None, low=0.0, high=1.0):
        """Uniform doubles in [low, high); 53-bit resolution."""
        m = 1 if n is None else int(np.prod(n))
        u = (self._raw(m) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)
        out = low + u * (high - low)
        if n is None:
            return float(out[0])
        return out.reshape(n)

    def integers(self, upper, n=None):
        """Integers in [0, upper) via rejection-free modulo (upper << 2**64)."""
        if upper <= 0:
            raise ValueError("upper must be positive")
        m = 1 if n is None else int(np.prod(n))
        v = (self._raw(m) % np.uint64(upper)).astype(np.int64)
        if n is None:
            return int(v[0])
        return v.reshape(n)

    def normal(self, n=None, sigma=1.0):
        """Gaussian deviates via Box-Muller on consecutive uniform pairs."""
        m = 1 if n is None else int(np.prod(n))
        pairs = (m + 1) // 2
        u = self.uniform(2 * pairs).reshape(2, pairs)
        # guard against log(0); the raw stream never yields exactly 1.0
        r = np.sqrt(-2.0 * np.log1p(-u[0]))
        theta = 2.0 * np.pi * u[1]
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:m] * sigma
        if n is None:
            return float(z[0])
        return z.reshape(n)

    def shuffle_index(self, length):
        """Deterministic permutation of range(length) (Fisher-Yates)."""
        perm = np.arange(length)
        for i in range(length - 1, 0, -1):
            j = self.integers(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def spawn(self, tag):
        """Independent substream keyed by an integer tag."""
        derived = _mix(np.uint64(self.seed) ^ _mix(np.uint64(int(tag) & 0xFFFFFFFFFFFFFFFF)))
        return Rng(int(derived))
