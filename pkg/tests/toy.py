"""Cheap picklable objectives for engine tests."""

import math

import numpy as np

from gacpd.objective import BicIID


class TargetDistance:
    """Smaller when the configuration is closer to ``target``."""

    plen = 0

    def __init__(self, target, n):
        self.target = tuple(target)
        self.n = n

    def __call__(self, c):
        t = np.array(c.taus, dtype=float)
        cost = 10.0 * abs(len(c.taus) - len(self.target))
        for x in self.target:
            cost += float(np.min(np.abs(t - x))) if t.size else 50.0
        return cost


class Exploding:
    plen = 0

    def __call__(self, c):
        if len(c.taus) > 3:
            raise RuntimeError("boom")
        return float(len(c.taus))


class NaNs:
    plen = 0

    def __call__(self, c):
        return math.nan if len(c.taus) % 2 else float(len(c.taus))


def step_series(n=120, taus=(40, 80), deltas=(3.0, -3.0), seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n)
    t = np.arange(1, n + 1)
    for tau, d in zip(taus, deltas):
        x = x + d * (t > tau)
    return x


def iid_objective(n=120, seed=0):
    return BicIID(step_series(n, seed=seed))
