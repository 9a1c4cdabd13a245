"""BIC fitness functions for piecewise-constant-mean models.

An objective is any callable ``f(chromosome) -> float`` where smaller is
better. The classes here bind the series and the base design matrix so the
callable is picklable and can be shipped to worker processes.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import numpy as np

from .arma import FitError, FitReport, fit_iid, fit_regression_arma
from .core import Chromosome, ConfigError, GaConfig, encode

Objective = Callable[[Chromosome], float]


def build_design(xmat: Optional[np.ndarray], taus: Sequence[int], n: int) -> np.ndarray:
    """Base design augmented with one step column ``I{t > tau_i}`` per changepoint (t = 1..N)."""
    base = np.ones((n, 1)) if xmat is None else np.asarray(xmat, dtype=float).reshape(n, -1)
    if not len(taus):
        return base
    t = np.arange(1, n + 1)[:, None]
    steps = (t > np.asarray(taus)[None, :]).astype(float)
    return np.hstack([base, steps])


class _BicBase:
    plen = 0

    def __init__(self, xt, xmat=None, count_locations: bool = True):
        self.xt = np.ascontiguousarray(xt, dtype=float)
        self.n = self.xt.size
        self.xmat = None if xmat is None else np.asarray(xmat, dtype=float).reshape(self.n, -1)
        self.count_locations = count_locations

    def design(self, c: Chromosome) -> np.ndarray:
        return build_design(self.xmat, c.taus, self.n)

    def fit(self, c: Chromosome) -> FitReport:
        raise NotImplementedError

    def __call__(self, c: Chromosome) -> float:
        try:
            return self.fit(c).bic
        except (FitError, np.linalg.LinAlgError):
            return math.inf


class BicIID(_BicBase):
    """BIC of the mean-shift regression with IID normal errors.

    The parameter count is the number of regression coefficients plus the
    variance, plus one per changepoint location when ``count_locations``.
    """

    def fit(self, c: Chromosome) -> FitReport:
        extra = c.m if self.count_locations else 0
        return fit_iid(self.xt, self.design(c), extra)


class BicArma(_BicBase):
    """BIC of the mean-shift regression with ARMA(p, q) errors.

    With ``order=(p, q)`` the orders are fixed and the chromosome carries no
    order genes. With ``order=None`` the chromosome's two order genes are the
    AR and MA orders (``plen = 2``).
    """

    def __init__(self, xt, xmat=None, order: Optional[tuple[int, int]] = (1, 0),
                 count_locations: bool = True, restarts: int = 3):
        super().__init__(xt, xmat, count_locations)
        self.order = None if order is None else (int(order[0]), int(order[1]))
        self.plen = 2 if order is None else 0
        self.restarts = restarts

    def orders_of(self, c: Chromosome) -> tuple[int, int]:
        if self.order is not None:
            return self.order
        if len(c.orders) != 2:
            raise ConfigError(f"expected 2 order genes (p, q), chromosome has {len(c.orders)}")
        return c.orders[0], c.orders[1]

    def fit(self, c: Chromosome) -> FitReport:
        p, q = self.orders_of(c)
        extra = c.m if self.count_locations else 0
        base = build_design(self.xmat, (), self.n)
        return fit_regression_arma(self.xt, base, p, q, extra_params=extra,
                                   restarts=self.restarts, taus=c.taus)


def bic_iid(c: Chromosome, xt, xmat=None, count_locations: bool = True) -> float:
    return BicIID(xt, xmat, count_locations)(c)


def bic_arma(c: Chromosome, xt, xmat=None, fixed_orders: Optional[tuple[int, int]] = None,
             count_locations: bool = True) -> float:
    return BicArma(xt, xmat, fixed_orders, count_locations)(c)


OBJECTIVES = {
    "bic-iid": lambda xt, xmat=None, **kw: BicIID(xt, xmat, **kw),
    "bic-ar1": lambda xt, xmat=None, **kw: BicArma(xt, xmat, order=(1, 0), **kw),
    "bic-arma": lambda xt, xmat=None, order=(1, 0), **kw: BicArma(xt, xmat, order=order, **kw),
    "bic-arma-order": lambda xt, xmat=None, **kw: BicArma(xt, xmat, order=None, **kw),
}


def make_objective(name: str, xt, xmat=None, **kw):
    try:
        factory = OBJECTIVES[name]
    except KeyError:
        raise ConfigError(f"unknown objective {name!r}; choose from {sorted(OBJECTIVES)}") from None
    if "order" in kw and name != "bic-arma":
        raise ConfigError("a fixed order only applies to the bic-arma objective")
    return factory(xt, xmat, **kw)


def check_objective(objective: Objective, cfg: GaConfig) -> None:
    """Probe an objective on the empty configuration before a run.

    Fails when the objective declares a ``plen`` different from the
    configuration's, raises on the probe, or returns a non-numeric value.
    """
    declared = getattr(objective, "plen", None)
    if declared is not None and declared != cfg.plen:
        raise ConfigError(
            f"objective expects plen={declared} order genes but the configuration has plen={cfg.plen}"
        )
    probe = Chromosome(n=cfg.n, taus=(), orders=tuple(lo for lo, _ in cfg.prange))
    try:
        value = objective(probe)
    except Exception as exc:
        raise ConfigError(f"objective failed on probe chromosome {list(encode(probe))}: {exc}") from exc
    try:
        float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"objective returned non-numeric value {value!r}") from None
