"""Random chromosomes and initial populations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import Chromosome, ConfigError, GaConfig, tau_bounds, validate


@dataclass
class Population:
    members: list[Chromosome]
    fitness: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.fitness is None:
            self.fitness = np.full(len(self.members), np.nan)

    def __len__(self) -> int:
        return len(self.members)


def random_taus(cfg: GaConfig, rng: np.random.Generator) -> tuple[int, ...]:
    """Changepoint block drawn by the sequential Bernoulli scan.

    The cursor starts at ``1 + minDist``; each scanned point is accepted with
    probability ``pchangepoint``, after which the cursor jumps ``minDist``
    ahead (one ahead on rejection). The run of rejections before an
    acceptance is geometric, so the scan is sampled one acceptance at a time.
    """
    p = cfg.pchangepoint
    if p <= 0.0:
        return ()
    cap = min(cfg.mmax, cfg.lmax - 2 - cfg.plen)
    t, last = tau_bounds(cfg.n, cfg.min_dist)
    taus = []
    while t <= last and len(taus) < cap:
        t += int(rng.geometric(p)) - 1
        if t > last:
            break
        taus.append(t)
        t += cfg.min_dist
    return tuple(taus)


def random_orders(cfg: GaConfig, rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(int(rng.integers(lo, hi + 1)) for lo, hi in cfg.prange)


def random_chromosome(cfg: GaConfig, rng: np.random.Generator) -> Chromosome:
    orders = random_orders(cfg, rng)
    return Chromosome(n=cfg.n, taus=random_taus(cfg, rng), orders=orders)


def chromosome_from_suggestion(taus: Sequence[int], cfg: GaConfig, rng: np.random.Generator) -> Chromosome:
    """Sorted, de-duplicated suggestion with randomly drawn orders."""
    c = Chromosome(n=cfg.n, taus=tuple(sorted({int(t) for t in taus})), orders=random_orders(cfg, rng))
    if not validate(c, cfg):
        raise ConfigError(
            f"suggestion {list(c.taus)} violates the bounds or minDist={cfg.min_dist} spacing for N={cfg.n}"
        )
    return c


def initialize_population(
    cfg: GaConfig,
    suggestions: Optional[Sequence[Sequence[int]]] = None,
    rng: Optional[np.random.Generator] = None,
    size: Optional[int] = None,
) -> Population:
    """Build ``size`` (default popSize) distinct members, suggestions first.

    Random members that duplicate an existing one are redrawn; after
    ``100 * size`` failed draws duplicates are accepted, since a tiny search
    space may not hold enough distinct configurations.
    """
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    size = cfg.pop_size if size is None else size
    suggestions = list(suggestions or [])
    if len(suggestions) > size:
        raise ConfigError(f"number of suggestions ({len(suggestions)}) cannot be greater than popSize ({size})")

    members = [chromosome_from_suggestion(s, cfg, rng) for s in suggestions]
    seen = {c.key() for c in members}
    budget = 100 * size
    while len(members) < size:
        c = random_chromosome(cfg, rng)
        if c.key() in seen and budget > 0:
            budget -= 1
            continue
        seen.add(c.key())
        members.append(c)
    return Population(members)
