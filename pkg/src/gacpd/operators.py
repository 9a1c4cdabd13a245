"""Selection, crossover and mutation operators.

Each reproduction cycle selects one parent pair, crosses it into a single
child and mutates that child.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import core
from .core import Chromosome, GaConfig, validate
from .population import random_taus


@dataclass(frozen=True)
class ParentPair:
    mom: Chromosome
    dad: Chromosome
    fitness_mom: float
    fitness_dad: float


def rank_probabilities(fitness: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Linear-rank selection probabilities.

    The least fit member gets rank 0 and the fittest rank ``n - 1``; ties keep
    population index order. If every fitness is equal within ``tol`` the
    distribution is uniform.
    """
    fitness = np.asarray(fitness, dtype=float)
    n = fitness.size
    finite = fitness[np.isfinite(fitness)]
    if finite.size == n and (n == 0 or finite.max() - finite.min() <= tol):
        return np.full(n, 1.0 / n)
    if finite.size == 0:
        return np.full(n, 1.0 / n)
    # worst first; stable so equal fitness keeps index order
    order = np.argsort(-fitness, kind="stable")
    ranks = np.empty(n)
    ranks[order] = np.arange(n)
    return ranks / ranks.sum()


def selection_linear_rank(
    members: Sequence[Chromosome], fitness: np.ndarray, rng: np.random.Generator, tol: float = 0.0
) -> ParentPair:
    cdf = np.cumsum(rank_probabilities(fitness, tol))
    i, j = np.searchsorted(cdf, rng.random(2) * cdf[-1], side="right")
    i, j = min(i, len(members) - 1), min(j, len(members) - 1)
    if fitness[i] < fitness[j]:
        i, j = j, i
    # i is now the less fit (mom), j the fitter (dad)
    return ParentPair(members[i], members[j], float(fitness[i]), float(fitness[j]))


def repair_spacing(taus: Sequence[int], min_dist: int, cap: int) -> tuple[int, ...]:
    """Drop points closer than ``min_dist`` to the last kept one, then truncate."""
    kept: list[int] = []
    for t in taus:
        if kept and t - kept[-1] < min_dist:
            continue
        kept.append(t)
        if len(kept) == cap:
            break
    return tuple(kept)


def uniform_crossover(parents: ParentPair, cfg: GaConfig, rng: np.random.Generator) -> Chromosome:
    mom, dad = parents.mom, parents.dad
    if rng.random() >= cfg.pcrossover:
        return dad
    if cfg.plen:
        pick = rng.random(cfg.plen) < 0.5
        orders = tuple(m if k else d for k, m, d in zip(pick, mom.orders, dad.orders))
    else:
        orders = ()
    union = sorted(set(mom.taus) | set(dad.taus))
    if union:
        keep = rng.random(len(union)) < 0.5
        chosen = [t for t, k in zip(union, keep) if k]
    else:
        chosen = []
    cap = min(cfg.mmax, cfg.lmax - 2 - cfg.plen)
    child = Chromosome(n=cfg.n, taus=repair_spacing(chosen, cfg.min_dist, cap), orders=orders)
    if core.DEBUG:
        assert validate(child, cfg), child
    return child


def mutate(child: Chromosome, cfg: GaConfig, rng: np.random.Generator) -> Chromosome:
    if rng.random() >= cfg.pmutation:
        return child
    orders = child.orders
    if cfg.plen:
        redraw = rng.random(cfg.plen) >= 0.5
        orders = tuple(
            int(rng.integers(lo, hi + 1)) if r else s
            for r, s, (lo, hi) in zip(redraw, child.orders, cfg.prange)
        )
    taus = child.taus if rng.random() < 0.5 else random_taus(cfg, rng)
    out = Chromosome(n=cfg.n, taus=taus, orders=orders)
    if core.DEBUG:
        assert validate(out, cfg), out
    return out
