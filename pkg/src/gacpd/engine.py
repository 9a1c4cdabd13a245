"""Steady-state GA: one offspring per generation replaces the worst member
when it is fitter and not already in the population."""

from __future__ import annotations

import math
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Optional, Sequence

import numpy as np

from . import core
from .core import Chromosome, GaConfig, GaResult, config_settings, encode, validate
from .objective import check_objective
from .operators import mutate, selection_linear_rank, uniform_crossover
from .population import initialize_population


class ObjectiveError(RuntimeError):
    """The objective raised on an admissible chromosome."""


class Evaluator:
    """Objective wrapper: maps non-finite values to +inf and memoizes by chromosome."""

    def __init__(self, objective: Callable[[Chromosome], float], memoize: bool = True):
        self.objective = objective
        self.memoize = memoize
        self.cache: dict = {}
        self.calls = 0

    def __call__(self, c: Chromosome) -> float:
        key = c.key()
        if self.memoize:
            hit = self.cache.get(key)
            if hit is not None:
                return hit
        self.calls += 1
        try:
            value = float(self.objective(c))
        except Exception as exc:
            raise ObjectiveError(f"objective failed on chromosome {list(encode(c))}: {exc}") from exc
        if not math.isfinite(value):
            value = math.inf
        if self.memoize:
            self.cache[key] = value
        return value


def worker_count(requested: Optional[int] = None) -> int:
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("CPTGA_THREADS")
    if cap:
        n = min(n, max(int(cap), 1))
    return max(n, 1)


# per-process evaluator installed in pool workers
_WORKER_EVAL: Optional[Evaluator] = None


def _install_worker(objective, memoize):
    global _WORKER_EVAL
    _WORKER_EVAL = Evaluator(objective, memoize)


def _eval_chunk(chunk):
    return [_WORKER_EVAL(c) for c in chunk]


def make_pool(objective, memoize: bool, workers: int) -> ProcessPoolExecutor:
    return ProcessPoolExecutor(max_workers=workers, initializer=_install_worker, initargs=(objective, memoize))


def evaluate_all(evaluator: Evaluator, members: Sequence[Chromosome], pool=None, workers: int = 1) -> np.ndarray:
    if pool is None or workers <= 1:
        return np.array([evaluator(c) for c in members], dtype=float)
    size = math.ceil(len(members) / workers)
    chunks = [list(members[i : i + size]) for i in range(0, len(members), size)]
    values = [v for part in pool.map(_eval_chunk, chunks) for v in part]
    for c, v in zip(members, values):
        if evaluator.memoize:
            evaluator.cache[c.key()] = v
    return np.array(values, dtype=float)


class Deme:
    """A steady-state (sub)population with its own random stream."""

    def __init__(self, members: list[Chromosome], fitness: np.ndarray, rng: np.random.Generator, cfg: GaConfig):
        self.members = list(members)
        self.fitness = np.array(fitness, dtype=float)
        self.rng = rng
        self.cfg = cfg
        self.keys = Counter(c.key() for c in self.members)
        self.generations = 0
        self.accepted = 0

    def best_index(self) -> int:
        return int(np.argmin(self.fitness))

    def best(self) -> tuple[float, Chromosome]:
        i = self.best_index()
        return float(self.fitness[i]), self.members[i]

    def replace(self, i: int, c: Chromosome, f: float) -> None:
        old = self.members[i].key()
        self.keys[old] -= 1
        if not self.keys[old]:
            del self.keys[old]
        self.members[i] = c
        self.fitness[i] = f
        self.keys[c.key()] += 1

    def step(self, evaluate: Callable[[Chromosome], float]) -> bool:
        """One reproduction attempt. Returns True if the offspring was kept."""
        cfg, rng = self.cfg, self.rng
        self.generations += 1
        parents = selection_linear_rank(self.members, self.fitness, rng, cfg.tol)
        child = mutate(uniform_crossover(parents, cfg, rng), cfg, rng)
        if core.DEBUG:
            assert validate(child, cfg), child
        if child.key() in self.keys:
            return False
        f = evaluate(child)
        worst = int(np.argmax(self.fitness))
        if f < self.fitness[worst]:
            self.replace(worst, child, f)
            self.accepted += 1
            return True
        return False

    def run(self, evaluate: Callable[[Chromosome], float], generations: int) -> "Deme":
        for _ in range(generations):
            self.step(evaluate)
        return self


def run_ga(
    objective: Callable[[Chromosome], float],
    cfg: GaConfig,
    suggestions: Optional[Sequence[Sequence[int]]] = None,
    rng: Optional[np.random.Generator] = None,
    monitor: Optional[Callable[[int, float, Chromosome], None]] = None,
) -> GaResult:
    """Basic steady-state GA.

    Stops after ``maxgen`` generations, or once the best fitness has moved by
    no more than ``tol`` for ``maxconv`` consecutive generations. Every
    reproduction attempt counts as a generation, including discarded ones.
    With ``cfg.parallel`` only the initial population is evaluated in
    worker processes.
    """
    start = time.perf_counter()
    check_objective(objective, cfg)
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    evaluator = Evaluator(objective, cfg.memoize)
    pop = initialize_population(cfg, suggestions, rng)
    workers = worker_count(cfg.n_core) if cfg.parallel else 1
    if workers > 1:
        with make_pool(objective, cfg.memoize, workers) as pool:
            fitness = evaluate_all(evaluator, pop.members, pool, workers)
    else:
        fitness = evaluate_all(evaluator, pop.members)
    deme = Deme(pop.members, fitness, rng, cfg)

    best, best_c = deme.best()
    trace = [(0, best)]
    conv = 0
    for gen in range(1, cfg.maxgen + 1):
        accepted = deme.step(evaluator)
        new_best, best_c = deme.best()
        if new_best < trace[-1][1]:
            trace.append((gen, new_best))
            if monitor is not None:
                monitor(gen, new_best, best_c)
        if best - new_best > cfg.tol:
            conv = 0
        elif cfg.conv_counts_attempts or accepted:
            conv += 1
        best = new_best
        if conv >= cfg.maxconv:
            break
    if trace[-1][0] != deme.generations:
        trace.append((deme.generations, best))

    best, best_c = deme.best()
    return GaResult(
        best_fitness=best,
        best_chromosome=best_c,
        generations=deme.generations,
        migrations=0,
        trace=trace,
        elapsed=time.perf_counter() - start,
        engine="ga",
        settings=config_settings(cfg),
    )
