"""Island-model GA: steady-state islands evolve independently for ``maxgen``
generations, then each island's worst member is replaced by the best member
of another, randomly chosen island."""

from __future__ import annotations

import time
from typing import Callable, Optional, Sequence

import numpy as np

from . import engine
from .core import Chromosome, GaResult, IslandConfig, config_settings
from .engine import Deme, Evaluator, evaluate_all, make_pool, worker_count
from .objective import check_objective
from .population import initialize_population


def _run_epoch(args):
    deme, generations = args
    return deme.run(engine._WORKER_EVAL, generations)


def migrate(demes: list[Deme], rng: np.random.Generator) -> list[int]:
    """Synchronous best-for-worst migration; returns the source island of each island.

    Sources are drawn uniformly among the other islands and all immigrants
    are taken from the pre-migration snapshot, so the result does not depend
    on the order islands are processed in.
    """
    k = len(demes)
    snapshot = [d.best() for d in demes]
    sources = []
    for i, deme in enumerate(demes):
        j = int(rng.integers(k - 1))
        j += j >= i
        sources.append(j)
        f, c = snapshot[j]
        deme.replace(int(np.argmax(deme.fitness)), c, f)
    return sources


def run_gaisl(
    objective: Callable[[Chromosome], float],
    cfg: IslandConfig,
    suggestions: Optional[Sequence[Sequence[int]]] = None,
    rng: Optional[np.random.Generator] = None,
    monitor: Optional[Callable[[int, float, Chromosome], None]] = None,
) -> GaResult:
    """Island-model GA.

    Stops after ``max_mig`` migrations, or once the overall best fitness has
    moved by no more than ``tol`` for ``maxconv`` consecutive migrations.
    Each island draws from its own stream spawned from the master generator,
    so results are identical with or without ``cfg.parallel`` and for any
    worker count. The reported generation count is per island.
    """
    start = time.perf_counter()
    check_objective(objective, cfg)
    master = np.random.default_rng(cfg.seed) if rng is None else rng
    evaluator = Evaluator(objective, cfg.memoize)
    pop = initialize_population(cfg, suggestions, master)

    workers = min(worker_count(cfg.n_core or cfg.num_islands), cfg.num_islands) if cfg.parallel else 1
    pool = make_pool(objective, cfg.memoize, workers) if workers > 1 else None
    try:
        fitness = evaluate_all(evaluator, pop.members, pool, workers)
        perm = master.permutation(cfg.pop_size)
        streams = master.spawn(cfg.num_islands)
        size = cfg.island_size
        demes = []
        for i in range(cfg.num_islands):
            idx = perm[i * size : (i + 1) * size]
            demes.append(Deme([pop.members[j] for j in idx], fitness[idx], streams[i], cfg))

        best, best_c = min((d.best() for d in demes), key=lambda fc: fc[0])
        trace = [(0, 0, best)]
        conv = 0
        migrations = 0
        for mig in range(1, cfg.max_mig + 1):
            if pool is None:
                for d in demes:
                    d.run(evaluator, cfg.maxgen)
            else:
                demes = list(pool.map(_run_epoch, [(d, cfg.maxgen) for d in demes]))
            migrate(demes, master)
            migrations = mig
            new_best, best_c = min((d.best() for d in demes), key=lambda fc: fc[0])
            trace.append((mig, mig * cfg.maxgen, new_best))
            if monitor is not None:
                monitor(mig, new_best, best_c)
            if best - new_best > cfg.tol:
                conv = 0
            else:
                conv += 1
            best = new_best
            if conv >= cfg.maxconv:
                break
    finally:
        if pool is not None:
            pool.shutdown()

    best, best_c = min((d.best() for d in demes), key=lambda fc: fc[0])
    return GaResult(
        best_fitness=best,
        best_chromosome=best_c,
        generations=migrations * cfg.maxgen,
        migrations=migrations,
        trace=trace,
        elapsed=time.perf_counter() - start,
        engine="gaisl",
        settings=config_settings(cfg),
    )
