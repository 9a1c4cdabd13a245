"""Replicated simulation studies: simulate, detect, score against the truth.

A scenario is read from a ``key = value`` file. Every replication draws its
own simulation and search seeds from the scenario's master seed, so a study
is reproducible and any single replication can be rerun on its own.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import time
import traceback
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from .arma import SimSpec, ts_sim
from .core import ConfigError, GaConfig, IslandConfig
from .distance import cpt_dist
from .engine import run_ga, worker_count
from .island import run_gaisl
from .objective import make_objective


def read_kv(path: str) -> dict[str, str]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    with open(path) as fh:
        text = fh.read()
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#",))
    parser.optionxform = lambda k: k.strip().lower().replace("-", "_")
    try:
        parser.read_string("[top]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return dict(parser["top"])


def parse_floats(s: str) -> tuple[float, ...]:
    s = s.strip()
    return tuple(float(x) for x in s.split(",") if x.strip()) if s else ()


def parse_ints(s: str) -> tuple[int, ...]:
    s = s.strip()
    return tuple(int(x) for x in s.split(",") if x.strip()) if s else ()


def parse_prange(s: str) -> tuple[tuple[int, int], ...]:
    """``"0-3,0-3"`` -> ``((0, 3), (0, 3))``."""
    out = []
    for part in s.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        if not sep:
            raise ConfigError(f"prange entries look like lo-hi, got {part!r}")
        out.append((int(lo), int(hi)))
    return tuple(out)


@dataclass(frozen=True)
class Scenario:
    replications: int = 10
    n: int = 1000
    beta: tuple[float, ...] = (0.5,)
    sigma: float = 1.0
    phi: tuple[float, ...] = (0.5,)
    theta: tuple[float, ...] = ()
    delta: tuple[float, ...] = (2.0, -2.0)
    cp: tuple[int, ...] = (250, 750)
    engine: str = "gaisl"
    objective: str = "bic-ar1"
    order: Optional[tuple[int, int]] = None
    prange: tuple[tuple[int, int], ...] = ()
    pop_size: int = 100
    num_islands: int = 5
    maxgen: Optional[int] = None
    maxconv: Optional[int] = None
    max_mig: int = 1000
    pcrossover: float = 0.95
    pmutation: float = 0.3
    pchangepoint: Optional[float] = None
    min_dist: tuple[int, ...] = (1,)
    seed: int = 0
    workers: int = 1

    @classmethod
    def from_mapping(cls, kv: dict[str, str]) -> "Scenario":
        known = {f.name for f in fields(cls)}
        unknown = set(kv) - known
        if unknown:
            raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
        conv = {
            "beta": parse_floats, "phi": parse_floats, "theta": parse_floats, "delta": parse_floats,
            "cp": parse_ints, "min_dist": parse_ints, "prange": parse_prange,
            "order": lambda s: parse_ints(s) or None,
            "sigma": float, "pcrossover": float, "pmutation": float, "pchangepoint": float,
            "engine": str.strip, "objective": str.strip,
        }
        args = {}
        for k, v in kv.items():
            try:
                args[k] = conv.get(k, int)(v)
            except ValueError as exc:
                raise ConfigError(f"bad value for {k}: {v!r} ({exc})") from None
        return cls(**args)

    def sim_spec(self, seed: int) -> SimSpec:
        return SimSpec(n=self.n, beta=self.beta, sigma=self.sigma, phi=self.phi, theta=self.theta,
                       delta=self.delta, cp_loc=self.cp, seed=seed)

    def ga_config(self, min_dist: int, seed: int) -> GaConfig:
        common = dict(
            n=self.n, pop_size=self.pop_size, prange=self.prange,
            option="both" if self.prange else "cp",
            pcrossover=self.pcrossover, pmutation=self.pmutation,
            pchangepoint=self.pchangepoint if self.pchangepoint is not None else 10 / self.n,
            min_dist=min_dist, seed=seed,
        )
        if self.maxgen is not None:
            common["maxgen"] = self.maxgen
        if self.maxconv is not None:
            common["maxconv"] = self.maxconv
        if self.engine == "gaisl":
            return IslandConfig(num_islands=self.num_islands, max_mig=self.max_mig, **common)
        if self.engine == "ga":
            return GaConfig(**common)
        raise ConfigError(f"engine must be 'ga' or 'gaisl', got {self.engine!r}")

    def check(self) -> None:
        if self.replications < 0:
            raise ConfigError("replications must be >= 0")
        self.sim_spec(0).check()
        for md in self.min_dist:
            self.ga_config(md, 0)


def replication_seeds(master: int, count: int) -> list[tuple[int, int]]:
    """(simulation seed, search seed) for each replication."""
    children = np.random.SeedSequence(master).spawn(count)
    return [tuple(int(x) for x in ch.generate_state(2, dtype=np.uint32)) for ch in children]


ROW_FIELDS = ["min_dist", "rep", "sim_seed", "ga_seed", "m_hat", "taus", "orders",
              "fitness", "dist", "generations", "migrations", "elapsed", "error"]


def run_replication(scn: Scenario, min_dist: int, rep: int, sim_seed: int, ga_seed: int) -> dict:
    row = {"min_dist": min_dist, "rep": rep, "sim_seed": sim_seed, "ga_seed": ga_seed,
           "m_hat": "", "taus": "", "orders": "", "fitness": "", "dist": "",
           "generations": "", "migrations": "", "elapsed": "", "error": ""}
    start = time.perf_counter()
    try:
        xt = ts_sim(scn.sim_spec(sim_seed))
        kw = {"order": scn.order} if scn.order is not None else {}
        obj = make_objective(scn.objective, xt, **kw)
        cfg = scn.ga_config(min_dist, ga_seed)
        res = (run_gaisl if scn.engine == "gaisl" else run_ga)(obj, cfg)
        c = res.best_chromosome
        row.update(m_hat=c.m, taus=" ".join(map(str, c.taus)), orders=" ".join(map(str, c.orders)),
                   fitness=repr(res.best_fitness), dist=repr(cpt_dist(c.taus, scn.cp, scn.n)),
                   generations=res.generations, migrations=res.migrations)
    except Exception as exc:  # recorded, the study carries on
        row["error"] = f"{type(exc).__name__}: {exc}"
        if not str(exc):
            row["error"] += traceback.format_exc(limit=1)
    row["elapsed"] = round(time.perf_counter() - start, 4)
    return row


def _run_job(args):
    return run_replication(*args)


def aggregate(scn: Scenario, rows: list[dict]) -> dict:
    """Per-minDist distribution of m-hat and orders, mean distance and mean runtime."""
    report = {"scenario": _scenario_dict(scn), "by_min_dist": {}}
    for md in scn.min_dist:
        sub = [r for r in rows if r["min_dist"] == md]
        ok = [r for r in sub if not r["error"]]
        m_counts = Counter(int(r["m_hat"]) for r in ok)
        o_counts = Counter(r["orders"] for r in ok if r["orders"])
        report["by_min_dist"][str(md)] = {
            "replications": len(sub),
            "failures": len(sub) - len(ok),
            "m_hat_pct": {str(k): 100.0 * v / len(ok) for k, v in sorted(m_counts.items())},
            "orders_pct": {k: 100.0 * v / len(ok) for k, v in sorted(o_counts.items())},
            "mean_dist": float(np.mean([float(r["dist"]) for r in ok])) if ok else None,
            "mean_elapsed": float(np.mean([float(r["elapsed"]) for r in sub])) if sub else None,
        }
    return report


def _scenario_dict(scn: Scenario) -> dict:
    d = asdict(scn)
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


@dataclass
class StudyResult:
    rows: list[dict] = field(default_factory=list)
    report: dict = field(default_factory=dict)

    def rows_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=ROW_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows)
        return buf.getvalue()

    def report_json(self) -> str:
        return json.dumps(self.report, indent=2, sort_keys=True)


def run_study(scn: Scenario, progress=None) -> StudyResult:
    scn.check()
    seeds = replication_seeds(scn.seed, scn.replications)
    jobs = [(scn, md, rep, s1, s2) for md in scn.min_dist for rep, (s1, s2) in enumerate(seeds)]
    workers = min(worker_count(scn.workers), max(len(jobs), 1))
    rows = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for row in pool.map(_run_job, jobs):
                rows.append(row)
                if progress:
                    progress(row)
    else:
        for job in jobs:
            row = _run_job(job)
            rows.append(row)
            if progress:
                progress(row)
    return StudyResult(rows, aggregate(scn, rows))
