"""Chromosome encoding, GA configuration records and the run result record.

A chromosome is the integer vector ``(m, s_1..s_plen, tau_1..tau_m, N+1)``.
The trailing ``N+1`` is a sentinel that marks the end of the gene sequence.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Sequence

# Set GACPD_DEBUG=1 to validate every chromosome an operator produces.
DEBUG = os.environ.get("GACPD_DEBUG", "") not in ("", "0")


class ConfigError(ValueError):
    """Invalid configuration, chromosome or user input."""


@dataclass(frozen=True)
class Chromosome:
    """A candidate changepoint configuration.

    ``orders`` holds the model hyperparameters (empty for changepoint-only
    search) and ``taus`` the strictly increasing changepoint locations.
    """

    n: int
    taus: tuple[int, ...] = ()
    orders: tuple[int, ...] = ()

    @property
    def m(self) -> int:
        return len(self.taus)

    @property
    def terminator(self) -> int:
        return self.n + 1

    def key(self) -> tuple:
        """Hashable identity used for duplicate tests and fitness caching."""
        return (self.orders, self.taus)

    def to_dict(self) -> dict:
        return {"m": self.m, "orders": list(self.orders), "taus": list(self.taus), "N": self.n}

    @classmethod
    def from_dict(cls, d: dict) -> "Chromosome":
        taus = tuple(int(t) for t in d.get("taus", ()))
        if "m" in d and int(d["m"]) != len(taus):
            raise ConfigError(f"m={d['m']} does not match {len(taus)} locations")
        return cls(n=int(d["N"]), taus=taus, orders=tuple(int(s) for s in d.get("orders", ())))


def encode(c: Chromosome) -> tuple[int, ...]:
    return (c.m, *c.orders, *c.taus, c.n + 1)


def decode(v: Sequence[int], plen: int = 0) -> Chromosome:
    """Inverse of :func:`encode`. Raises ConfigError on malformed vectors."""
    v = [int(x) for x in v]
    if len(v) < 2 + plen:
        raise ConfigError(f"vector of length {len(v)} too short for plen={plen}")
    m = v[0]
    if m < 0 or len(v) != 2 + plen + m:
        raise ConfigError(f"inconsistent m={m} for vector of length {len(v)} and plen={plen}")
    n = v[-1] - 1
    if n < 1:
        raise ConfigError(f"bad terminator {v[-1]}")
    return Chromosome(n=n, orders=tuple(v[1 : 1 + plen]), taus=tuple(v[1 + plen : 1 + plen + m]))


def tau_bounds(n: int, min_dist: int) -> tuple[int, int]:
    """First and last admissible changepoint location (initializer scan bounds)."""
    return 1 + min_dist, n - min_dist


@dataclass(frozen=True)
class GaConfig:
    """Hyperparameters of the basic steady-state GA.

    ``prange`` lists one inclusive integer interval per model-order gene; its
    length is ``plen``. ``option`` must be ``"both"`` exactly when ``prange``
    is non-empty. ``mmax``/``lmax`` default to the largest values the spacing
    rule can need.
    """

    n: int
    pop_size: int = 40
    prange: tuple[tuple[int, int], ...] = ()
    pcrossover: float = 0.95
    pmutation: float = 0.3
    pchangepoint: float = 0.01
    min_dist: int = 1
    mmax: Optional[int] = None
    lmax: Optional[int] = None
    maxgen: int = 100_000
    maxconv: int = 5000
    tol: float = 1e-5
    seed: Optional[int] = None
    option: str = "cp"
    parallel: bool = False
    n_core: Optional[int] = None
    memoize: bool = True
    # maxconv counts every reproduction attempt (True) or accepted replacements only
    conv_counts_attempts: bool = True

    def __post_init__(self):
        object.__setattr__(self, "prange", tuple((int(a), int(b)) for a, b in self.prange))
        if self.mmax is None:
            mmax = min((self.n - 1) // max(self.min_dist, 1), self.n // 2)
            object.__setattr__(self, "mmax", max(mmax, 1))
        if self.lmax is None:
            object.__setattr__(self, "lmax", 2 + self.plen + self.mmax)
        self.check()

    @property
    def plen(self) -> int:
        return len(self.prange)

    def check(self) -> None:
        if self.n < 2:
            raise ConfigError(f"series length N={self.n} must be at least 2")
        if self.pop_size < 2:
            raise ConfigError(f"popSize={self.pop_size} must be at least 2")
        for name in ("pcrossover", "pmutation"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name}={v} must lie in [0, 1]")
        if not 0.0 <= self.pchangepoint <= 1.0:
            raise ConfigError(f"pchangepoint={self.pchangepoint} must lie in [0, 1]")
        if self.min_dist < 1:
            raise ConfigError(f"minDist={self.min_dist} must be at least 1")
        if self.mmax < 1:
            raise ConfigError(f"mmax={self.mmax} must be at least 1")
        if self.lmax < 2 + self.plen + self.mmax:
            raise ConfigError(f"lmax={self.lmax} is below 2 + plen + mmax = {2 + self.plen + self.mmax}")
        if self.maxgen < 0 or self.maxconv < 1:
            raise ConfigError("maxgen must be >= 0 and maxconv >= 1")
        if self.option not in ("cp", "both"):
            raise ConfigError(f"option must be 'cp' or 'both', got {self.option!r}")
        if (self.option == "both") != (self.plen > 0):
            raise ConfigError("option='both' requires a non-empty prange and option='cp' an empty one")
        for lo, hi in self.prange:
            if lo > hi:
                raise ConfigError(f"empty prange interval ({lo}, {hi})")
        if self.n_core is not None and self.n_core < 1:
            raise ConfigError("nCore must be positive")

    def replace(self, **changes) -> "GaConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class IslandConfig(GaConfig):
    """Island-model settings.

    ``maxgen`` is the number of generations each island runs between
    migrations and ``maxconv`` the number of consecutive migrations without
    improvement of the overall best that stops the search.
    """

    pop_size: int = 100
    maxgen: int = 50
    maxconv: int = 100
    num_islands: int = 5
    max_mig: int = 1000

    def check(self) -> None:
        super().check()
        if self.num_islands < 2:
            raise ConfigError(f"numIslands={self.num_islands} must be at least 2")
        if self.pop_size % self.num_islands:
            raise ConfigError(
                f"popSize={self.pop_size} is not divisible by numIslands={self.num_islands}"
            )
        if self.island_size < 2:
            raise ConfigError(f"island size {self.island_size} must be at least 2")
        if self.max_mig < 0:
            raise ConfigError("maxMig must be >= 0")

    @property
    def island_size(self) -> int:
        return self.pop_size // self.num_islands


def validate(c: Chromosome, cfg: GaConfig) -> bool:
    """True iff ``c`` is admissible under ``cfg``."""
    if c.n != cfg.n:
        return False
    if len(c.orders) != cfg.plen:
        return False
    for s, (lo, hi) in zip(c.orders, cfg.prange):
        if not lo <= s <= hi:
            return False
    m = len(c.taus)
    if m > cfg.mmax or 2 + cfg.plen + m > cfg.lmax:
        return False
    if m == 0:
        return True
    first, last = tau_bounds(cfg.n, cfg.min_dist)
    if c.taus[0] < first or c.taus[-1] > last:
        return False
    for a, b in zip(c.taus, c.taus[1:]):
        if b - a < cfg.min_dist:
            return False
    return True


@dataclass
class GaResult:
    best_fitness: float
    best_chromosome: Chromosome
    generations: int
    migrations: int = 0
    trace: list[tuple] = field(default_factory=list)
    elapsed: float = 0.0
    engine: str = "ga"
    settings: dict = field(default_factory=dict)

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "engine": self.engine,
            "best_fitness": _json_float(self.best_fitness),
            "best_chromosome": self.best_chromosome.to_dict(),
            "encoded": list(encode(self.best_chromosome)),
            "generations": self.generations,
            "migrations": self.migrations,
            "settings": self.settings,
        }
        if include_timing:
            d["elapsed"] = self.elapsed
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "GaResult":
        """Rebuild a result from its JSON form; the trace is not part of it."""
        return cls(
            best_fitness=float(d["best_fitness"]),
            best_chromosome=Chromosome.from_dict(d["best_chromosome"]),
            generations=int(d["generations"]),
            migrations=int(d.get("migrations", 0)),
            elapsed=float(d.get("elapsed", 0.0)),
            engine=d.get("engine", "ga"),
            settings=dict(d.get("settings", {})),
        )

    def trace_tsv(self) -> str:
        if self.engine == "gaisl":
            lines = ["migration\tgeneration\tbest_fitness"]
            lines += [f"{mig}\t{gen}\t{fit!r}" for mig, gen, fit in self.trace]
        else:
            lines = ["generation\tbest_fitness"]
            lines += [f"{gen}\t{fit!r}" for gen, fit in self.trace]
        return "\n".join(lines) + "\n"


def _json_float(x: float):
    return x if math.isfinite(x) else "inf"


# execution details that must not change the result record
_RUNTIME_ONLY = ("n_core",)


def config_settings(cfg: GaConfig) -> dict:
    """Plain-dict snapshot of a config, for result files."""
    out = {}
    for f in fields(cfg):
        if f.name in _RUNTIME_ONLY:
            continue
        v = getattr(cfg, f.name)
        out[f.name] = [list(r) for r in v] if f.name == "prange" else v
    return out
