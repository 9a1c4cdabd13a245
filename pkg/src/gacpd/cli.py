"""Command-line front end.

    gacpd simulate --n 1000 --beta 0.5 --phi 0.5 --delta 2,-2 --cp 250,750 --seed 1234 -o x.csv
    gacpd detect -i x.csv --engine gaisl --seed 1 --out result.json --trace trace.tsv
    gacpd distance --tau1 249,750 --tau2 250,750 --n 1000
    gacpd study scenario.txt --rows rows.csv --report report.json

Exit codes: 0 success, 2 invalid input or configuration, 3 objective or fit failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .arma import FitError, SimSpec, ts_sim
from .core import ConfigError, GaConfig, GaResult, IslandConfig
from .distance import cpt_dist
from .engine import ObjectiveError, run_ga
from .island import run_gaisl
from .objective import OBJECTIVES, make_objective
from .study import Scenario, parse_floats, parse_ints, parse_prange, read_kv, run_study

EXIT_OK, EXIT_CONFIG, EXIT_FIT = 0, 2, 3


class CliError(ConfigError):
    pass


# ---------------------------------------------------------------------------
# files


def write_series(path: str, x: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("x\n")
        for v in x:
            fh.write(f"{float(v)!r}\n")


def read_series(path: str, column: str = "x") -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    if not rows or column not in rows[0]:
        raise CliError(f"{path}: expected a header with column {column!r}")
    try:
        return np.array([float(r[column]) for r in rows])
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None


def read_matrix(path: str) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read design matrix {path}: {exc}") from None
    return data


# ---------------------------------------------------------------------------
# summary


def summary_text(res: GaResult) -> str:
    s = res.settings
    island = res.engine == "gaisl"
    title = "Changepoint Detection via Island Model GA" if island else "Changepoint Detection via GA"
    bar = "#" * 47
    lines = [bar, f"#{title:^45}#", bar, "   Settings: "]
    lines.append(f"   Population size         =  {s['pop_size']} ")
    if island:
        lines.append(f"   Number of Island        =  {s['num_islands']} ")
        lines.append(f"   Island size             =  {s['pop_size'] // s['num_islands']} ")
    lines.append(f"   Number of generations   =  {res.generations} ")
    if island:
        lines.append(f"   Number of migrations    =  {res.migrations} ")
    lines += [
        f"   Crossover probability   =  {s['pcrossover']:g} ",
        f"   Mutation probability    =  {s['pmutation']:g} ",
        f"   Changepoint probability =  {s['pchangepoint']:g} ",
        f"   Task mode               =  {s['option']} ",
        f"   Parallel Usage          =  {'TRUE' if s['parallel'] else 'FALSE'} ",
        "",
        "##### Island GA results ##### " if island else "##### GA results ##### ",
        f"   Optimal Fitness value = {res.best_fitness:.7g} ",
        "   Optimal Solution: ",
    ]
    c = res.best_chromosome
    lines.append(f"        Number of Changepoints =  {c.m} ")
    if c.orders:
        lines.append("        Model hyperparameters:")
        names = ["ar", "ma"] if len(c.orders) == 2 else [f"s{i + 1}" for i in range(len(c.orders))]
        lines += [f"             {nm} = {v} " for nm, v in zip(names, c.orders)]
    locs = " ".join(map(str, c.taus)) if c.taus else "(none)"
    lines.append(f"        Changepoints Locations =  {locs}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# detect configuration: defaults < config file < flags

DETECT_KEYS = {
    # key: (converter, default)
    "input": (str, None),
    "column": (str, "x"),
    "xmat": (str, None),
    "objective": (str, "bic-ar1"),
    "order": (parse_ints, None),
    "engine": (str, "ga"),
    "pop_size": (int, None),
    "islands": (int, 5),
    "maxgen": (int, None),
    "maxconv": (int, None),
    "max_mig": (int, 1000),
    "pcrossover": (float, 0.95),
    "pmutation": (float, 0.3),
    "pchangepoint": (float, 0.01),
    "min_dist": (int, 1),
    "mmax": (int, None),
    "lmax": (int, None),
    "tol": (float, 1e-5),
    "seed": (int, None),
    "option": (str, None),
    "prange": (parse_prange, ()),
    "parallel": (lambda s: str(s).strip().lower() in ("1", "true", "yes", "on"), False),
    "n_core": (int, None),
    "suggest": (str, None),
    "suggest_file": (str, None),
    "out": (str, None),
    "trace": (str, None),
    "count_locations": (lambda s: str(s).strip().lower() in ("1", "true", "yes", "on"), True),
}


def merge_settings(args: argparse.Namespace) -> dict:
    settings = {k: d for k, (_, d) in DETECT_KEYS.items()}
    if args.config:
        try:
            kv = read_kv(args.config)
        except OSError as exc:
            raise CliError(f"cannot read config {args.config}: {exc}") from None
        for k, v in kv.items():
            if k not in DETECT_KEYS:
                raise CliError(f"unknown config key {k!r} in {args.config}")
            try:
                settings[k] = DETECT_KEYS[k][0](v)
            except ValueError as exc:
                raise CliError(f"bad value for {k} in {args.config}: {exc}") from None
    for k in DETECT_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            settings[k] = v
    return settings


def parse_suggestions(s: Optional[str], path: Optional[str] = None) -> Optional[list[list[int]]]:
    out = [list(parse_ints(part)) for part in s.split(";")] if s else []
    if path:
        try:
            lines = Path(path).read_text().splitlines()
        except OSError as exc:
            raise CliError(f"cannot read suggestions {path}: {exc}") from None
        out += [list(parse_ints(line)) for line in lines if line.strip()]
    return out or None


def build_config(st: dict, n: int) -> GaConfig:
    option = st["option"] or ("both" if st["prange"] else "cp")
    common = dict(
        n=n, prange=st["prange"], option=option, pcrossover=st["pcrossover"],
        pmutation=st["pmutation"], pchangepoint=st["pchangepoint"], min_dist=st["min_dist"],
        mmax=st["mmax"], lmax=st["lmax"], tol=st["tol"], seed=st["seed"],
        parallel=st["parallel"], n_core=st["n_core"],
    )
    for k in ("pop_size", "maxgen", "maxconv"):
        if st[k] is not None:
            common[k] = st[k]
    if st["engine"] == "gaisl":
        return IslandConfig(num_islands=st["islands"], max_mig=st["max_mig"], **common)
    if st["engine"] == "ga":
        return GaConfig(**common)
    raise CliError(f"--engine must be ga or gaisl, got {st['engine']!r}")


def cmd_detect(args) -> int:
    st = merge_settings(args)
    if not st["input"]:
        raise CliError("an input series is required (--input or 'input' in the config file)")
    xt = read_series(st["input"], st["column"])
    xmat = read_matrix(st["xmat"]) if st["xmat"] else None
    cfg = build_config(st, xt.size)
    kw = {"count_locations": st["count_locations"]}
    if st["order"]:
        if len(st["order"]) != 2:
            raise CliError("--order takes p,q")
        kw["order"] = tuple(st["order"])
    obj = make_objective(st["objective"], xt, xmat, **kw)
    engine = run_gaisl if isinstance(cfg, IslandConfig) else run_ga
    res = engine(obj, cfg, suggestions=parse_suggestions(st["suggest"], st["suggest_file"]))
    sys.stdout.write(summary_text(res))
    if st["out"]:
        Path(st["out"]).write_text(res.to_json() + "\n")
    if st["trace"]:
        Path(st["trace"]).write_text(res.trace_tsv())
    return EXIT_OK


def cmd_simulate(args) -> int:
    xmat = read_matrix(args.xmat) if args.xmat else None
    spec = SimSpec(
        n=args.n, beta=parse_floats(args.beta), xmat=xmat, sigma=args.sigma,
        phi=parse_floats(args.phi), theta=parse_floats(args.theta),
        delta=parse_floats(args.delta), cp_loc=parse_ints(args.cp), seed=args.seed,
    )
    try:
        x = ts_sim(spec)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    write_series(args.output, x)
    side = {
        "n": spec.n, "beta": list(spec.beta), "sigma": spec.sigma, "phi": list(spec.phi),
        "theta": list(spec.theta), "delta": list(spec.delta), "taus": list(spec.cp_loc),
        "seed": spec.seed, "xmat": args.xmat, "burn_in": spec.burn_in(),
    }
    Path(args.output + ".json").write_text(json.dumps(side, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_distance(args) -> int:
    d = cpt_dist(parse_ints(args.tau1), parse_ints(args.tau2), args.n)
    print(f"{d:.10g}")
    return EXIT_OK


def cmd_study(args) -> int:
    scn = Scenario.from_mapping(read_kv(args.scenario))
    if args.workers is not None:
        scn = Scenario(**{**scn.__dict__, "workers": args.workers})

    def progress(row):
        if args.verbose:
            print(f"minDist={row['min_dist']} rep={row['rep']} m={row['m_hat']} "
                  f"taus={row['taus']} {row['error']}", file=sys.stderr)

    result = run_study(scn, progress)
    if args.rows:
        Path(args.rows).write_text(result.rows_csv())
    if args.report:
        Path(args.report).write_text(result.report_json() + "\n")
    print(result.report_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gacpd", description="Changepoint detection by genetic algorithm")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="simulate a mean-shift series with ARMA errors")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--beta", default="0", help="comma-separated regression coefficients")
    sp.add_argument("--xmat", help="CSV design matrix with a header row (N x len(beta))")
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--phi", default="")
    sp.add_argument("--theta", default="")
    sp.add_argument("--delta", default="", help="shift sizes, e.g. 2,-2")
    sp.add_argument("--cp", default="", help="changepoint locations, e.g. 250,750")
    sp.add_argument("--seed", type=int)
    sp.add_argument("-o", "--output", default="series.csv")
    sp.set_defaults(func=cmd_simulate)

    dp = sub.add_parser("detect", help="search for the best changepoint configuration")
    dp.add_argument("-i", "--input")
    dp.add_argument("--config", help="key = value file; flags override it")
    dp.add_argument("--column")
    dp.add_argument("--xmat")
    dp.add_argument("--objective", choices=sorted(OBJECTIVES))
    dp.add_argument("--order", type=parse_ints, help="fixed p,q for bic-arma")
    dp.add_argument("--engine", choices=["ga", "gaisl"])
    dp.add_argument("--pop-size", dest="pop_size", type=int)
    dp.add_argument("--islands", type=int)
    dp.add_argument("--maxgen", type=int)
    dp.add_argument("--maxconv", type=int)
    dp.add_argument("--max-mig", dest="max_mig", type=int)
    dp.add_argument("--pcrossover", type=float)
    dp.add_argument("--pmutation", type=float)
    dp.add_argument("--pchangepoint", type=float)
    dp.add_argument("--min-dist", dest="min_dist", type=int)
    dp.add_argument("--mmax", type=int)
    dp.add_argument("--lmax", type=int)
    dp.add_argument("--tol", type=float)
    dp.add_argument("--seed", type=int)
    dp.add_argument("--option", choices=["cp", "both"])
    dp.add_argument("--prange", type=parse_prange, help="order ranges, e.g. 0-3,0-3")
    dp.add_argument("--parallel", action="store_const", const=True)
    dp.add_argument("--n-core", dest="n_core", type=int)
    dp.add_argument("--suggest", help="suggested configurations, e.g. '250,750;300'")
    dp.add_argument("--suggest-file", dest="suggest_file", help="one comma-separated configuration per line")
    dp.add_argument("--no-count-locations", dest="count_locations", action="store_const", const=False)
    dp.add_argument("--out", help="result JSON")
    dp.add_argument("--trace", help="best-fitness trace TSV")
    dp.set_defaults(func=cmd_detect)

    xp = sub.add_parser("distance", help="distance between two changepoint configurations")
    xp.add_argument("--tau1", default="")
    xp.add_argument("--tau2", default="")
    xp.add_argument("--n", type=int, required=True)
    xp.set_defaults(func=cmd_distance)

    tp = sub.add_parser("study", help="run a replicated simulation study")
    tp.add_argument("scenario", help="key = value scenario file")
    tp.add_argument("--rows", help="per-replication CSV")
    tp.add_argument("--report", help="aggregate JSON")
    tp.add_argument("--workers", type=int)
    tp.add_argument("-v", "--verbose", action="store_true")
    tp.set_defaults(func=cmd_study)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ObjectiveError, FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
