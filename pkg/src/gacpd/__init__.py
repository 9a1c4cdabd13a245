"""Changepoint detection and model-order selection with steady-state and
island-model genetic algorithms."""

from .arma import ArmaParams, FitError, SimSpec, arma_loglik, fit_regression_arma, ts_sim
from .core import Chromosome, ConfigError, GaConfig, GaResult, IslandConfig, decode, encode, validate
from .distance import cpt_dist
from .engine import ObjectiveError, run_ga
from .island import run_gaisl
from .objective import BicArma, BicIID, bic_arma, bic_iid, make_objective
from .population import initialize_population, random_chromosome
from .operators import mutate, selection_linear_rank, uniform_crossover

__all__ = [
    "ArmaParams", "BicArma", "BicIID", "Chromosome", "ConfigError", "FitError", "GaConfig",
    "GaResult", "IslandConfig", "ObjectiveError", "SimSpec", "arma_loglik", "bic_arma", "bic_iid",
    "cpt_dist", "decode", "encode", "fit_regression_arma", "initialize_population",
    "make_objective", "mutate", "random_chromosome", "run_ga", "run_gaisl",
    "selection_linear_rank", "ts_sim", "uniform_crossover", "validate",
]
