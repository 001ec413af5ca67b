"""Conformal prediction sets from Type-1 and interval Type-2 fuzzy rule-based classifiers."""

import json as _json

from ._core import (
    DataError,
    Dataset,
    ExperimentConfig,
    Interval,
    Model,
    OrderParams,
    conformal_quantile,
    conformal_rank,
    fit,
    interval_product,
    k_a,
    leq_admissible,
    less_admissible,
    load_csv,
    mcc,
    sub_from_one,
)
from ._core import run_experiment as _run_experiment

__all__ = [
    "DataError",
    "Dataset",
    "ExperimentConfig",
    "Interval",
    "Model",
    "OrderParams",
    "conformal_quantile",
    "conformal_rank",
    "fit",
    "interval_product",
    "k_a",
    "leq_admissible",
    "less_admissible",
    "load_csv",
    "mcc",
    "run_experiment",
    "sub_from_one",
    "sweep",
]


def run_experiment(raw, config, name="dataset"):
    """Repeated train/evaluate cycles; returns a dict with summary and mean sweep."""
    return _json.loads(_run_experiment(raw, config, name))


def sweep(model, normalized, grid=()):
    """Significance sweep of `model` on already-normalized rows, as a dict."""
    return _json.loads(model.sweep(normalized, list(grid)))
