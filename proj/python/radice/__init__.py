"""Python interface to the radice root-cause diagnosis library."""

import csv
import io
import json

from ._radice import (
    CycleError,
    InvalidArgument,
    NoAnomalyError,
    ParseError,
    RadiceError,
    adjusted_score,
    detect_window,
    load_csv,
    orient_joint,
)
from . import _radice

__all__ = [
    "CycleError",
    "InvalidArgument",
    "NoAnomalyError",
    "ParseError",
    "RadiceError",
    "adjusted_score",
    "detect_window",
    "diagnose",
    "discover",
    "load_csv",
    "orient_joint",
    "run_experiment",
    "simulate_run",
]


def _split(metrics):
    names = list(metrics)
    return names, [list(map(float, metrics[n])) for n in names]


def discover(metrics, tau_max=1, alpha=None):
    """Causal graph of ``{name: series}`` as a dict, plus the alpha used."""
    graph, used = _radice.discover(*_split(metrics), tau_max=tau_max, alpha=alpha)
    return json.loads(graph), used


def diagnose(metrics, target, dk=None, window=None, min_sim=0.5):
    """Root-cause report (a dict) for an anomaly of ``target``.

    ``dk`` is a domain-knowledge dict with optional ``levels``, ``edges`` and
    ``rules``; ``window`` an inclusive ``(start, end)`` pair.
    """
    names, columns = _split(metrics)
    text = _radice.diagnose(names, columns, target, json.dumps(dk) if dk else "", window, min_sim)
    return json.loads(text)


def simulate_run(graph, seed, delta=3.0, length=99):
    """One synthetic incident from a ground-truth graph dict."""
    run = _radice.simulate_run(json.dumps(graph), seed, delta, length)
    run["metrics"] = dict(zip(run.pop("names"), run.pop("columns")))
    return run


def run_experiment(fixtures, variants="nodk,L", runs=50, seed=0, jobs=1):
    """Evaluation rows as a list of dicts."""
    text = _radice.run_experiment([str(f) for f in fixtures], variants, runs, seed, jobs)
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        for key in ("graph_size", "runs", "seed"):
            row[key] = int(row[key])
        for key in ("recall", "precision", "mean_runtime_s"):
            row[key] = float(row[key])
    return rows
