import json

from ._lanecast import (
    FORMAT,
    Error,
    InvalidConfig,
    SchemaError,
    UniformCubicSpline,
    centerline_deviation,
    render_svg,
    resample,
)
from . import _lanecast

__all__ = [
    "FORMAT",
    "Error",
    "InvalidConfig",
    "SchemaError",
    "UniformCubicSpline",
    "centerline_deviation",
    "estimate",
    "render_svg",
    "resample",
    "simulate",
]


def simulate(seed, noise_sigma=1.0, arms=0, lanes_max=0):
    """Returns (dataset text, ground truth dict)."""
    dataset, truth = _lanecast.simulate(seed, noise_sigma, arms, lanes_max)
    return dataset, json.loads(truth)


def estimate(dataset, samples=5000, seed=0):
    """Runs the estimator on JSON Lines text; returns (map dict, timings dict)."""
    out = _lanecast.estimate(dataset, samples, seed)
    timings = {"coarse_ms": out["coarse_ms"], "refine_ms": out["refine_ms"]}
    return json.loads(out["map"]), timings
