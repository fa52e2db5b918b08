"""Transition probabilities, isolation and their sweeps over time and flux.

``t_ab`` and ``t_ba`` are squared propagator matrix elements,
``t_ab = |<a|U(t)|b>|^2`` and ``t_ba = |<b|U(t)|a>|^2``, so ``t_ba`` is
the probability of the ``|a> -> |b>`` transition driven by the ``j_ba``
coupling. Isolation is ``t_ab / t_ba``.
"""
import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .atom import adiabatic_eliminate, build_effective_hamiltonian, build_full_hamiltonian
from .errors import InvalidInputError
from .operators import expm

__all__ = [
    "DynamicsPoint",
    "SweepResult",
    "MODELS",
    "model_hamiltonian",
    "transition_probabilities",
    "isolation_ratio",
    "time_grid",
    "flux_grid",
    "sweep_time",
    "sweep_flux",
    "resolve_workers",
    "parallel_map",
    "format_float",
]

MODELS = ("full", "effective")
TINY = 1e-300


@dataclass(frozen=True)
class DynamicsPoint:
    t: float
    t_ab: float
    t_ba: float
    isolation: float

    @classmethod
    def from_propagator(cls, t, u):
        t_ab = float(abs(u[0, 1]) ** 2)
        t_ba = float(abs(u[1, 0]) ** 2)
        return cls(t=float(t), t_ab=t_ab, t_ba=t_ba, isolation=isolation_ratio(t_ab, t_ba))


def isolation_ratio(t_ab, t_ba):
    """``t_ab / t_ba``; ``inf`` when only ``t_ba`` vanishes, ``nan`` when both do."""
    if t_ba > TINY:
        return t_ab / t_ba
    return math.inf if t_ab > TINY else math.nan


@dataclass(frozen=True)
class SweepResult:
    axis_name: str
    axis_values: tuple
    points: tuple
    model: str

    def __post_init__(self):
        if len(self.axis_values) != len(self.points):
            raise InvalidInputError("one point per axis value required")
        if any(b <= a for a, b in zip(self.axis_values, self.axis_values[1:])):
            raise InvalidInputError("axis values must be strictly increasing")

    def column(self, name):
        return np.array([getattr(pt, name) for pt in self.points])

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["axis", "t_ab", "t_ba", "isolation"])
        for x, pt in zip(self.axis_values, self.points):
            writer.writerow([format_float(v) for v in (x, pt.t_ab, pt.t_ba, pt.isolation)])
        return buf.getvalue()

    def to_dict(self):
        return {
            "axis_name": self.axis_name,
            "axis_values": [_json_float(x) for x in self.axis_values],
            "points": [
                {k: _json_float(getattr(pt, k)) for k in ("t", "t_ab", "t_ba", "isolation")}
                for pt in self.points
            ],
            "model": self.model,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def format_float(x):
    """17 significant digits; non-finite values as ``inf``/``-inf``/``nan``."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else format_float(x)


def resolve_workers(workers=None):
    """Thread count: explicit value, else ``NONRECIP_THREADS``, 0 meaning auto."""
    if workers is None:
        raw = os.environ.get("NONRECIP_THREADS", "0")
        try:
            workers = int(raw)
        except ValueError:
            raise InvalidInputError(f"NONRECIP_THREADS must be an integer, got {raw!r}")
    if workers < 0:
        raise InvalidInputError(f"thread count must be >= 0, got {workers}")
    if workers == 0:
        workers = min(8, os.cpu_count() or 1)
    return workers


def parallel_map(fn, items, workers=None):
    """Ordered map; results are in input order regardless of scheduling."""
    items = list(items)
    n = resolve_workers(workers)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _check_model(model):
    if model not in MODELS:
        raise InvalidInputError(f"model must be one of {MODELS}, got {model!r}")


def model_hamiltonian(p, model="full"):
    _check_model(model)
    if model == "full":
        return build_full_hamiltonian(p)
    return build_effective_hamiltonian(adiabatic_eliminate(p))


def transition_probabilities(p, t, model="full"):
    """Transition probabilities and isolation at time ``t``."""
    return DynamicsPoint.from_propagator(t, expm(model_hamiltonian(p, model), t))


def time_grid(t_max, steps):
    if not (math.isfinite(t_max) and t_max > 0.0):
        raise InvalidInputError(f"t_max must be positive, got {t_max}")
    if steps < 2:
        raise InvalidInputError(f"steps must be >= 2, got {steps}")
    return tuple(k * t_max / (steps - 1) for k in range(steps))


def flux_grid(count):
    if count < 3:
        raise InvalidInputError(f"flux grid needs >= 3 points, got {count}")
    return tuple(float(x) for x in np.linspace(-math.pi, math.pi, count))


def sweep_time(p, t_max, steps, model="full", workers=None):
    """Uniform closed time grid ``t_k = k t_max / (steps - 1)``."""
    _check_model(model)
    grid = time_grid(float(t_max), int(steps))
    h = model_hamiltonian(p, model)
    points = parallel_map(lambda t: DynamicsPoint.from_propagator(t, expm(h, t)), grid, workers)
    return SweepResult("t", grid, tuple(points), model)


def sweep_flux(p, t, phi_count, model="full", workers=None):
    """Flux grid over [-pi, pi] inclusive at fixed time ``t``."""
    _check_model(model)
    grid = flux_grid(int(phi_count))
    points = parallel_map(lambda phi: transition_probabilities(p.with_flux(phi), t, model), grid, workers)
    return SweepResult("phi", grid, tuple(points), model)
