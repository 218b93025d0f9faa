"""Timing sweeps over input size, worker count and cutoff distance.

Each run yields a :class:`RunReport`. Clustering outputs are deterministic;
only the wall times vary between runs.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass

import numpy as np

from ._config import hardware_threads
from .datagen import GenSpec, generate
from .geometry import DpcParams, UsageError
from .pipeline import STRATEGIES, DpcResult, run_dpc

STEPS = ("build", "density", "dependent", "linkage")
SWEEPS = ("size", "threads", "dcut")
DEFAULT_SIZES = (1_000, 10_000, 100_000, 1_000_000)
DEFAULT_FRACTIONS = (0.001, 0.01, 0.05)


@dataclass
class RunReport:
    step_times: dict
    n: int
    d: int
    d_cut: float
    rho_min: float
    delta_min: float
    algo: str
    threads: int
    clusters: int
    noise: int
    labels_sha256: str = ""

    JSON_KEYS = ("step_times", "n", "d", "d_cut", "rho_min", "delta_min",
                 "algo", "threads", "clusters", "noise")

    @classmethod
    def from_result(cls, result: DpcResult, d: int) -> "RunReport":
        p = result.params
        times = {k: round(max(0.0, result.timings.get(k, 0.0)), 3) for k in STEPS}
        digest = hashlib.sha256(np.ascontiguousarray(result.labels, "<i8").tobytes())
        return cls(times, result.n, d, p.d_cut, p.rho_min, p.delta_min,
                   result.strategy, result.threads, result.n_clusters,
                   result.n_noise, digest.hexdigest())

    @property
    def total(self) -> float:
        return sum(self.step_times.values())

    def to_json(self) -> dict:
        full = asdict(self)
        return {k: full[k] for k in self.JSON_KEYS}

    def csv_header(self) -> list[str]:
        keys = [k for k in asdict(self) if k != "step_times"]
        return [f"t_{s}" for s in STEPS] + keys

    def csv_row(self) -> list:
        full = asdict(self)
        full.pop("step_times")
        return [self.step_times[s] for s in STEPS] + list(full.values())


def simden_dcut(d: int, extent: float = 1e5) -> float:
    """Cutoff equal to the simden walk step."""
    return extent / (100 * math.sqrt(d))


def dcut_for_fraction(frac: float, d: int, extent: float = 1e5) -> float:
    """Cutoff whose ball holds about ``frac * n`` points of a uniform set.

    Ignores boundary loss, so the measured mean is somewhat lower.
    """
    if not 0 < frac <= 1:
        raise UsageError("neighbor fraction must be in (0, 1]")
    unit_ball = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
    return (frac * extent ** d / unit_ball) ** (1 / d)


@dataclass
class BenchSpec:
    sweep: str
    strategies: tuple = ("priority",)
    kind: str = "simden"
    n: int = 100_000
    d: int = 2
    seed: int = 1
    sizes: tuple = DEFAULT_SIZES
    threads: tuple = ()
    fractions: tuple = DEFAULT_FRACTIONS
    d_cut: float | None = None
    rho_min: float = 2.0
    delta_min: float | None = None
    workers: int = 0
    backend: str | None = None

    def __post_init__(self):
        if self.sweep not in SWEEPS:
            raise UsageError(f"unknown sweep {self.sweep!r}; choose from {', '.join(SWEEPS)}")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise UsageError(f"unknown strategy {s!r}")

    def thread_grid(self) -> list[int]:
        if self.threads:
            return list(self.threads)
        top = max(8, hardware_threads())
        grid, t = [], 1
        while t < top:
            grid.append(t)
            t *= 2
        return grid + [top]

    def params(self, d_cut: float) -> DpcParams:
        dmin = self.delta_min if self.delta_min is not None else 5 * d_cut
        return DpcParams(d_cut, self.rho_min, dmin)


def _points(spec: BenchSpec, n: int):
    return generate(GenSpec(spec.kind, n, spec.d, spec.seed))


def bench_sweep(spec: BenchSpec) -> list[RunReport]:
    """Run the sweep and return one report per (grid value, strategy)."""
    rows: list[RunReport] = []

    def run(ps, d_cut, threads):
        for algo in spec.strategies:
            res = run_dpc(ps, spec.params(d_cut), algo, threads=threads,
                          backend=spec.backend)
            rows.append(RunReport.from_result(res, ps.d))

    if spec.sweep == "size":
        for n in spec.sizes:
            ps = _points(spec, n)
            run(ps, spec.d_cut or simden_dcut(spec.d), spec.workers)
    elif spec.sweep == "threads":
        ps = _points(spec, spec.n)
        for t in spec.thread_grid():
            run(ps, spec.d_cut or simden_dcut(spec.d), t)
    else:
        ps = _points(spec, spec.n)
        for frac in spec.fractions:
            run(ps, dcut_for_fraction(frac, spec.d), spec.workers)
    return rows
