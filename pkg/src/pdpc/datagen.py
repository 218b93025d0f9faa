"""Seeded synthetic point sets.

Three families:

``uniform``
    i.i.d. uniform in ``[0, extent]^d``.
``simden``
    ``clusters`` reflected random walks, all with the same step length
    ``extent / (100 * sqrt(d))``.
``varden``
    reflected random walks whose step lengths are log-uniform over
    ``[extent/3000, extent/30]``. The range is cut into one log-stratum per
    cluster and each cluster draws inside its own stratum, so the densest
    and sparsest clusters always differ by well over 10x in spacing.

Walks start at a uniform point of the domain, take Gaussian-direction
steps of fixed length, and are folded back into the box at the walls.
Cluster ``c`` owns a contiguous block of rows; sizes differ by at most one
with the larger blocks first. Every cluster draws from its own child of
one ``SeedSequence``, so output depends only on the ``GenSpec``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import PointSet, UsageError

KINDS = ("uniform", "simden", "varden")
VARDEN_STEP_RANGE = (1 / 3000, 1 / 30)


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n: int
    d: int = 2
    seed: int = 0
    clusters: int = 10
    extent: float = 1e5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.n < 1 or self.d < 1 or self.clusters < 1:
            raise UsageError("need n >= 1, d >= 1 and clusters >= 1")
        if not (math.isfinite(self.extent) and self.extent > 0):
            raise UsageError("extent must be a positive finite number")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must fit in 64 unsigned bits")


def cluster_sizes(n: int, clusters: int) -> np.ndarray:
    """Points per cluster: equal split, remainder to the first clusters."""
    k = min(clusters, n)
    sizes = np.full(k, n // k, dtype=np.int64)
    sizes[: n % k] += 1
    return sizes


def cluster_slices(spec: GenSpec) -> list[slice]:
    """Row range of each cluster in ``generate(spec)`` output."""
    if spec.kind == "uniform":
        return [slice(0, spec.n)]
    bounds = np.concatenate(([0], np.cumsum(cluster_sizes(spec.n, spec.clusters))))
    return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]


def reflect(x: np.ndarray, extent: float) -> np.ndarray:
    """Fold unconstrained coordinates into ``[0, extent]``.

    Folding the free walk is the same as reflecting it at each wall.
    """
    y = np.mod(x, 2 * extent)
    return np.where(y > extent, 2 * extent - y, y)


def random_walk(rng: np.random.Generator, m: int, d: int, step: float,
                extent: float) -> np.ndarray:
    start = rng.random(d) * extent
    dirs = rng.standard_normal((m - 1, d))
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    moves = dirs / norms * step
    path = np.vstack([start, start + np.cumsum(moves, axis=0)])
    return reflect(path, extent)


def step_lengths(spec: GenSpec, rng: np.random.Generator) -> np.ndarray:
    k = len(cluster_sizes(spec.n, spec.clusters))
    if spec.kind == "simden":
        return np.full(k, spec.extent / (100 * math.sqrt(spec.d)))
    lo, hi = (math.log(spec.extent * f) for f in VARDEN_STEP_RANGE)
    strata = rng.permutation(k)
    u = (strata + rng.random(k)) / k
    return np.exp(lo + u * (hi - lo))


def generate(spec: GenSpec) -> PointSet:
    root = np.random.SeedSequence(spec.seed)
    if spec.kind == "uniform":
        rng = np.random.Generator(np.random.PCG64(root))
        return PointSet(rng.random((spec.n, spec.d)) * spec.extent)
    sizes = cluster_sizes(spec.n, spec.clusters)
    meta_seq, *walk_seqs = root.spawn(len(sizes) + 1)
    steps = step_lengths(spec, np.random.Generator(np.random.PCG64(meta_seq)))
    blocks = [
        random_walk(np.random.Generator(np.random.PCG64(s)), int(m), spec.d,
                    float(step), spec.extent)
        for s, m, step in zip(walk_seqs, sizes, steps)
    ]
    return PointSet(np.vstack(blocks))
