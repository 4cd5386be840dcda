"""Seeded samplers for stationary point processes in a cubic window.

All samplers observe the half-open window [-L/2, L/2)^N and are
deterministic functions of their :class:`ProcessSpec` (seed included).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import InputError
from .geometry import PointCloud

__all__ = [
    "ProcessKind",
    "ProcessSpec",
    "THOMAS_DILATION",
    "child_seed",
    "sample",
    "sample_poisson",
    "sample_shifted_lattice",
    "sample_thomas",
    "load_points",
]

# Parents are drawn this many offspring standard deviations beyond the window.
THOMAS_DILATION = 6.0


class ProcessKind(enum.Enum):
    POISSON = "poisson"
    SHIFTED_LATTICE = "lattice"
    THOMAS = "thomas"


@dataclass(frozen=True)
class ProcessSpec:
    kind: ProcessKind
    dim: int
    window_side: float
    seed: int
    intensity: float = 1.0
    parent_intensity: float = 0.1
    mean_offspring: float = 10.0
    offspring_std: float = 0.5

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", ProcessKind(self.kind.lower()))
        if self.dim < 1:
            raise InputError(f"dim must be >= 1, got {self.dim}")
        if not self.window_side > 0:
            raise InputError(f"window_side must be positive, got {self.window_side}")
        for name in ("intensity", "parent_intensity", "mean_offspring", "offspring_std"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")

    def with_seed(self, seed):
        return replace(self, seed=int(seed))

    def with_window(self, window_side):
        return replace(self, window_side=float(window_side))


def child_seed(master_seed, replication):
    """64-bit seed for replication k, a fixed hash of (master seed, k)."""
    ss = np.random.SeedSequence([int(master_seed), int(replication)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _uniform_in_window(rng, n, dim, side):
    half = side / 2.0
    pts = rng.uniform(-half, half, size=(n, dim))
    # rounding can land exactly on the open upper edge
    return np.minimum(pts, np.nextafter(half, -np.inf))


def _dedupe(rng, pts, redraw):
    """Redraw exact duplicates until the configuration is simple."""
    while len(pts) > 1:
        _, first = np.unique(pts, axis=0, return_index=True)
        if len(first) == len(pts):
            break
        dup = np.setdiff1d(np.arange(len(pts)), first)
        pts[dup] = redraw(len(dup))
    return pts


def sample_poisson(spec):
    if spec.kind is not ProcessKind.POISSON:
        raise InputError("sample_poisson needs a POISSON spec")
    rng = np.random.default_rng(spec.seed)
    side, dim = spec.window_side, spec.dim
    n = rng.poisson(spec.intensity * side**dim)
    pts = _uniform_in_window(rng, n, dim, side)
    pts = _dedupe(rng, pts, lambda k: _uniform_in_window(rng, k, dim, side))
    return PointCloud(pts, window_side=side, seed=spec.seed)


def sample_shifted_lattice(spec):
    """(Z^N + U) restricted to the window, one uniform shift U in [0, 1)^N."""
    if spec.kind is not ProcessKind.SHIFTED_LATTICE:
        raise InputError("sample_shifted_lattice needs a SHIFTED_LATTICE spec")
    rng = np.random.default_rng(spec.seed)
    half = spec.window_side / 2.0
    shift = rng.random(spec.dim)
    axes = []
    for u in shift:
        k = np.arange(np.ceil(-half - u), np.ceil(half - u))
        axis = k + u
        axes.append(axis[(axis >= -half) & (axis < half)])
    grid = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([g.ravel() for g in grid]) if axes else np.empty((0, spec.dim))
    return PointCloud(pts, window_side=spec.window_side, seed=spec.seed)


def sample_thomas(spec):
    """Thomas cluster process: Gaussian offspring around Poisson parents.

    Parents live on the window dilated by ``THOMAS_DILATION`` offspring
    standard deviations so clusters centred just outside still contribute.
    """
    if spec.kind is not ProcessKind.THOMAS:
        raise InputError("sample_thomas needs a THOMAS spec")
    rng = np.random.default_rng(spec.seed)
    side, dim, sd = spec.window_side, spec.dim, spec.offspring_std
    big = side + 2 * THOMAS_DILATION * sd
    n_parents = rng.poisson(spec.parent_intensity * big**dim)
    parents = rng.uniform(-big / 2, big / 2, size=(n_parents, dim))
    counts = rng.poisson(spec.mean_offspring, size=n_parents)
    centres = np.repeat(parents, counts, axis=0)
    pts = centres + rng.normal(0.0, sd, size=centres.shape)
    half = side / 2.0
    pts = pts[np.all((pts >= -half) & (pts < half), axis=1)]

    def redraw(k):
        idx = rng.integers(0, len(centres), size=k)
        return np.clip(centres[idx] + rng.normal(0.0, sd, size=(k, dim)), -half, np.nextafter(half, -np.inf))

    pts = _dedupe(rng, pts, redraw)
    return PointCloud(pts, window_side=side, seed=spec.seed)


_SAMPLERS = {
    ProcessKind.POISSON: sample_poisson,
    ProcessKind.SHIFTED_LATTICE: sample_shifted_lattice,
    ProcessKind.THOMAS: sample_thomas,
}


def sample(spec):
    return _SAMPLERS[spec.kind](spec)


def load_points(path):
    from .io import read_points_csv

    return read_points_csv(path)
