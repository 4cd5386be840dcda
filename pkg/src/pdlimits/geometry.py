"""Euclidean primitives and the filtration functions kappa.

A kappa function assigns a birth time to every finite point set.  Two are
built in: the Cech function (radius of the smallest enclosing ball) and
the Rips function (half the diameter).  Users can plug in their own through
:func:`custom_kappa`, declaring the growth bound ``rho`` with
``||x - y|| <= rho(kappa({x, y}))`` that the complex builder relies on for
neighbour pruning.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import InputError

__all__ = [
    "PointCloud",
    "KappaTag",
    "KappaKind",
    "CECH",
    "RIPS",
    "custom_kappa",
    "as_kappa",
    "euclid_dist",
    "miniball_radius",
    "miniball_radii",
    "kappa_value",
    "kappa_values",
    "hausdorff_dist",
]

# A candidate support ball is accepted when every point lies within
# r * (1 + _CONTAIN_RTOL); absorbs rounding for points exactly on the sphere.
_CONTAIN_RTOL = 1e-10
# Gram determinant / product of its diagonal below this => affinely dependent.
_DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class PointCloud:
    """A finite simple point configuration in R^dim.

    Parameters
    ----------
    points : array of shape (n_points, dim)
    window_side : float, optional
        Side L of the observation window [-L/2, L/2)^dim the points were
        sampled in.  When given, every coordinate must lie in that window.
    seed : int, optional
        Seed the cloud was generated from, kept for reproducibility.
    """

    points: np.ndarray
    window_side: Optional[float] = None
    seed: Optional[int] = None
    dim: int = field(init=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim == 1 and pts.size == 0:
            raise InputError("cannot infer the dimension of an empty 1-d point array")
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise InputError(f"points must have shape (n, dim), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InputError("point coordinates must be finite")
        if len(pts) > 1 and len(np.unique(pts, axis=0)) != len(pts):
            raise InputError("point cloud contains duplicate points")
        if self.window_side is not None:
            half = self.window_side / 2.0
            if self.window_side <= 0:
                raise InputError("window_side must be positive")
            if np.any(pts < -half) or np.any(pts >= half):
                raise InputError(f"points fall outside the window [-{half}, {half})")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "dim", pts.shape[1])

    def __len__(self):
        return len(self.points)

    @classmethod
    def empty(cls, dim, window_side=None, seed=None):
        return cls(np.empty((0, dim)), window_side=window_side, seed=seed)

    def restrict(self, window_side):
        """Points falling in the centred sub-window [-L/2, L/2)^dim."""
        half = window_side / 2.0
        mask = np.all((self.points >= -half) & (self.points < half), axis=1)
        return PointCloud(self.points[mask], window_side=window_side, seed=self.seed)

    def translate(self, offset):
        return PointCloud(self.points + np.asarray(offset, dtype=np.float64), seed=self.seed)


class KappaTag(enum.Enum):
    CECH = "cech"
    RIPS = "rips"
    CUSTOM = "custom"


def _linear_growth(t):
    return 2.0 * t


@dataclass(frozen=True)
class KappaKind:
    """A filtration function together with its growth bound.

    ``value_fn`` (CUSTOM only) receives an array of shape (k, dim) and must
    be monotone under inclusion, translation invariant, return 0 on
    singletons, and satisfy ``||x - y|| <= rho(value_fn({x, y}))``.
    ``lipschitz`` is the Hausdorff-Lipschitz constant, when known.
    """

    tag: KappaTag
    rho: Callable[[float], float] = _linear_growth
    value_fn: Optional[Callable[[np.ndarray], float]] = None
    lipschitz: Optional[float] = None

    @property
    def name(self):
        return self.tag.value


CECH = KappaKind(KappaTag.CECH, lipschitz=1.0)
RIPS = KappaKind(KappaTag.RIPS, lipschitz=1.0)


def custom_kappa(value_fn, rho, lipschitz=None):
    """Wrap a user kappa function.  ``rho`` is mandatory and never inferred."""
    if not callable(value_fn) or not callable(rho):
        raise InputError("custom kappa needs callable value_fn and rho")
    return KappaKind(KappaTag.CUSTOM, rho=rho, value_fn=value_fn, lipschitz=lipschitz)


def as_kappa(kind):
    """Accept a :class:`KappaKind` or one of the names ``"cech"``/``"rips"``."""
    if isinstance(kind, KappaKind):
        return kind
    if isinstance(kind, str):
        key = kind.strip().lower()
        if key == "cech":
            return CECH
        if key == "rips":
            return RIPS
    raise InputError(f"unknown kappa {kind!r}; expected 'cech', 'rips' or a KappaKind")


def _as_points(points):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2:
        raise InputError(f"expected a (k, dim) array of points, got shape {pts.shape}")
    if len(pts) == 0:
        raise InputError("empty point set")
    if not np.all(np.isfinite(pts)):
        raise InputError("point coordinates must be finite")
    return pts


def euclid_dist(p, q):
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise InputError(f"dimension mismatch: {p.shape} vs {q.shape}")
    diff = p - q
    return float(np.sqrt(np.sum(diff * diff)))


def _circumballs(P):
    """Smallest balls through all points of each set, centred in their affine hull.

    P has shape (batch, m, dim).  Returns centres relative to P[:, 0],
    radii, and a mask that is False where the m points are affinely
    dependent (no such ball).
    """
    V = P[:, 1:, :] - P[:, :1, :]
    G = np.einsum("bid,bjd->bij", V, V)
    diag = np.einsum("bii->bi", G)
    det = np.linalg.det(G)
    scale = diag.prod(axis=1)
    ok = (scale > 0) & (det > _DEGENERATE_RTOL * scale)
    G_safe = np.where(ok[:, None, None], G, np.eye(G.shape[1]))
    lam = np.linalg.solve(G_safe, 0.5 * diag[..., None])[..., 0]
    centre = np.einsum("bi,bid->bd", lam, V)
    radius = np.sqrt((centre * centre).sum(axis=1))
    return centre, radius, ok


def miniball_radii(P):
    """Exact smallest-enclosing-ball radius for a batch of equal-size point sets.

    ``P`` has shape (batch, k, dim).  The minimal ball is the circumball of
    some affinely independent support subset of size <= dim + 1, so we
    enumerate every such subset, keep the balls that enclose all k points,
    and take the smallest.  Intended for the tiny sets (k <= dim + 2) that
    occur as simplices.
    """
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 3:
        raise InputError("expected an array of shape (batch, k, dim)")
    batch, k, dim = P.shape
    if k == 0:
        raise InputError("empty point set")
    if k == 1 or batch == 0:
        return np.zeros(batch)
    # work relative to the first vertex: translation invariant and better conditioned
    P = P - P[:, :1, :]
    best = np.full(batch, np.inf)
    for size in range(2, min(k, dim + 1) + 1):
        for support in combinations(range(k), size):
            S = P[:, support, :]
            if size == 2:
                v = S[:, 1, :] - S[:, 0, :]
                rel = 0.5 * v
                radius = 0.5 * np.sqrt((v * v).sum(axis=1))
                ok = np.ones(batch, dtype=bool)
            else:
                rel, radius, ok = _circumballs(S)
            centre = S[:, 0, :] + rel
            diff = P - centre[:, None, :]
            reach = np.sqrt((diff * diff).sum(axis=2).max(axis=1))
            ok &= reach <= radius * (1.0 + _CONTAIN_RTOL)
            best = np.where(ok & (radius < best), radius, best)
    # any enclosing ball is at least half the diameter; the floor stops a point
    # admitted by the containment tolerance from pulling the value below Rips
    return np.maximum(best, _half_diameters(P))


def miniball_radius(points):
    """Radius of the smallest ball enclosing ``points`` (array of shape (k, dim))."""
    pts = _as_points(points)
    if len(pts) > pts.shape[1] + 2:
        # support enumeration is exponential; it's exact but only meant for simplices
        raise InputError(
            f"miniball_radius handles at most dim + 2 = {pts.shape[1] + 2} points, got {len(pts)}"
        )
    return float(miniball_radii(pts[None])[0])


def _half_diameters(P):
    batch, k, _ = P.shape
    out = np.zeros(batch)
    for i, j in combinations(range(k), 2):
        v = P[:, i, :] - P[:, j, :]
        out = np.maximum(out, 0.5 * np.sqrt((v * v).sum(axis=1)))
    return out


def kappa_values(kind, P):
    """Vectorised kappa over a batch of simplices, ``P`` of shape (batch, k, dim)."""
    kind = as_kappa(kind)
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 3 or P.shape[1] == 0:
        raise InputError("expected a non-empty array of shape (batch, k, dim)")
    if P.shape[1] == 1:
        return np.zeros(P.shape[0])
    if kind.tag is KappaTag.CECH:
        return miniball_radii(P)
    if kind.tag is KappaTag.RIPS:
        return _half_diameters(P)
    return np.array([float(kind.value_fn(simplex)) for simplex in P], dtype=np.float64)


def kappa_value(kind, simplex_points):
    """kappa of one simplex given as a (k, dim) array of its vertex coordinates."""
    pts = _as_points(simplex_points)
    return float(kappa_values(kind, pts[None])[0])


def hausdorff_dist(a, b):
    """Hausdorff distance between two finite point sets (clouds or arrays)."""
    A = a.points if isinstance(a, PointCloud) else np.asarray(a, dtype=np.float64)
    B = b.points if isinstance(b, PointCloud) else np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or B.ndim != 2 or len(A) == 0 or len(B) == 0:
        raise InputError("hausdorff_dist needs two non-empty point sets")
    if A.shape[1] != B.shape[1]:
        raise InputError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    D = cdist(A, B)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))
