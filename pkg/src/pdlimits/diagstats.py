"""Diagram measures on rectangles, bottleneck distance and normality statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .betti import BettiQuery, persistent_betti
from .exceptions import InputError, QueryError
from .persistence import PersistenceDiagram

__all__ = [
    "Rect",
    "RectClass",
    "DiagramMeasure",
    "box_rect",
    "grid_rect_class",
    "rectangle_mass",
    "rectangle_mass_from_betti",
    "normalize",
    "bottleneck_distance",
    "anderson_darling",
    "moment_summary",
]


@dataclass(frozen=True)
class Rect:
    """``(r1, r2] x (s1, s2]``, or ``[0, r2] x (s1, s2]`` when ``closed_left``.

    Requires ``0 <= r1 < r2 <= s1 < s2`` so the rectangle sits inside the
    open upper triangle birth < death.
    """

    r1: float
    r2: float
    s1: float
    s2: float
    closed_left: bool = False

    def __post_init__(self):
        r1 = 0.0 if self.closed_left else self.r1
        if self.closed_left:
            object.__setattr__(self, "r1", 0.0)
        if not (0 <= r1 < self.r2 <= self.s1 < self.s2):
            raise InputError(f"invalid rectangle: need 0 <= r1 < r2 <= s1 < s2, got {self}")

    def contains(self, birth, death):
        lo_ok = birth >= 0 if self.closed_left else birth > self.r1
        return lo_ok and birth <= self.r2 and self.s1 < death <= self.s2


@dataclass(frozen=True)
class RectClass:
    rects: tuple

    def __post_init__(self):
        object.__setattr__(self, "rects", tuple(self.rects))

    def __len__(self):
        return len(self.rects)

    def __iter__(self):
        return iter(self.rects)

    @property
    def max_death(self):
        return max((r.s2 for r in self.rects), default=0.0)

    def check_cutoff(self, t_max):
        for rect in self.rects:
            _check_rect_cutoff(rect, t_max)


def _check_rect_cutoff(rect, t_max):
    if rect.s2 >= t_max:
        raise QueryError(f"rectangle {rect} reaches the filtration cutoff t_max={t_max}")


def box_rect(birth, death, width):
    """Square ``(b - w/2, b + w/2] x (d - w/2, d + w/2]`` around a diagram point."""
    h = width / 2.0
    if birth - h <= 0:
        return Rect(0.0, birth + h, death - h, death + h, closed_left=True)
    return Rect(birth - h, birth + h, death - h, death + h)


def grid_rect_class(top, step, exclude=None):
    """Grid cells strictly above the diagonal covering birth, death <= ``top``.

    Cells in the first birth column are closed at 0.  Cells overlapping
    ``exclude`` are dropped and ``exclude`` itself is put first.
    """
    edges = [float(e) for e in np.arange(0.0, top, step)]
    if top - edges[-1] > 1e-9 * step:
        edges.append(float(top))
    else:
        edges[-1] = float(top)
    rects = [] if exclude is None else [exclude]
    for i in range(len(edges) - 1):
        for j in range(i + 1, len(edges) - 1):
            cell = Rect(edges[i], edges[i + 1], edges[j], edges[j + 1], closed_left=(i == 0))
            if exclude is not None and _overlaps(cell, exclude):
                continue
            rects.append(cell)
    return RectClass(tuple(rects))


def _overlaps(a, b):
    return a.r1 < b.r2 and b.r1 < a.r2 and a.s1 < b.s2 and b.s1 < a.s2


def rectangle_mass(diagram, q, rect):
    """Number of degree-q diagram points inside ``rect``."""
    _check_rect_cutoff(rect, diagram.t_max)
    return sum(1 for p in diagram.pairs if p.q == q and rect.contains(p.birth, p.death))


def rectangle_mass_from_betti(diagram, q, rect):
    """The same count as a signed sum of persistent Betti numbers."""

    def beta(r, s):
        return persistent_betti(diagram, BettiQuery(q, r, s))

    _check_rect_cutoff(rect, diagram.t_max)
    if rect.closed_left:
        return beta(rect.r2, rect.s1) - beta(rect.r2, rect.s2)
    return beta(rect.r2, rect.s1) - beta(rect.r2, rect.s2) + beta(rect.r1, rect.s2) - beta(rect.r1, rect.s1)


@dataclass(frozen=True)
class DiagramMeasure:
    q: int
    masses: np.ndarray
    window_side: float
    normalizer: float
    rects: RectClass


def normalize(diagram, q, rects, window_side, dim):
    """Rectangle counts divided by the window volume L^N."""
    if not window_side > 0:
        raise InputError("window_side must be positive")
    rects.check_cutoff(diagram.t_max)
    counts = np.array([rectangle_mass(diagram, q, r) for r in rects], dtype=np.float64)
    vol = float(window_side) ** dim
    return DiagramMeasure(q, counts / vol, float(window_side), vol, rects)


def _diagram_points(d, q):
    if isinstance(d, PersistenceDiagram):
        return d.points(q)
    pts = np.asarray(d, dtype=np.float64).reshape(-1, 2)
    if np.any(pts[:, 0] >= pts[:, 1]):
        raise InputError("diagram points need birth < death")
    return pts


def _finite_bottleneck(A, B):
    n, m = len(A), len(B)
    if n + m == 0:
        return 0.0
    diag_a = (A[:, 1] - A[:, 0]) / 2.0
    diag_b = (B[:, 1] - B[:, 0]) / 2.0
    if n and m:
        cost = np.maximum(
            np.abs(A[:, None, 0] - B[None, :, 0]), np.abs(A[:, None, 1] - B[None, :, 1])
        )
    else:
        cost = np.empty((n, m))
    candidates = np.unique(np.concatenate([cost.ravel(), diag_a, diag_b]))

    size = n + m
    # rows: A points then diagonal copies of B; columns: B points then diagonal copies of A
    def feasible(delta):
        rows, cols = [], []
        ai, bj = np.nonzero(cost <= delta)
        rows.append(ai)
        cols.append(bj)
        ok_a = np.flatnonzero(diag_a <= delta)
        rows.append(ok_a)
        cols.append(m + ok_a)
        ok_b = np.flatnonzero(diag_b <= delta)
        rows.append(n + ok_b)
        cols.append(ok_b)
        dr, dc = np.meshgrid(np.arange(m), np.arange(n), indexing="ij")
        rows.append(n + dr.ravel())
        cols.append(m + dc.ravel())
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        graph = csr_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(size, size))
        match = maximum_bipartite_matching(graph, perm_type="column")
        return bool(np.all(match >= 0))

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def bottleneck_distance(d1, d2, q=0):
    """Bottleneck distance between the degree-q parts of two diagrams.

    Points are compared in the sup norm; an unmatched point pays the
    distance ``(death - birth) / 2`` to its diagonal projection.  Essential
    points (infinite death) only match each other, by birth; if their
    counts differ the distance is ``inf``.  Arrays of (birth, death) rows
    are accepted in place of diagrams.
    """
    A, B = _diagram_points(d1, q), _diagram_points(d2, q)
    inf_a, inf_b = np.isinf(A[:, 1]), np.isinf(B[:, 1])
    if inf_a.sum() != inf_b.sum():
        return math.inf
    ess = 0.0
    if inf_a.any():
        ess = float(np.max(np.abs(np.sort(A[inf_a, 0]) - np.sort(B[inf_b, 0]))))
    return max(ess, _finite_bottleneck(A[~inf_a], B[~inf_b]))


def anderson_darling(samples):
    """Anderson-Darling A^2 against a normal with fitted mean and variance.

    Returns the small-sample corrected statistic ``A^2 (1 + 4/n - 25/n^2)``.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    n = len(x)
    if n < 8:
        raise InputError(f"anderson_darling needs at least 8 samples, got {n}")
    sd = x.std(ddof=1)
    if not sd > 0:
        raise InputError("anderson_darling: samples have zero variance")
    z = np.sort((x - x.mean()) / sd)
    i = np.arange(1, n + 1)
    s = np.sum((2 * i - 1) * (stats.norm.logcdf(z) + stats.norm.logsf(z[::-1])))
    a2 = -n - s / n
    return float(a2 * (1 + 4.0 / n - 25.0 / n**2))


def moment_summary(samples: Sequence[float]):
    """Mean, unbiased variance, skewness and excess kurtosis of a sample."""
    x = np.asarray(samples, dtype=np.float64)
    return {
        "mean": float(x.mean()),
        "variance": float(x.var(ddof=1)) if len(x) > 1 else 0.0,
        "skewness": float(stats.skew(x)) if x.std() > 0 else math.nan,
        "excess_kurtosis": float(stats.kurtosis(x)) if x.std() > 0 else math.nan,
    }
