"""scikit-learn style transformers wrapping the diagram pipeline.

The three steps compose in a :class:`sklearn.pipeline.Pipeline`::

    Pipeline([
        ("diagrams", KappaPersistence(kappa="cech", t_max=0.8, q_max=1)),
        ("masses", RectangleMasses(rects=[(0, 0.5, 0.6, 0.7, True)], q=1, window_side=20)),
    ])

turns a list of point clouds into a feature matrix of normalized
rectangle masses.
"""
from __future__ import annotations

import math
import numbers

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_diagrams, check_point_clouds, check_rect_class, check_scalar
from .betti import BettiQuery, persistent_betti
from .diagstats import rectangle_mass
from .filtration import DEFAULT_MAX_SIMPLICES
from .geometry import as_kappa
from .persistence import diagram_from_cloud

__all__ = ["KappaPersistence", "PersistentBettiNumbers", "RectangleMasses"]


class KappaPersistence(TransformerMixin, BaseEstimator):
    """Persistence diagrams of kappa-filtrations, one per input point cloud.

    Parameters
    ----------
    kappa : {"cech", "rips"} or KappaKind, default="cech"
    t_max : float, default=1.0
        Filtration cutoff; deaths beyond it are reported as censored inf.
    q_max : int, default=1
        Highest homology degree computed.
    max_simplices : int
        Size budget per complex.
    n_jobs : int, optional
        Workers for joblib; output order never depends on it.
    """

    def __init__(self, kappa="cech", t_max=1.0, q_max=1, max_simplices=DEFAULT_MAX_SIMPLICES, n_jobs=None):
        self.kappa = kappa
        self.t_max = t_max
        self.q_max = q_max
        self.max_simplices = max_simplices
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        as_kappa(self.kappa)
        check_scalar("t_max", self.t_max, min_val=0, include_min=False)
        check_scalar("q_max", self.q_max, numbers.Integral, min_val=0)
        clouds = check_point_clouds(X)
        self.n_features_in_ = clouds[0].dim if clouds else 0
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        clouds = check_point_clouds(X)
        return Parallel(n_jobs=self.n_jobs)(
            delayed(diagram_from_cloud)(c, self.kappa, self.t_max, self.q_max, max_simplices=self.max_simplices)
            for c in clouds
        )


class PersistentBettiNumbers(TransformerMixin, BaseEstimator):
    """Persistent Betti numbers beta_q^{r,s} for a list of (r, s) windows.

    ``transform`` maps a list of diagrams to an integer array of shape
    (n_diagrams, n_windows).
    """

    def __init__(self, q=1, windows=((0.5, 0.6),)):
        self.q = q
        self.windows = windows

    def fit(self, X=None, y=None):
        check_scalar("q", self.q, numbers.Integral, min_val=0)
        self.queries_ = [BettiQuery(self.q, float(r), float(s)) for r, s in self.windows]
        return self

    def transform(self, X):
        check_is_fitted(self, "queries_")
        diagrams = check_diagrams(X)
        out = np.zeros((len(diagrams), len(self.queries_)), dtype=np.int64)
        for i, d in enumerate(diagrams):
            for j, query in enumerate(self.queries_):
                out[i, j] = persistent_betti(d, query)
        return out


class RectangleMasses(TransformerMixin, BaseEstimator):
    """Diagram counts over a fixed rectangle class, optionally divided by L^N.

    Parameters
    ----------
    rects : RectClass or sequence of (r1, r2, s1, s2[, closed_left])
    q : int, default=1
    window_side : float, optional
        When set, counts are divided by ``window_side ** dim``.
    dim : int, default=2
        Ambient dimension N used for the normalisation.
    """

    def __init__(self, rects=(), q=1, window_side=None, dim=2):
        self.rects = rects
        self.q = q
        self.window_side = window_side
        self.dim = dim

    def fit(self, X=None, y=None):
        self.rect_class_ = check_rect_class(self.rects)
        if self.window_side is not None:
            check_scalar("window_side", self.window_side, min_val=0, include_min=False)
        return self

    def transform(self, X):
        check_is_fitted(self, "rect_class_")
        diagrams = check_diagrams(X)
        out = np.array(
            [[rectangle_mass(d, self.q, r) for r in self.rect_class_] for d in diagrams],
            dtype=np.float64,
        ).reshape(len(diagrams), len(self.rect_class_))
        if self.window_side is not None:
            out /= math.pow(self.window_side, self.dim)
        return out
