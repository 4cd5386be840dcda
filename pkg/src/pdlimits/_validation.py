"""Input validation helpers for the estimator API."""
from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .diagstats import Rect, RectClass
from .exceptions import InputError
from .geometry import PointCloud
from .persistence import PersistenceDiagram


def check_point_clouds(X):
    """Coerce a collection of point sets to a list of :class:`PointCloud`.

    Accepts a list of ``PointCloud`` objects or 2-d arrays, or a single 3-d
    array of shape (n_samples, n_points, dim).  All clouds must share one
    ambient dimension.
    """
    if isinstance(X, PointCloud):
        raise InputError("expected a collection of point clouds, got a single PointCloud")
    if isinstance(X, np.ndarray) and X.ndim == 3:
        X = list(X)
    clouds = []
    for item in X:
        if isinstance(item, PointCloud):
            clouds.append(item)
            continue
        arr = check_array(item, dtype=np.float64, ensure_min_samples=0, ensure_2d=True)
        clouds.append(PointCloud(arr))
    dims = {c.dim for c in clouds}
    if len(dims) > 1:
        raise InputError(f"point clouds have mixed dimensions {sorted(dims)}")
    return clouds


def check_diagrams(X):
    diagrams = list(X)
    for d in diagrams:
        if not isinstance(d, PersistenceDiagram):
            raise InputError(f"expected PersistenceDiagram objects, got {type(d).__name__}")
    return diagrams


def check_rect_class(rects):
    if isinstance(rects, RectClass):
        return rects
    out = []
    for r in rects:
        if isinstance(r, Rect):
            out.append(r)
        elif len(r) == 4:
            out.append(Rect(*map(float, r)))
        elif len(r) == 5:
            out.append(Rect(*map(float, r[:4]), closed_left=bool(r[4])))
        else:
            raise InputError(f"cannot interpret {r!r} as a rectangle")
    return RectClass(tuple(out))


def check_scalar(name, value, target_type=numbers.Real, min_val=None, include_min=True, max_val=None):
    if not isinstance(value, target_type) or isinstance(value, bool):
        raise InputError(f"{name} must be {target_type.__name__}, got {value!r}")
    if min_val is not None and (value < min_val or (value == min_val and not include_min)):
        raise InputError(f"{name}={value} is below its minimum {min_val}")
    if max_val is not None and value > max_val:
        raise InputError(f"{name}={value} is above its maximum {max_val}")
    return value
