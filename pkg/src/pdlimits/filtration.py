"""Construction of kappa-filtered simplicial complexes over a point cloud."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import NamedTuple, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import BudgetExceededError, InputError
from .geometry import KappaKind, KappaTag, PointCloud, as_kappa, kappa_values

__all__ = [
    "Simplex",
    "FilteredComplex",
    "DEFAULT_MAX_SIMPLICES",
    "neighborhood_graph",
    "build_complex",
    "validate_complex",
]

DEFAULT_MAX_SIMPLICES = 50_000_000
# below this many points a quadratic pair scan beats building the grid
_BRUTE_FORCE_PAIRS = 64


class Simplex(NamedTuple):
    vertices: tuple
    value: float

    @property
    def dim(self):
        return len(self.vertices) - 1


def _order_key(s):
    return (s.value, len(s.vertices), s.vertices)


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    """Simplices sorted by (value, dimension, lexicographic vertices).

    ``cloud`` and ``kind`` are ``None`` for abstract, hand-entered
    filtrations.  ``t_max`` is the construction cutoff (``inf`` when the
    whole filtration was built).
    """

    simplices: tuple
    t_max: float = math.inf
    max_dim: int = 1
    cloud: Optional[PointCloud] = None
    kind: Optional[KappaKind] = None
    _index: dict = field(default=None, init=False, repr=False)

    @classmethod
    def from_simplices(cls, steps, t_max=math.inf, max_dim=None):
        """Build from ``(vertices, value)`` pairs in any order, without validation."""
        simplices = [Simplex(tuple(sorted(int(v) for v in verts)), float(val)) for verts, val in steps]
        simplices.sort(key=_order_key)
        if max_dim is None:
            max_dim = max((s.dim for s in simplices), default=0)
        return cls(tuple(simplices), t_max=t_max, max_dim=max_dim)

    def __len__(self):
        return len(self.simplices)

    @property
    def index(self):
        """Map from vertex tuple to position in the filtration order."""
        if self._index is None:
            object.__setattr__(self, "_index", {s.vertices: i for i, s in enumerate(self.simplices)})
        return self._index

    @property
    def values(self):
        return np.array([s.value for s in self.simplices], dtype=np.float64)

    @property
    def dims(self):
        return np.array([s.dim for s in self.simplices], dtype=np.int64)

    def count(self, dim=None, upto=math.inf):
        """Number of simplices (of a given dimension) with value <= ``upto``."""
        return sum(1 for s in self.simplices if s.value <= upto and (dim is None or s.dim == dim))


def _grid_pairs(points, cutoff):
    """Candidate index pairs (i < j) with ||x_i - x_j|| <= cutoff via a uniform grid."""
    n, dim = points.shape
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    if not math.isfinite(cutoff) or n <= _BRUTE_FORCE_PAIRS:
        i, j = np.triu_indices(n, k=1)
        if math.isfinite(cutoff):
            diff = points[i] - points[j]
            keep = np.sqrt((diff * diff).sum(axis=1)) <= cutoff
            i, j = i[keep], j[keep]
        return np.column_stack([i, j])
    cell = np.floor(points / cutoff).astype(np.int64)
    buckets = {}
    for idx, key in enumerate(map(tuple, cell)):
        buckets.setdefault(key, []).append(idx)
    buckets = {k: np.array(v, dtype=np.int64) for k, v in buckets.items()}
    offsets = list(product((-1, 0, 1), repeat=dim))
    found = []
    for key, members in buckets.items():
        for off in offsets:
            other_key = tuple(k + o for k, o in zip(key, off))
            if other_key < key:
                continue
            others = buckets.get(other_key)
            if others is None:
                continue
            D = cdist(points[members], points[others])
            a, b = np.nonzero(D <= cutoff)
            i, j = members[a], others[b]
            keep = i < j if other_key == key else np.ones(len(i), dtype=bool)
            i, j = i[keep], j[keep]
            found.append(np.column_stack([np.minimum(i, j), np.maximum(i, j)]))
    if not found:
        return np.empty((0, 2), dtype=np.int64)
    pairs = np.concatenate(found)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


def neighborhood_graph(cloud, kind, t_max):
    """Edges {x, y} with kappa({x, y}) <= t_max.

    Returns ``(edges, values)``: an (E, 2) array of index pairs i < j in
    lexicographic order and their kappa values.  Candidates are pruned by
    the growth bound ``||x - y|| <= rho(t_max)`` before kappa is evaluated.
    """
    kind = as_kappa(kind)
    if not t_max > 0:
        raise InputError(f"t_max must be positive, got {t_max}")
    pts = cloud.points
    reach = kind.rho(t_max)
    # slack only widens the candidate set; the kappa test below is exact
    pairs = _grid_pairs(pts, reach * (1 + 1e-12) if math.isfinite(reach) else reach)
    if len(pairs) == 0:
        return pairs, np.empty(0)
    vals = kappa_values(kind, pts[pairs])
    keep = vals <= t_max
    return pairs[keep], vals[keep]


def build_complex(cloud, kind, t_max, max_dim, max_simplices=DEFAULT_MAX_SIMPLICES):
    """All simplices of dimension <= max_dim with kappa <= t_max.

    Higher simplices come from clique expansion of the neighbourhood
    graph: by monotonicity every edge of a kept simplex is a graph edge.
    Rips values are the largest edge value; Cech and custom values are
    evaluated directly and clamped from below by the facet values, so the
    face ordering holds exactly in floating point.

    Raises :class:`BudgetExceededError` when more than ``max_simplices``
    simplices would be produced.
    """
    kind = as_kappa(kind)
    if max_dim < 1:
        raise InputError(f"max_dim must be >= 1, got {max_dim}")
    n = len(cloud)
    pts = cloud.points

    def charge(count):
        if count > max_simplices:
            raise BudgetExceededError(
                f"complex exceeds the budget of {max_simplices} simplices"
            )

    charge(n)
    simplices = [Simplex((i,), 0.0) for i in range(n)]
    edges, edge_vals = neighborhood_graph(cloud, kind, t_max)
    total = n + len(edges)
    charge(total)

    higher = [[] for _ in range(n)]
    edge_value = {}
    level = {}
    for (i, j), v in zip(edges.tolist(), edge_vals.tolist()):
        higher[i].append(j)
        edge_value[(i, j)] = v
        level[(i, j)] = v
    higher_sets = [set(h) for h in higher]
    simplices.extend(Simplex(k, v) for k, v in level.items())

    for k in range(2, max_dim + 1):
        candidates = []
        for verts in level:
            last = verts[-1]
            common = higher_sets[verts[0]]
            for v in verts[1:]:
                common = common & higher_sets[v]
                if not common:
                    break
            for w in sorted(c for c in common if c > last):
                candidates.append(verts + (w,))
        if not candidates:
            break
        charge(total + len(candidates))
        if kind.tag is KappaTag.RIPS:
            new_level = {}
            for c in candidates:
                w = c[-1]
                val = level[c[:-1]]
                for v in c[:-1]:
                    e = edge_value[(v, w)]
                    if e > val:
                        val = e
                new_level[c] = val
        else:
            arr = np.array(candidates, dtype=np.int64)
            raw = kappa_values(kind, pts[arr]).tolist()
            new_level = {}
            for c, val in zip(candidates, raw):
                for drop in range(k + 1):
                    face_val = level.get(c[:drop] + c[drop + 1:])
                    if face_val is None:
                        val = math.inf
                        break
                    if face_val > val:
                        val = face_val
                if val <= t_max:
                    new_level[c] = val
        level = new_level
        total += len(level)
        simplices.extend(Simplex(c, v) for c, v in level.items())

    simplices.sort(key=_order_key)
    return FilteredComplex(tuple(simplices), t_max=float(t_max), max_dim=max_dim, cloud=cloud, kind=kind)


def validate_complex(fc):
    """List of human-readable invariant violations; empty when ``fc`` is valid."""
    problems = []
    index = {}
    prev = None
    for pos, s in enumerate(fc.simplices):
        verts = s.vertices
        if any(a >= b for a, b in zip(verts, verts[1:])):
            problems.append(f"{verts}: vertex indices not strictly increasing")
        if verts in index:
            problems.append(f"{verts}: listed twice")
        if s.value > fc.t_max:
            problems.append(f"{verts}: value {s.value} exceeds t_max {fc.t_max}")
        if s.dim > fc.max_dim:
            problems.append(f"{verts}: dimension {s.dim} exceeds max_dim {fc.max_dim}")
        if fc.cloud is not None and s.dim == 0 and s.value != 0.0:
            problems.append(f"{verts}: vertex value {s.value} is not 0")
        if prev is not None and _order_key(s) < _order_key(prev):
            problems.append(f"{verts}: out of filtration order")
        index[verts] = pos
        prev = s
    for s in fc.simplices:
        if s.dim == 0:
            continue
        for face in combinations(s.vertices, len(s.vertices) - 1):
            pos = index.get(face)
            if pos is None:
                problems.append(f"{s.vertices}: closure violated, face {face} missing")
            elif fc.simplices[pos].value > s.value:
                problems.append(
                    f"{s.vertices}: monotonicity violated, face {face} has value "
                    f"{fc.simplices[pos].value} > {s.value}"
                )
    if fc.cloud is not None:
        present = {s.vertices[0] for s in fc.simplices if s.dim == 0}
        missing = set(range(len(fc.cloud))) - present
        if missing:
            problems.append(f"vertices missing from the complex: {sorted(missing)[:10]}")
    return problems
