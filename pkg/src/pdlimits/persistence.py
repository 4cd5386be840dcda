"""Persistence diagrams by boundary-matrix reduction over GF(2)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .exceptions import InputError
from .filtration import FilteredComplex, build_complex, validate_complex

__all__ = [
    "BoundaryMatrix",
    "Reduction",
    "PersistencePair",
    "PersistenceDiagram",
    "boundary_matrix",
    "reduce",
    "extract_diagram",
    "compute_diagram",
    "diagram_from_cloud",
    "diagram_from_explicit_filtration",
]


@dataclass(frozen=True)
class BoundaryMatrix:
    """Sparse mod-2 boundary matrix in filtration order.

    ``columns[j]`` is the sorted tuple of positions of the facets of
    simplex j; vertex columns are empty.
    """

    columns: tuple
    dims: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.columns)


@dataclass(frozen=True)
class Reduction:
    columns: tuple
    pairs: tuple
    essential: tuple

    def lows(self):
        return [col[-1] for col in self.columns if col]


@dataclass(frozen=True)
class PersistencePair:
    q: int
    birth: float
    death: float
    birth_index: int
    death_index: Optional[int] = None
    censored: bool = False

    @property
    def persistence(self):
        return self.death - self.birth


@dataclass(frozen=True)
class PersistenceDiagram:
    """Birth-death pairs of every degree up to ``q_max``.

    Pairs with zero persistence are never stored.  Essential classes have
    ``death == inf``; ``censored`` marks those that may only look essential
    because construction stopped at ``t_max``.
    """

    pairs: tuple
    q_max: int
    t_max: float = math.inf

    def in_degree(self, q):
        return [p for p in self.pairs if p.q == q]

    def points(self, q):
        """(k, 2) array of (birth, death) in degree q, inf deaths included."""
        rows = [(p.birth, p.death) for p in self.pairs if p.q == q]
        return np.array(rows, dtype=np.float64).reshape(-1, 2)

    def __len__(self):
        return len(self.pairs)


def boundary_matrix(fc):
    index = fc.index
    columns = []
    for s in fc.simplices:
        if s.dim == 0:
            columns.append(())
            continue
        rows = sorted(index[face] for face in combinations(s.vertices, s.dim))
        columns.append(tuple(rows))
    return BoundaryMatrix(tuple(columns), fc.dims, fc.values)


def _add_columns(a, b):
    return sorted(set(a).symmetric_difference(b))


def reduce(m, clearing=True):
    """Standard left-to-right column reduction.

    With ``clearing`` the columns are processed by decreasing dimension and
    any column whose index already appeared as a pivot is zeroed without
    work (it would reduce to zero anyway), which yields the same pairing.
    """
    n = len(m.columns)
    reduced = [list(col) for col in m.columns]
    pivot_of = {}
    if clearing and n:
        order = []
        for d in range(int(m.dims.max()), 0, -1):
            order.extend(np.flatnonzero(m.dims == d).tolist())
    else:
        order = range(n)
    cleared = [False] * n
    for j in order:
        if cleared[j]:
            reduced[j] = []
            continue
        col = reduced[j]
        while col:
            k = pivot_of.get(col[-1])
            if k is None:
                break
            col = _add_columns(col, reduced[k])
        reduced[j] = col
        if col:
            low = col[-1]
            pivot_of[low] = j
            if clearing:
                cleared[low] = True
    pairs = tuple(sorted((low, j) for low, j in pivot_of.items()))
    essential = tuple(j for j in range(n) if not reduced[j] and j not in pivot_of)
    return Reduction(tuple(tuple(c) for c in reduced), pairs, essential)


def extract_diagram(pairing, fc, q_max):
    """Turn a reduction of ``fc``'s boundary matrix into a diagram up to degree q_max."""
    if math.isfinite(fc.t_max) and q_max >= fc.max_dim:
        raise InputError(
            f"q_max={q_max} needs simplices up to dimension {q_max + 1}, "
            f"complex was built with max_dim={fc.max_dim}"
        )
    simp = fc.simplices
    out = []
    for i, j in pairing.pairs:
        q = simp[i].dim
        if q > q_max:
            continue
        b, d = simp[i].value, simp[j].value
        if b < d:
            out.append(PersistencePair(q, b, d, i, j))
    censored = math.isfinite(fc.t_max)
    for i in pairing.essential:
        q = simp[i].dim
        if q <= q_max:
            out.append(PersistencePair(q, simp[i].value, math.inf, i, None, censored))
    out.sort(key=lambda p: (p.q, p.birth, p.death, p.birth_index))
    return PersistenceDiagram(tuple(out), q_max=q_max, t_max=fc.t_max)


def compute_diagram(fc, q_max=None, clearing=True):
    if q_max is None:
        q_max = fc.max_dim - 1 if math.isfinite(fc.t_max) else fc.max_dim
    return extract_diagram(reduce(boundary_matrix(fc), clearing=clearing), fc, q_max)


def diagram_from_cloud(cloud, kind, t_max, q_max, **kwargs):
    """Build the kappa-complex up to dimension q_max + 1 and compute its diagram."""
    fc = build_complex(cloud, kind, t_max, q_max + 1, **kwargs)
    return compute_diagram(fc, q_max)


def diagram_from_explicit_filtration(steps, q_max=None):
    """Diagram of an abstract filtration given as ``(vertices, value)`` steps.

    The steps must be closed under faces with face values not exceeding
    coface values; otherwise :class:`InputError` names the offending simplex.
    """
    fc = FilteredComplex.from_simplices(steps)
    problems = validate_complex(fc)
    if problems:
        raise InputError("invalid filtration: " + "; ".join(problems))
    return compute_diagram(fc, q_max)
