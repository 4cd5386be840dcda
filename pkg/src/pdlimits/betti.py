"""Persistent Betti numbers and the rank-based cross-check.

``persistent_betti`` reads the count off a diagram (points with
``birth <= r`` and ``death > s``).  ``persistent_betti_oracle`` never
touches a diagram: it computes ``dim Z_q(K_r) - dim(Z_q(K_r) & B_q(K_s))``
directly by Gaussian elimination on bit-packed GF(2) vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .exceptions import BudgetExceededError, InputError, QueryError

__all__ = [
    "BettiQuery",
    "persistent_betti",
    "persistent_betti_oracle",
    "multi_add_bound",
    "ORACLE_MAX_SIMPLICES",
]

ORACLE_MAX_SIMPLICES = 5000


@dataclass(frozen=True)
class BettiQuery:
    """Degree q and window 0 <= r <= s at which to evaluate beta_q^{r,s}."""

    q: int
    r: float
    s: float

    def __post_init__(self):
        if self.q < 0:
            raise QueryError(f"degree must be >= 0, got {self.q}")
        if not 0 <= self.r <= self.s:
            raise QueryError(f"need 0 <= r <= s, got r={self.r}, s={self.s}")

    def check_cutoff(self, t_max):
        if self.s >= t_max:
            raise QueryError(
                f"s={self.s} must lie strictly below the filtration cutoff t_max={t_max}"
            )


def persistent_betti(diagram, query):
    """Number of degree-q diagram points with birth <= r and death > s.

    Births compare non-strictly and deaths strictly, so ``r == s == t``
    gives the ordinary Betti number of the complex at time t.
    """
    query.check_cutoff(diagram.t_max)
    if query.q > diagram.q_max:
        raise QueryError(f"diagram only holds degrees up to {diagram.q_max}")
    return sum(1 for p in diagram.pairs if p.q == query.q and p.birth <= query.r and p.death > query.s)


class _GF2Basis:
    """Row-echelon basis of GF(2) vectors stored as Python ints."""

    def __init__(self):
        self.pivots = {}

    def reduce(self, vec):
        while vec:
            top = vec.bit_length() - 1
            row = self.pivots.get(top)
            if row is None:
                return vec
            vec ^= row
        return 0

    def add(self, vec):
        """Insert ``vec``; True when it was independent of the basis."""
        vec = self.reduce(vec)
        if vec:
            self.pivots[vec.bit_length() - 1] = vec
            return True
        return False

    def __len__(self):
        return len(self.pivots)


def _boundary_bits(simplex, row_index):
    bits = 0
    for face in combinations(simplex, len(simplex) - 1):
        bits |= 1 << row_index[face]
    return bits


def _cycle_basis(q_simplices, row_index):
    """Kernel basis of the boundary map on the given q-simplices, as q-chains."""
    if not q_simplices:
        return []
    if len(q_simplices[0]) == 1:
        return [1 << i for i in range(len(q_simplices))]
    pivots = {}
    kernel = []
    for i, simplex in enumerate(q_simplices):
        vec, combo = _boundary_bits(simplex, row_index), 1 << i
        while vec:
            top = vec.bit_length() - 1
            hit = pivots.get(top)
            if hit is None:
                pivots[top] = (vec, combo)
                break
            vec ^= hit[0]
            combo ^= hit[1]
        if not vec:
            kernel.append(combo)
    return kernel


def persistent_betti_oracle(fc, query, max_simplices=ORACLE_MAX_SIMPLICES):
    """beta_q^{r,s} of a small filtered complex by subspace arithmetic.

    dim(Z + B) comes from the rank of the stacked generators, then
    dim(Z & B) = dim Z + dim B - dim(Z + B) and the answer is
    dim Z - dim(Z & B).
    """
    query.check_cutoff(fc.t_max)
    if len(fc) > max_simplices:
        raise BudgetExceededError(
            f"oracle is limited to {max_simplices} simplices, complex has {len(fc)}"
        )
    q, r, s = query.q, query.r, query.s
    if q + 1 > fc.max_dim and math.isfinite(fc.t_max):
        raise QueryError(f"degree {q} needs simplices of dimension {q + 1}")
    # columns of C_q(K_s); K_r's q-simplices come first so cycles of K_r use low bits
    q_r = [x.vertices for x in fc.simplices if x.dim == q and x.value <= r]
    q_s = q_r + [x.vertices for x in fc.simplices if x.dim == q and r < x.value <= s]
    faces = [x.vertices for x in fc.simplices if x.dim == q - 1 and x.value <= r]
    row_index = {f: i for i, f in enumerate(faces)}
    cycles = _cycle_basis(q_r, row_index)

    chain_index = {f: i for i, f in enumerate(q_s)}
    boundaries = _GF2Basis()
    for x in fc.simplices:
        if x.dim == q + 1 and x.value <= s:
            boundaries.add(_boundary_bits(x.vertices, chain_index))
    dim_b = len(boundaries)
    for z in cycles:
        boundaries.add(z)
    dim_sum = len(boundaries)
    dim_z = len(cycles)
    dim_cap = dim_z + dim_b - dim_sum
    return dim_z - dim_cap


def _keyed(fc):
    """Simplices keyed by their vertex coordinates, so two complexes can be compared."""
    pts = fc.cloud.points if fc.cloud is not None else None
    out = {}
    for x in fc.simplices:
        key = x.vertices if pts is None else frozenset(tuple(pts[v]) for v in x.vertices)
        out[key] = x
    return out


def multi_add_bound(fc_small, fc_big, query):
    """Upper bound on |beta^{r,s}(big) - beta^{r,s}(small)| for nested filtrations.

    Sums over j in {q, q+1}: the j-simplices of the big complex at time s
    missing from the small one, plus the j-simplices of the small complex
    born in (r, s] whose birth in the big complex is already <= r.
    Simplices are identified by vertex coordinates (or by vertex labels for
    abstract complexes).
    """
    small, big = _keyed(fc_small), _keyed(fc_big)
    for key, x in small.items():
        y = big.get(key)
        if y is None or y.value > x.value:
            raise InputError(f"complexes are not nested at simplex {sorted(key)}")
    q, r, s = query.q, query.r, query.s
    total = 0
    for key, y in big.items():
        if y.dim not in (q, q + 1):
            continue
        x = small.get(key)
        if y.value <= s and (x is None or x.value > s):
            total += 1
        elif x is not None and r < x.value <= s and y.value <= r:
            total += 1
    return total
