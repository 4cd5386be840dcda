import itertools
import math

import numpy as np
import pytest
from scipy.optimize import minimize

from pdlimits import PointCloud
from pdlimits.persistence import PersistenceDiagram, PersistencePair

SQRT2_2 = math.sqrt(2) / 2

# outer 4-cycle at time 1, chord 13 at 2, then the two triangles at 3 and 4
TWO_CYCLE_STEPS = [
    ((1,), 0.0), ((2,), 0.0), ((3,), 0.0), ((4,), 0.0),
    ((1, 2), 1.0), ((2, 3), 1.0), ((3, 4), 1.0), ((1, 4), 1.0),
    ((1, 3), 2.0),
    ((1, 2, 3), 3.0),
    ((1, 3, 4), 4.0),
]


@pytest.fixture
def unit_square():
    return PointCloud([[0, 0], [1, 0], [0, 1], [1, 1]])


@pytest.fixture
def two_cycle_steps():
    return list(TWO_CYCLE_STEPS)


def convex_miniball(points):
    """Smallest enclosing ball radius as a convex program: min s s.t. |c - p|^2 <= s."""
    pts = np.asarray(points, dtype=float)
    if len(pts) == 1:
        return 0.0
    c0 = pts.mean(axis=0)
    x0 = np.append(c0, ((pts - c0) ** 2).sum(axis=1).max())
    cons = {"type": "ineq", "fun": lambda x: x[-1] - ((pts - x[:-1]) ** 2).sum(axis=1)}
    res = minimize(lambda x: x[-1], x0, constraints=[cons], method="SLSQP", options={"ftol": 1e-15, "maxiter": 500})
    return float(np.sqrt(max(res.x[-1], 0.0)))


def union_find_h0_deaths(points, kappa="cech"):
    """Finite H0 deaths by Kruskal: every merge happens at an edge value |x-y|/2."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    edges = sorted(
        (float(np.linalg.norm(pts[i] - pts[j])) / 2, i, j) for i, j in itertools.combinations(range(n), 2)
    )
    deaths = []
    for w, i, j in edges:
        a, b = find(i), find(j)
        if a != b:
            parent[a] = b
            deaths.append(w)
    return deaths


def gf2_rank(M):
    """Rank over GF(2) of a dense 0/1 matrix by row reduction."""
    M = (np.array(M, dtype=np.uint8) % 2).copy()
    if M.size == 0:
        return 0
    rank = 0
    rows, cols = M.shape
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if M[r, c]), None)
        if pivot is None:
            continue
        M[[rank, pivot]] = M[[pivot, rank]]
        for r in range(rows):
            if r != rank and M[r, c]:
                M[r] ^= M[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def betti_at(fc, q, t):
    """beta_q(K_t) = dim C_q - rank d_q - rank d_{q+1} with dense matrices."""
    def simplices(d):
        return [s.vertices for s in fc.simplices if s.dim == d and s.value <= t]

    def bmatrix(d):
        rows, cols = simplices(d - 1), simplices(d)
        idx = {s: i for i, s in enumerate(rows)}
        M = np.zeros((len(rows), len(cols)), dtype=np.uint8)
        for j, s in enumerate(cols):
            for f in itertools.combinations(s, d):
                M[idx[f], j] = 1
        return M

    n_q = len(simplices(q))
    rank_q = gf2_rank(bmatrix(q)) if q > 0 else 0
    rank_q1 = gf2_rank(bmatrix(q + 1))
    return n_q - rank_q - rank_q1


def brute_force_bottleneck(A, B):
    """Minimum over all partial matchings of the max cost (diagonal cost (d-b)/2)."""
    A = [tuple(p) for p in A]
    B = [tuple(p) for p in B]

    def pair_cost(a, b):
        return max(abs(a[0] - b[0]), abs(a[1] - b[1]))

    def diag(p):
        return (p[1] - p[0]) / 2

    best = math.inf

    def rec(i, used, current):
        nonlocal best
        if current >= best:
            return
        if i == len(A):
            rest = [diag(B[j]) for j in range(len(B)) if j not in used]
            best = min(best, max([current] + rest))
            return
        rec(i + 1, used, max(current, diag(A[i])))
        for j in range(len(B)):
            if j not in used:
                rec(i + 1, used | {j}, max(current, pair_cost(A[i], B[j])))

    rec(0, frozenset(), 0.0)
    return best


def random_cloud(rng, n, side=3.0, dim=2):
    pts = rng.uniform(-side / 2, side / 2, size=(n, dim))
    return PointCloud(pts)


def make_diagram(points, q=1, t_max=math.inf):
    """Degree-q diagram holding the given (birth, death) rows."""
    pairs = tuple(PersistencePair(q, float(b), float(d), i) for i, (b, d) in enumerate(points))
    return PersistenceDiagram(pairs, q_max=q, t_max=t_max)


def random_diagram(rng, n, grid=0.1, top=2.0, q=1, t_max=math.inf):
    """Points on a coarse grid so rectangle edges are hit exactly."""
    rows = []
    while len(rows) < n:
        b, d = np.sort(rng.integers(0, int(round(top / grid)) + 1, size=2)) * grid
        if b < d:
            rows.append((round(b, 10), round(d, 10)))
    return make_diagram(rows, q, t_max)


# (number, title, passed, detail) per acceptance criterion, filled by test_acceptance
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}: {detail}")
