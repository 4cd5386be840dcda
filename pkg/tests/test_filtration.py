import itertools
import math

import numpy as np
import pytest

from pdlimits.exceptions import BudgetExceededError
from pdlimits.filtration import FilteredComplex, build_complex, neighborhood_graph, validate_complex
from pdlimits.geometry import CECH, RIPS, PointCloud, kappa_value
from pdlimits.pointprocess import ProcessKind, ProcessSpec, sample

from conftest import SQRT2_2, random_cloud


def brute_force_complex(cloud, kind, t_max, max_dim):
    out = {}
    for k in range(1, max_dim + 2):
        for verts in itertools.combinations(range(len(cloud)), k):
            v = kappa_value(kind, cloud.points[list(verts)])
            if v <= t_max:
                out[verts] = v
    return out


def test_square_neighborhood_graph(unit_square):
    edges, values = neighborhood_graph(unit_square, CECH, 0.6)
    assert sorted(map(tuple, edges)) == [(0, 1), (0, 2), (1, 3), (2, 3)]
    assert np.all(values == 0.5)


def test_neighborhood_graph_trivial_cases():
    edges, _ = neighborhood_graph(PointCloud([(0.0, 0.0)]), CECH, 1.0)
    assert len(edges) == 0
    edges, _ = neighborhood_graph(PointCloud([(0.0, 0.0), (3.0, 0.0)]), CECH, 1.0)
    assert len(edges) == 0


def test_square_complex_counts(unit_square):
    fc = build_complex(unit_square, CECH, 0.75, 2)
    assert [fc.count(d) for d in range(3)] == [4, 6, 4]
    assert fc.count(1, upto=0.5) == 4
    diag = [s for s in fc.simplices if s.dim == 1 and s.value > 0.5]
    assert len(diag) == 2
    assert all(s.value == pytest.approx(SQRT2_2, abs=1e-12) for s in diag)
    assert all(s.value == pytest.approx(SQRT2_2, abs=1e-12) for s in fc.simplices if s.dim == 2)
    assert validate_complex(fc) == []


def test_equilateral_rips():
    tri = PointCloud([(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)])
    fc = build_complex(tri, RIPS, 0.5, 2)
    assert [fc.count(d) for d in range(3)] == [3, 3, 1]
    assert all(s.value == pytest.approx(0.5, abs=1e-15) for s in fc.simplices if s.dim > 0)


def test_tiny_cutoff_gives_vertices_only():
    rng = np.random.default_rng(0)
    cloud = random_cloud(rng, 30)
    dmin = min(np.linalg.norm(a - b) for a, b in itertools.combinations(cloud.points, 2))
    fc = build_complex(cloud, CECH, dmin / 2 * 0.99, 2)
    assert len(fc) == 30 and fc.count(0) == 30


@pytest.mark.parametrize("kind", [CECH, RIPS])
def test_matches_brute_force_enumeration(kind):
    rng = np.random.default_rng(42)
    for _ in range(25):
        n = int(rng.integers(1, 9))
        cloud = random_cloud(rng, n, side=2.0)
        t_max = float(rng.uniform(0.2, 1.2))
        max_dim = int(rng.integers(1, 4))
        fc = build_complex(cloud, kind, t_max, max_dim)
        expected = brute_force_complex(cloud, kind, t_max, max_dim)
        got = {s.vertices: s.value for s in fc.simplices}
        assert got.keys() == expected.keys()
        for key, v in expected.items():
            assert got[key] == pytest.approx(v, abs=1e-12)


def test_grid_path_matches_brute_force_pairs():
    # above the small-cloud threshold the grid search is used
    rng = np.random.default_rng(5)
    cloud = random_cloud(rng, 300, side=8.0)
    edges, values = neighborhood_graph(cloud, CECH, 0.6)
    D = np.linalg.norm(cloud.points[:, None] - cloud.points[None], axis=2)
    i, j = np.nonzero(np.triu(D / 2 <= 0.6, k=1))
    assert sorted(map(tuple, edges)) == sorted(zip(i.tolist(), j.tolist()))


@pytest.mark.parametrize("kind", [CECH, RIPS])
def test_random_clouds_are_valid_and_local(kind):
    for seed in range(50):
        cloud = sample(ProcessSpec(ProcessKind.POISSON, 2, 4.0, seed))
        t_max = 0.6
        fc = build_complex(cloud, kind, t_max, 2)
        assert validate_complex(fc) == []
        reach = kind.rho(t_max)
        for s in fc.simplices:
            pts = cloud.points[list(s.vertices)]
            assert np.all(np.linalg.norm(pts[:, None] - pts[None], axis=2) <= reach + 1e-12)


def test_faces_precede_cofaces():
    rng = np.random.default_rng(9)
    fc = build_complex(random_cloud(rng, 40, side=4.0), CECH, 0.8, 3)
    pos = fc.index
    for j, s in enumerate(fc.simplices):
        for face in itertools.combinations(s.vertices, s.dim):
            if face:
                assert pos[face] < j


def test_deterministic():
    cloud = sample(ProcessSpec(ProcessKind.POISSON, 2, 6.0, 3))
    a = build_complex(cloud, CECH, 0.7, 2)
    b = build_complex(cloud, CECH, 0.7, 2)
    assert a.simplices == b.simplices


def test_validate_reports_missing_face():
    fc = FilteredComplex.from_simplices(
        [((0,), 0), ((1,), 0), ((2,), 0), ((0, 1), 1), ((1, 2), 1), ((0, 1, 2), 2)]
    )
    problems = validate_complex(fc)
    assert len(problems) == 1 and "closure" in problems[0] and "(0, 1, 2)" in problems[0]


def test_validate_reports_monotonicity():
    fc = FilteredComplex.from_simplices([((0,), 0), ((1,), 0), ((2,), 0), ((0, 1), 1.0), ((1, 2), 3.0), ((0, 2), 1.0), ((0, 1, 2), 2.0)])
    problems = validate_complex(fc)
    assert len(problems) == 1 and "monotonicity" in problems[0]


def test_budget_guard():
    rng = np.random.default_rng(1)
    with pytest.raises(BudgetExceededError):
        build_complex(random_cloud(rng, 40, side=1.0), CECH, 1.0, 3, max_simplices=500)
