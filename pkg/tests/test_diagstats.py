import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdlimits.diagstats import (
    Rect,
    RectClass,
    anderson_darling,
    bottleneck_distance,
    box_rect,
    grid_rect_class,
    moment_summary,
    normalize,
    rectangle_mass,
    rectangle_mass_from_betti,
)
from pdlimits.exceptions import InputError, QueryError
from pdlimits.geometry import CECH
from pdlimits.persistence import diagram_from_cloud
from pdlimits.pointprocess import ProcessKind, ProcessSpec, sample

from conftest import brute_force_bottleneck, make_diagram, random_diagram

TWO_CYCLE = make_diagram([(1, 4), (2, 3)])


def random_rect(rng, top=2.0, grid=0.1):
    while True:
        r1, r2, s1, s2 = np.sort(rng.integers(0, int(round(top / grid)) + 1, size=4)) * grid
        if r1 < r2 <= s1 < s2:
            return Rect(round(r1, 10), round(r2, 10), round(s1, 10), round(s2, 10), closed_left=bool(rng.random() < 0.3))


def test_rectangle_mass_examples():
    assert rectangle_mass(TWO_CYCLE, 1, Rect(0, 2, 3, 4)) == 1
    assert rectangle_mass(TWO_CYCLE, 1, Rect(0, 1, 3.5, 4.5, closed_left=True)) == 1
    assert rectangle_mass(make_diagram([]), 1, Rect(0, 1, 2, 3)) == 0


def test_rectangle_validation_and_cutoff():
    with pytest.raises(InputError):
        Rect(0.5, 0.4, 0.6, 0.7)
    with pytest.raises(InputError):
        Rect(0.1, 0.6, 0.5, 0.7)
    capped = make_diagram([(1, 4)], t_max=4.0)
    with pytest.raises(QueryError):
        rectangle_mass(capped, 1, Rect(0, 2, 3, 4))


def test_mass_equals_signed_betti_combination():
    rng = np.random.default_rng(31)
    for _ in range(100):
        dgm = random_diagram(rng, int(rng.integers(0, 15)))
        for _ in range(10):
            rect = random_rect(rng)
            assert rectangle_mass(dgm, 1, rect) == rectangle_mass_from_betti(dgm, 1, rect)


def test_additivity_of_split_rectangles():
    rng = np.random.default_rng(32)
    for _ in range(50):
        dgm = random_diagram(rng, 20)
        whole = Rect(0.2, 0.8, 1.0, 1.8)
        left, right = Rect(0.2, 0.5, 1.0, 1.8), Rect(0.5, 0.8, 1.0, 1.8)
        low, high = Rect(0.2, 0.8, 1.0, 1.3), Rect(0.2, 0.8, 1.3, 1.8)
        m = rectangle_mass(dgm, 1, whole)
        assert m == rectangle_mass(dgm, 1, left) + rectangle_mass(dgm, 1, right)
        assert m == rectangle_mass(dgm, 1, low) + rectangle_mass(dgm, 1, high)


def test_grid_class_cells_are_disjoint():
    rc = grid_rect_class(2.0, 0.25)
    dgm = random_diagram(np.random.default_rng(33), 60, grid=0.05, top=1.95, t_max=3.0)
    for p in dgm.pairs:
        assert sum(r.contains(p.birth, p.death) for r in rc) <= 1
    covered = sum(1 for p in dgm.pairs if any(r.contains(p.birth, p.death) for r in rc))
    assert sum(rectangle_mass(dgm, 1, r) for r in rc) == covered


def test_box_rect_closes_at_zero():
    r = box_rect(0.0, 1.0, 0.2)
    assert r.closed_left and r.contains(0.0, 1.0)
    r = box_rect(0.5, math.sqrt(2) / 2, 0.01)
    assert not r.closed_left and r.contains(0.5, math.sqrt(2) / 2)


def test_normalize_lattice_example():
    cloud = sample(ProcessSpec(ProcessKind.SHIFTED_LATTICE, 2, 8, 0))
    dgm = diagram_from_cloud(cloud, CECH, 0.8, 1)
    rc = RectClass([Rect(0, 0.55, 0.6, 0.75, closed_left=True)])
    m = normalize(dgm, 1, rc, 8, 2)
    assert m.masses.tolist() == [49 / 64]
    doubled = normalize(dgm, 1, rc, 16, 2)
    assert doubled.masses[0] == m.masses[0] / 4
    empty = normalize(make_diagram([], t_max=0.8), 1, rc, 8, 2)
    assert empty.masses.tolist() == [0.0]


def test_bottleneck_examples():
    assert bottleneck_distance(TWO_CYCLE, TWO_CYCLE, q=1) == 0
    assert bottleneck_distance([(1, 4)], np.empty((0, 2))) == 1.5
    assert bottleneck_distance([(1, 4)], [(1.2, 4.1)]) == pytest.approx(0.2, abs=1e-12)
    assert bottleneck_distance(np.empty((0, 2)), np.empty((0, 2))) == 0


def test_bottleneck_essential_points():
    a = make_diagram([(0, math.inf), (1, 2)], q=0)
    b = make_diagram([(0.3, math.inf)], q=0)
    c = make_diagram([(0, math.inf), (0.5, math.inf)], q=0)
    assert bottleneck_distance(a, b) == pytest.approx(0.5)
    assert math.isinf(bottleneck_distance(a, c))


def random_points(rng, n):
    b = rng.uniform(0, 1, size=n)
    return np.column_stack([b, b + rng.uniform(0.01, 1, size=n)])


def test_bottleneck_matches_brute_force():
    rng = np.random.default_rng(41)
    for _ in range(50):
        A = random_points(rng, int(rng.integers(0, 6)))
        B = random_points(rng, int(rng.integers(0, 6)))
        assert abs(bottleneck_distance(A, B) - brute_force_bottleneck(A, B)) <= 1e-9


def test_bottleneck_pseudometric():
    rng = np.random.default_rng(42)
    for _ in range(50):
        A, B, C = (random_points(rng, int(rng.integers(0, 6))) for _ in range(3))
        ab, ba = bottleneck_distance(A, B), bottleneck_distance(B, A)
        assert ab == ba
        assert bottleneck_distance(A, C) <= ab + bottleneck_distance(B, C) + 1e-9


def test_anderson_darling_examples():
    rng = np.random.default_rng(0)
    assert anderson_darling(rng.standard_normal(1000)) < 1.159
    assert anderson_darling(rng.uniform(0, 1, 1000)) > 5 * 1.159
    with pytest.raises(InputError):
        anderson_darling([3.0] * 20)
    with pytest.raises(InputError):
        anderson_darling([1.0, 2.0])


def test_anderson_darling_matches_scipy():
    from scipy import stats

    x = np.random.default_rng(5).standard_normal(200)
    n = len(x)
    raw = stats.anderson(x, dist="norm").statistic
    assert anderson_darling(x) == pytest.approx(raw * (1 + 4 / n - 25 / n**2), rel=1e-10)


def test_moment_summary():
    out = moment_summary([1.0, 2.0, 3.0, 4.0])
    assert out["mean"] == 2.5 and out["variance"] == pytest.approx(5 / 3)
    assert out["skewness"] == pytest.approx(0.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 10), st.integers(1, 10)), max_size=8))
def test_mass_identity_property(rows):
    pts = [(b / 10, (b + d) / 10) for b, d in rows]
    dgm = make_diagram(pts)
    for rect in (Rect(0, 0.5, 0.5, 1.5, closed_left=True), Rect(0.2, 0.6, 0.7, 1.1), Rect(0.3, 1.0, 1.2, 2.0)):
        assert rectangle_mass(dgm, 1, rect) == rectangle_mass_from_betti(dgm, 1, rect)
