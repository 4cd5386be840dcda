import json
import math

import numpy as np
import pytest

from pdlimits.diagstats import Rect, RectClass, box_rect
from pdlimits.exceptions import BudgetExceededError, InputError, QueryError
from pdlimits.experiments import (
    CLTConfig,
    LLNConfig,
    StabilityConfig,
    clt_experiment,
    lln_experiment,
    stability_experiment,
)
from pdlimits.pointprocess import ProcessKind, ProcessSpec

POISSON_RECT = RectClass([Rect(0, 0.5, 0.6, 0.7, closed_left=True)])


def poisson(L, dim=2):
    return ProcessSpec(ProcessKind.POISSON, dim, L, 0)


def test_lattice_lln_exact_masses():
    cfg = LLNConfig(
        process=ProcessSpec(ProcessKind.SHIFTED_LATTICE, 2, 32, 0),
        rects=RectClass([box_rect(0.5, math.sqrt(2) / 2, 0.01)]),
        windows=(8, 16, 32),
        master_seed=1,
    )
    report = lln_experiment(cfg)
    np.testing.assert_array_equal(report.results["mean_mass"], [[49 / 64], [225 / 256], [961 / 1024]])
    assert report.passed is True


def test_poisson_lln_report_well_formed():
    cfg = LLNConfig(process=poisson(16), rects=POISSON_RECT, windows=(4, 8, 16), replications=3, master_seed=2)
    report = lln_experiment(cfg)
    doc = json.loads(report.to_json())
    assert doc["experiment"] == "lln" and doc["complete"] is True
    assert len(doc["results"]["replications"]) == 3
    assert all(math.isfinite(d) for row in doc["results"]["cauchy_differences"] for d in row)
    assert report.replications_csv().startswith("replication,masses")


def test_lln_single_window_single_replication():
    cfg = LLNConfig(process=poisson(6), rects=POISSON_RECT, windows=(6,), replications=1, master_seed=0)
    report = lln_experiment(cfg)
    assert len(report.results["replications"]) == 1
    assert "cauchy_differences" not in report.results
    assert report.passed is None


def test_lln_rejects_bad_schedule_and_cutoff():
    with pytest.raises(InputError):
        lln_experiment(LLNConfig(process=poisson(8), rects=POISSON_RECT, windows=(8, 4), master_seed=0))
    with pytest.raises(QueryError):
        lln_experiment(LLNConfig(process=poisson(8), rects=POISSON_RECT, windows=(8,), t_max=0.7, master_seed=0))


def test_lln_budget_keeps_partial_report():
    cfg = LLNConfig(process=poisson(8), rects=POISSON_RECT, windows=(4, 8), master_seed=0, max_simplices=20)
    with pytest.raises(BudgetExceededError) as info:
        lln_experiment(cfg)
    assert info.value.partial is not None and info.value.partial.complete is False


def test_lln_deterministic_across_workers():
    cfg = LLNConfig(process=poisson(8), rects=POISSON_RECT, windows=(4, 8), replications=4, master_seed=9)
    a = lln_experiment(cfg, n_jobs=1).to_dict(include_timings=False)
    b = lln_experiment(cfg, n_jobs=2).to_dict(include_timings=False)
    assert a == b


def test_clt_preconditions():
    with pytest.raises(InputError):
        clt_experiment(CLTConfig(process=poisson(10), replications=2, master_seed=0))
    lattice = ProcessSpec(ProcessKind.SHIFTED_LATTICE, 2, 10, 0)
    with pytest.raises(InputError):
        clt_experiment(CLTConfig(process=lattice, replications=100, master_seed=0))


def test_clt_report_fields_and_determinism():
    cfg = CLTConfig(process=poisson(6), replications=100, master_seed=3, r=0.4, s=0.45, compare_windows=(7,))
    a = clt_experiment(cfg, n_jobs=1)
    b = clt_experiment(cfg, n_jobs=2)
    assert a.to_dict(False) == b.to_dict(False)
    main = a.results["windows"][0]
    for key in ("mean", "variance", "sigma2_hat", "skewness", "excess_kurtosis", "values"):
        assert key in main
    assert len(main["values"]) == 100
    assert main["sigma2_hat"] == pytest.approx(main["variance"] / 36)
    assert "variance_rel_diff" in a.results["windows"][1]


def test_clt_equal_radii_uses_same_pipeline():
    cfg = CLTConfig(process=poisson(5), replications=100, master_seed=4, r=0.5, s=0.5)
    report = clt_experiment(cfg)
    assert report.experiment == "clt" and len(report.results["windows"][0]["values"]) == 100


def test_stability_zero_violations():
    cfg = StabilityConfig(process=poisson(3), kappas=("cech", "rips"), eps=0.05, trials=10, master_seed=1)
    report = stability_experiment(cfg)
    assert report.summary["violations"] == 0 and report.passed is True


def test_stability_without_perturbation():
    cfg = StabilityConfig(process=poisson(3), eps=0.0, trials=3, master_seed=1)
    report = stability_experiment(cfg)
    for row in report.results["replications"]:
        assert row["hausdorff"] == 0.0
        assert row["cech"] == [0.0, 0.0]
    assert report.summary["max_ratio_bottleneck_over_hausdorff"]["cech"] == 0.0


def test_stability_requires_full_filtration():
    with pytest.raises(InputError):
        stability_experiment(StabilityConfig(process=poisson(3), t_max=1.0, master_seed=0))
