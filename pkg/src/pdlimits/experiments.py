"""Monte Carlo drivers for the limit-theorem checks.

Each driver fans its replications out with joblib.  A replication is a
pure function of its derived seed and results are gathered in replication
order, so reports do not depend on the number of workers.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field, is_dataclass
from enum import Enum
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from .betti import BettiQuery, persistent_betti
from .diagstats import (
    RectClass,
    anderson_darling,
    bottleneck_distance,
    moment_summary,
    normalize,
)
from .exceptions import BudgetExceededError, InputError
from .filtration import DEFAULT_MAX_SIMPLICES
from .geometry import PointCloud, as_kappa, hausdorff_dist
from .persistence import diagram_from_cloud
from .pointprocess import ProcessKind, ProcessSpec, sample

__all__ = [
    "ExperimentReport",
    "LLNConfig",
    "CLTConfig",
    "StabilityConfig",
    "lln_experiment",
    "clt_experiment",
    "stability_experiment",
    "AD_CRITICAL_0_5_PERCENT",
]

AD_CRITICAL_0_5_PERCENT = 1.159


def _jsonable(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if callable(obj):
        return getattr(obj, "__name__", repr(obj))
    return obj


@dataclass
class ExperimentReport:
    """Outcome of one experiment run.

    ``passed`` is ``None`` when the pass criterion could not be evaluated
    (single window, degenerate sample).  ``timings`` holds wall-clock
    seconds and is the only field that changes between identical runs.
    """

    experiment: str
    config: dict
    results: dict
    summary: dict
    passed: Optional[bool]
    timings: dict = field(default_factory=dict)
    complete: bool = True

    def to_dict(self, include_timings=True):
        out = {
            "experiment": self.experiment,
            "config": _jsonable(self.config),
            "results": _jsonable(self.results),
            "summary": _jsonable(self.summary),
            "passed": self.passed,
            "complete": self.complete,
        }
        if include_timings:
            out["timings"] = _jsonable(self.timings)
        return out

    def to_json(self, include_timings=True):
        return json.dumps(self.to_dict(include_timings), indent=2) + "\n"

    def replications_csv(self):
        """Per-replication raw values as CSV (``values`` column per window)."""
        rows = self.results.get("replications", [])
        if not rows:
            return ""
        keys = list(rows[0].keys())
        lines = [",".join(keys)]
        for row in rows:
            lines.append(",".join(_csv_cell(row[k]) for k in keys))
        return "\n".join(lines) + "\n"


def _csv_cell(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(_csv_cell(x) for x in v)
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def _seed_for(master_seed, replication, stream=0):
    ss = np.random.SeedSequence([int(master_seed), int(stream), int(replication)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# --------------------------------------------------------------------------- LLN


@dataclass
class LLNConfig:
    process: ProcessSpec
    rects: RectClass
    windows: tuple
    q: int = 1
    kappa: str = "cech"
    replications: int = 1
    master_seed: int = 0
    t_max: Optional[float] = None
    cauchy_ratio: float = 0.6
    pass_fraction: float = 0.7
    max_simplices: int = DEFAULT_MAX_SIMPLICES

    def effective_t_max(self):
        return self.t_max if self.t_max is not None else self.rects.max_death + 0.01


def _lln_replication(cfg, k):
    big = max(cfg.windows)
    cloud = sample(cfg.process.with_window(big).with_seed(_seed_for(cfg.master_seed, k)))
    t_max = cfg.effective_t_max()
    out = []
    for L in cfg.windows:
        sub = cloud.restrict(L)
        diag = diagram_from_cloud(sub, cfg.kappa, t_max, cfg.q, max_simplices=cfg.max_simplices)
        out.append(normalize(diag, cfg.q, cfg.rects, L, cloud.dim).masses)
    return np.array(out)


def lln_experiment(cfg, n_jobs=None):
    """Normalized rectangle masses along an increasing window schedule.

    Every replication samples one realisation on the largest window and
    restricts it to the smaller ones, so each replication traces the
    almost-sure path L -> xi_{q,L} / L^N of a single configuration.  The
    pass flag asks that the final Cauchy difference of the mean masses is
    at most ``cauchy_ratio`` times the previous one for at least
    ``pass_fraction`` of the rectangles.
    """
    windows = tuple(float(L) for L in cfg.windows)
    if list(windows) != sorted(set(windows)):
        raise InputError("window schedule must be strictly increasing")
    if cfg.replications < 1:
        raise InputError("need at least one replication")
    t_max = cfg.effective_t_max()
    cfg.rects.check_cutoff(t_max)
    as_kappa(cfg.kappa)
    start = time.perf_counter()
    try:
        reps = Parallel(n_jobs=n_jobs)(
            delayed(_lln_replication)(cfg, k) for k in range(cfg.replications)
        )
    except BudgetExceededError as err:
        partial = ExperimentReport("lln", _config_echo(cfg, t_max=t_max), {}, {}, None, complete=False)
        raise BudgetExceededError(str(err), partial=partial) from err
    masses = np.stack(reps)  # (replications, windows, rects)
    mean = masses.mean(axis=0)
    std = masses.std(axis=0, ddof=1) if cfg.replications > 1 else np.zeros_like(mean)
    results = {
        "windows": list(windows),
        "mean_mass": mean,
        "std_mass": std,
        "replications": [
            {"replication": k, "masses": masses[k]} for k in range(cfg.replications)
        ],
    }
    summary = {}
    passed = None
    if len(windows) >= 2:
        diffs = np.abs(np.diff(mean, axis=0))
        results["cauchy_differences"] = diffs
        if len(windows) >= 3:
            last, prev = diffs[-1], diffs[-2]
            ok = last <= cfg.cauchy_ratio * prev
            frac = float(ok.mean()) if len(ok) else 1.0
            summary["cauchy_ok"] = ok
            summary["cauchy_ok_fraction"] = frac
            passed = frac >= cfg.pass_fraction
    timings = {"total_seconds": time.perf_counter() - start}
    return ExperimentReport("lln", _config_echo(cfg, t_max=t_max), results, summary, passed, timings)


# --------------------------------------------------------------------------- CLT


@dataclass
class CLTConfig:
    process: ProcessSpec
    q: int = 1
    r: float = 0.5
    s: float = 0.6
    kappa: str = "cech"
    replications: int = 200
    master_seed: int = 0
    t_max: Optional[float] = None
    compare_windows: tuple = ()
    ad_critical: float = AD_CRITICAL_0_5_PERCENT
    max_abs_skewness: float = 0.35
    max_abs_excess_kurtosis: float = 0.7
    variance_rel_tol: float = 0.25
    max_simplices: int = DEFAULT_MAX_SIMPLICES

    def effective_t_max(self):
        return self.t_max if self.t_max is not None else self.s + 0.01


def _clt_replication(cfg, window, stream, k):
    spec = cfg.process.with_window(window).with_seed(_seed_for(cfg.master_seed, k, stream))
    cloud = sample(spec)
    diag = diagram_from_cloud(cloud, cfg.kappa, cfg.effective_t_max(), cfg.q, max_simplices=cfg.max_simplices)
    return persistent_betti(diag, BettiQuery(cfg.q, cfg.r, cfg.s))


def _window_stats(values, window, dim):
    values = np.asarray(values, dtype=np.float64)
    out = moment_summary(values)
    out["window"] = window
    out["sigma2_hat"] = out["variance"] / window**dim
    out["degenerate"] = bool(np.all(values == values[0]))
    return out


def clt_experiment(cfg, n_jobs=None):
    """Replicated persistent Betti numbers beta_q^{r,s} on one window.

    Reports moments, the normalised variance Var / L^N, the corrected
    Anderson-Darling statistic against a fitted normal, and pass flags.
    Extra ``compare_windows`` are sampled from independent seed streams
    and their normalised variances compared with the primary window's.
    """
    if cfg.process.kind is not ProcessKind.POISSON:
        raise InputError("the CLT experiment is defined for Poisson input")
    if cfg.replications < 100:
        raise InputError(f"CLT needs at least 100 replications, got {cfg.replications}")
    t_max = cfg.effective_t_max()
    BettiQuery(cfg.q, cfg.r, cfg.s).check_cutoff(t_max)
    dim = cfg.process.dim
    windows = [float(cfg.process.window_side)] + [float(w) for w in cfg.compare_windows]
    start = time.perf_counter()
    per_window = []
    timings = {}
    for stream, window in enumerate(windows):
        t0 = time.perf_counter()
        try:
            values = Parallel(n_jobs=n_jobs)(
                delayed(_clt_replication)(cfg, window, stream, k) for k in range(cfg.replications)
            )
        except BudgetExceededError as err:
            partial = ExperimentReport(
                "clt", _config_echo(cfg, t_max=t_max), {"windows": per_window}, {}, None, complete=False
            )
            raise BudgetExceededError(str(err), partial=partial) from err
        stats_ = _window_stats(values, window, dim)
        stats_["values"] = [int(v) for v in values]
        per_window.append(stats_)
        timings[f"window_{window:g}_seconds"] = time.perf_counter() - t0

    main = per_window[0]
    checks = {}
    if main["degenerate"]:
        checks["degenerate_sample"] = True
        passed = None
    else:
        ad = anderson_darling(main["values"])
        main["anderson_darling"] = ad
        checks["anderson_darling_ok"] = ad < cfg.ad_critical
        checks["skewness_ok"] = abs(main["skewness"]) < cfg.max_abs_skewness
        checks["excess_kurtosis_ok"] = abs(main["excess_kurtosis"]) < cfg.max_abs_excess_kurtosis
        for other in per_window[1:]:
            base = main["sigma2_hat"]
            rel = abs(other["sigma2_hat"] - base) / base if base > 0 else math.inf
            other["variance_rel_diff"] = rel
            checks[f"variance_scaling_ok_L{other['window']:g}"] = rel <= cfg.variance_rel_tol
        passed = all(checks.values())
    timings["total_seconds"] = time.perf_counter() - start
    results = {"windows": per_window}
    return ExperimentReport("clt", _config_echo(cfg, t_max=t_max), results, checks, passed, timings)


# --------------------------------------------------------------------------- stability


@dataclass
class StabilityConfig:
    process: ProcessSpec
    kappas: tuple = ("cech",)
    q_max: int = 1
    eps: float = 0.05
    trials: int = 50
    master_seed: int = 0
    t_max: float = math.inf
    slack: float = 1e-9
    max_simplices: int = DEFAULT_MAX_SIMPLICES


def _stability_trial(cfg, k):
    cloud = sample(cfg.process.with_seed(_seed_for(cfg.master_seed, k)))
    rng = np.random.default_rng(_seed_for(cfg.master_seed, k, stream=1))
    moved = cloud.points + rng.uniform(-cfg.eps, cfg.eps, size=cloud.points.shape)
    other = PointCloud(moved)
    row = {"trial": k, "n_points": len(cloud)}
    if len(cloud) == 0:
        row["hausdorff"] = 0.0
        for name in cfg.kappas:
            row[name] = [0.0] * (cfg.q_max + 1)
        return row
    d_h = hausdorff_dist(cloud, other)
    row["hausdorff"] = d_h
    for name in cfg.kappas:
        d1 = diagram_from_cloud(cloud, name, cfg.t_max, cfg.q_max, max_simplices=cfg.max_simplices)
        d2 = diagram_from_cloud(other, name, cfg.t_max, cfg.q_max, max_simplices=cfg.max_simplices)
        row[name] = [bottleneck_distance(d1, d2, q) for q in range(cfg.q_max + 1)]
    return row


def stability_experiment(cfg, n_jobs=None):
    """Check d_B(D_q(X), D_q(X')) <= c_kappa * d_H(X, X') under random perturbation.

    Each point moves uniformly in [-eps, eps]^N.  The default ``t_max`` of
    ``inf`` builds full filtrations so no pair is censored.
    """
    if cfg.eps < 0:
        raise InputError("eps must be non-negative")
    if math.isfinite(cfg.t_max):
        raise InputError("stability needs uncensored diagrams; leave t_max at inf")
    kinds = {name: as_kappa(name) for name in cfg.kappas}
    for name, kind in kinds.items():
        if kind.lipschitz is None:
            raise InputError(f"kappa {name!r} declares no Lipschitz constant")
    start = time.perf_counter()
    rows = Parallel(n_jobs=n_jobs)(delayed(_stability_trial)(cfg, k) for k in range(cfg.trials))
    violations = []
    worst = {name: 0.0 for name in kinds}
    for row in rows:
        for name, kind in kinds.items():
            bound = kind.lipschitz * row["hausdorff"] + cfg.slack
            for q, d_b in enumerate(row[name]):
                if d_b > bound:
                    violations.append({"trial": row["trial"], "kappa": name, "q": q, "bottleneck": d_b, "bound": bound})
                if row["hausdorff"] > 0:
                    worst[name] = max(worst[name], d_b / row["hausdorff"])
    summary = {
        "violations": len(violations),
        "violation_details": violations,
        "max_ratio_bottleneck_over_hausdorff": worst,
    }
    timings = {"total_seconds": time.perf_counter() - start}
    results = {"replications": rows}
    return ExperimentReport("stability", _config_echo(cfg), results, summary, not violations, timings)


def _config_echo(cfg, **extra):
    out = _jsonable(cfg)
    out.update(_jsonable(extra))
    return out
