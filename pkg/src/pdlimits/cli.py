"""Command-line front end: ``pdlimits <subcommand> [flags]``.

Exit codes: 0 success/pass, 1 runtime error, 2 usage error,
3 statistical criterion failed (report still written), 4 resource budget
exceeded (partial report written).
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

from . import io as pdio
from .betti import BettiQuery, persistent_betti, persistent_betti_oracle
from .diagstats import Rect, RectClass, box_rect, grid_rect_class
from .exceptions import BudgetExceededError, PDLimitsError
from .experiments import CLTConfig, LLNConfig, StabilityConfig, clt_experiment, lln_experiment, stability_experiment
from .filtration import DEFAULT_MAX_SIMPLICES, build_complex
from .persistence import compute_diagram
from .pointprocess import ProcessKind, ProcessSpec, sample

log = logging.getLogger("pdlimits")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_STAT_FAIL, EXIT_BUDGET = 0, 1, 2, 3, 4

_PROCESS_NAMES = {"poisson": "poisson", "lattice": "lattice", "shifted_lattice": "lattice", "thomas": "thomas"}


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _rect(text):
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 4:
            return Rect(*map(float, parts))
        if len(parts) == 5 and parts[4].lower() in ("closed", "true", "1"):
            return Rect(*map(float, parts[:4]), closed_left=True)
    except PDLimitsError as err:
        raise argparse.ArgumentTypeError(str(err)) from None
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"rectangle must be r1,r2,s1,s2[,closed], got {text!r}")


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value

    return parse


def _add_process_flags(p, default_window=None):
    p.add_argument("--process", choices=sorted(_PROCESS_NAMES), default="poisson")
    p.add_argument("--lambda", dest="intensity", type=_positive(float), default=1.0)
    p.add_argument("--dim", type=_positive(int), default=2)
    p.add_argument("--window", type=_positive(float), default=default_window)
    p.add_argument("--parent-lambda", dest="parent_intensity", type=_positive(float), default=0.1)
    p.add_argument("--offspring", dest="mean_offspring", type=_positive(float), default=10.0)
    p.add_argument("--offspring-std", dest="offspring_std", type=_positive(float), default=0.5)


def _add_common(p, stochastic=False, report=False):
    p.add_argument("--config", type=Path, help="file of 'key = value' lines used as defaults")
    p.add_argument("--threads", type=_positive(int), help="worker count (env PDLIMITS_THREADS)")
    if stochastic:
        p.add_argument("--seed", type=int, help="master seed (mandatory)")
    if report:
        p.add_argument("--out", type=Path, help="write the report here instead of stdout")
        p.add_argument("--csv", type=Path, help="also dump per-replication values as CSV")
        p.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
        p.add_argument("--max-simplices", type=_positive(int), default=DEFAULT_MAX_SIMPLICES)


def build_parser():
    parser = argparse.ArgumentParser(prog="pdlimits", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a point process into a point CSV")
    _add_process_flags(p, default_window=10.0)
    _add_common(p, stochastic=True)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("diagram", help="persistence diagram of a point file")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--kappa", choices=("cech", "rips"), default="cech")
    p.add_argument("--tmax", type=_positive(float), required=True)
    p.add_argument("--qmax", type=int, default=1)
    p.add_argument("--out", type=Path)
    p.add_argument("--svg", type=Path)
    p.add_argument("--max-simplices", type=_positive(int), default=DEFAULT_MAX_SIMPLICES)
    _add_common(p)

    p = sub.add_parser("betti", help="persistent Betti number from a diagram file")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--oracle", action="store_true", help="cross-check with the rank oracle")
    p.add_argument("--points", type=Path, help="point file the diagram came from (for --oracle)")
    p.add_argument("--kappa", choices=("cech", "rips"), default="cech")
    _add_common(p)

    p = sub.add_parser("lln", help="law of large numbers for rectangle masses")
    _add_process_flags(p)
    p.add_argument("--kappa", choices=("cech", "rips"), default="cech")
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--Ls", dest="windows", type=_float_list, default=[16.0, 32.0, 64.0])
    p.add_argument("--reps", type=_positive(int), default=1)
    p.add_argument("--tmax", type=_positive(float))
    p.add_argument("--rect", dest="rects", type=_rect, action="append")
    p.add_argument("--grid", type=_positive(float), help="add grid cells of this side below the cutoff")
    p.add_argument("--cauchy-ratio", type=_positive(float), default=0.6)
    p.add_argument("--pass-fraction", type=_positive(float), default=0.7)
    _add_common(p, stochastic=True, report=True)

    p = sub.add_parser("clt", help="central limit theorem for persistent Betti numbers")
    _add_process_flags(p, default_window=20.0)
    p.add_argument("--kappa", choices=("cech", "rips"), default="cech")
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--s", type=float, default=0.6)
    p.add_argument("--reps", type=_positive(int), default=200)
    p.add_argument("--tmax", type=_positive(float))
    p.add_argument("--compare-windows", type=_float_list, default=[])
    _add_common(p, stochastic=True, report=True)

    p = sub.add_parser("stability", help="bottleneck vs Hausdorff stability")
    _add_process_flags(p, default_window=4.0)
    p.add_argument("--kappa", type=lambda t: [k.strip() for k in t.split(",")], default=["cech"])
    p.add_argument("--qmax", type=int, default=1)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--trials", type=_positive(int), default=50)
    _add_common(p, stochastic=True, report=True)
    return parser


def _read_config(path):
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise PDLimitsError(f"{path}:{lineno}: expected 'key = value'")
        values[key.strip().lstrip("-")] = value.strip()
    return values


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is not None:
        try:
            entries = _read_config(args.config)
        except (OSError, PDLimitsError) as err:
            parser.error(f"cannot read config: {err}")
        prefix = []
        for key, value in entries.items():
            flag = "--Ls" if key == "Ls" else "--" + key.replace("_", "-")
            prefix += [flag, value] if value.lower() not in ("true", "yes") else [flag]
        # explicit flags come last so they override config entries
        at = argv.index(args.command) + 1
        args = parser.parse_args(argv[:at] + prefix + argv[at:])
    if getattr(args, "seed", "absent") is None:
        parser.error(f"{args.command}: --seed is required")
    return args


def _n_jobs(args):
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("PDLIMITS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer PDLIMITS_THREADS=%r", env)
    return None


def _spec(args, window=None, seed=0):
    return ProcessSpec(
        kind=ProcessKind(_PROCESS_NAMES[args.process]),
        dim=args.dim,
        window_side=window if window is not None else args.window,
        seed=seed,
        intensity=args.intensity,
        parent_intensity=args.parent_intensity,
        mean_offspring=args.mean_offspring,
        offspring_std=args.offspring_std,
    )


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_sample(args):
    cloud = sample(_spec(args, seed=args.seed))
    _emit(pdio.points_to_csv(cloud), args.out)
    return EXIT_OK


def cmd_diagram(args):
    cloud = pdio.read_points_csv(args.input)
    fc = build_complex(cloud, args.kappa, args.tmax, args.qmax + 1, max_simplices=args.max_simplices)
    diagram = compute_diagram(fc, args.qmax)
    _emit(pdio.diagram_to_csv(diagram), args.out)
    if args.svg is not None:
        pdio.write_diagram_svg(diagram, args.svg)
    return EXIT_OK


def cmd_betti(args):
    diagram = pdio.read_diagram_csv(args.input)
    query = BettiQuery(args.q, args.r, args.s)
    value = persistent_betti(diagram, query)
    if args.oracle:
        if args.points is None:
            raise PDLimitsError("--oracle needs --points")
        cloud = pdio.read_points_csv(args.points)
        fc = build_complex(cloud, args.kappa, diagram.t_max, args.q + 1)
        expected = persistent_betti_oracle(fc, query)
        if expected != value:
            print(f"mismatch: diagram gives {value}, rank oracle gives {expected}", file=sys.stderr)
            print(f"{value} {expected}")
            return EXIT_RUNTIME
    print(value)
    return EXIT_OK


def _default_rects(args, t_max_hint):
    rects = list(args.rects or [])
    if not rects:
        if args.process == "lattice" or args.process == "shifted_lattice":
            q = args.q
            rects.append(box_rect(math.sqrt(q) / 2, math.sqrt(q + 1) / 2, 0.01))
        else:
            rects.append(Rect(0.0, 0.5, 0.6, 0.7, closed_left=True))
    rc = RectClass(tuple(rects))
    if args.grid:
        top = (args.tmax if args.tmax else t_max_hint) - 0.01
        grid = grid_rect_class(top, args.grid, exclude=rects[0] if len(rects) == 1 else None)
        rc = RectClass(tuple(rects) + tuple(r for r in grid.rects if r not in rects))
    return rc


def _write_report(report, args):
    _emit(report.to_json(include_timings=args.timings), args.out)
    if args.csv is not None:
        Path(args.csv).write_text(report.replications_csv())


def _finish(report, args):
    _write_report(report, args)
    if report.passed is False:
        return EXIT_STAT_FAIL
    return EXIT_OK


def cmd_lln(args):
    base = RectClass(tuple(args.rects or ()))
    hint = max(base.max_death, math.sqrt(args.q + 1) / 2 + 0.01) + 0.05
    rects = _default_rects(args, hint)
    cfg = LLNConfig(
        process=_spec(args, window=max(args.windows)),
        rects=rects,
        windows=tuple(args.windows),
        q=args.q,
        kappa=args.kappa,
        replications=args.reps,
        master_seed=args.seed,
        t_max=args.tmax,
        cauchy_ratio=args.cauchy_ratio,
        pass_fraction=args.pass_fraction,
        max_simplices=args.max_simplices,
    )
    return _finish(lln_experiment(cfg, n_jobs=_n_jobs(args)), args)


def cmd_clt(args):
    cfg = CLTConfig(
        process=_spec(args),
        q=args.q,
        r=args.r,
        s=args.s,
        kappa=args.kappa,
        replications=args.reps,
        master_seed=args.seed,
        t_max=args.tmax,
        compare_windows=tuple(args.compare_windows),
        max_simplices=args.max_simplices,
    )
    return _finish(clt_experiment(cfg, n_jobs=_n_jobs(args)), args)


def cmd_stability(args):
    cfg = StabilityConfig(
        process=_spec(args),
        kappas=tuple(args.kappa),
        q_max=args.qmax,
        eps=args.eps,
        trials=args.trials,
        master_seed=args.seed,
        max_simplices=args.max_simplices,
    )
    return _finish(stability_experiment(cfg, n_jobs=_n_jobs(args)), args)


COMMANDS = {
    "sample": cmd_sample,
    "diagram": cmd_diagram,
    "betti": cmd_betti,
    "lln": cmd_lln,
    "clt": cmd_clt,
    "stability": cmd_stability,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except BudgetExceededError as err:
        print(f"pdlimits: {err}", file=sys.stderr)
        if err.partial is not None and hasattr(args, "timings"):
            _write_report(err.partial, args)
        return EXIT_BUDGET
    except (PDLimitsError, OSError) as err:
        print(f"pdlimits: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
