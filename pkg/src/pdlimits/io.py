"""File formats: point CSV, diagram CSV, diagram SVG scatter.

Point files hold one point per line as comma-separated coordinates, no
header.  Diagram files start with optional ``# key=value`` metadata lines
(``t_max`` and ``q_max``), then the header ``q,birth,death,censored`` and
one pair per line; deaths are ``inf`` for essential classes.  Floats are
written with ``repr`` so they round-trip exactly.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from .exceptions import InputError
from .geometry import PointCloud
from .persistence import PersistenceDiagram, PersistencePair

__all__ = [
    "DIAGRAM_HEADER",
    "format_float",
    "points_to_csv",
    "read_points_csv",
    "write_points_csv",
    "diagram_to_csv",
    "read_diagram_csv",
    "write_diagram_csv",
    "write_diagram_svg",
]

DIAGRAM_HEADER = ("q", "birth", "death", "censored")


def format_float(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def points_to_csv(cloud):
    return "".join(",".join(format_float(c) for c in row) + "\n" for row in cloud.points)


def write_points_csv(cloud, path):
    Path(path).write_text(points_to_csv(cloud))


def read_points_csv(path):
    path = Path(path)
    if not path.exists():
        raise InputError(f"points file not found: {path}")
    rows = []
    width = None
    seen = set()
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                coords = tuple(float(c) for c in row)
            except ValueError:
                raise InputError(f"{path}:{lineno}: cannot parse {row!r} as numbers") from None
            if width is None:
                width = len(coords)
            elif len(coords) != width:
                raise InputError(f"{path}:{lineno}: ragged row, expected {width} fields, got {len(coords)}")
            if not all(math.isfinite(c) for c in coords):
                raise InputError(f"{path}:{lineno}: non-finite coordinate")
            if coords in seen:
                raise InputError(f"{path}:{lineno}: duplicate point {coords}")
            seen.add(coords)
            rows.append(coords)
    if not rows:
        raise InputError(f"{path}: no points")
    return PointCloud(np.array(rows, dtype=np.float64))


def diagram_to_csv(diagram):
    buf = io.StringIO()
    buf.write(f"# t_max={format_float(diagram.t_max)}\n")
    buf.write(f"# q_max={diagram.q_max}\n")
    buf.write(",".join(DIAGRAM_HEADER) + "\n")
    for p in diagram.pairs:
        buf.write(f"{p.q},{format_float(p.birth)},{format_float(p.death)},{str(p.censored).lower()}\n")
    return buf.getvalue()


def write_diagram_csv(diagram, path):
    Path(path).write_text(diagram_to_csv(diagram))


def read_diagram_csv(path):
    path = Path(path)
    if not path.exists():
        raise InputError(f"diagram file not found: {path}")
    meta = {}
    pairs = []
    header_seen = False
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
            continue
        fields = [f.strip() for f in line.split(",")]
        if not header_seen:
            if tuple(fields) != DIAGRAM_HEADER:
                raise InputError(f"{path}:{lineno}: expected header {','.join(DIAGRAM_HEADER)}")
            header_seen = True
            continue
        if len(fields) != 4:
            raise InputError(f"{path}:{lineno}: expected 4 fields, got {len(fields)}")
        try:
            q, birth, death = int(fields[0]), float(fields[1]), float(fields[2])
        except ValueError:
            raise InputError(f"{path}:{lineno}: cannot parse {line!r}") from None
        if fields[3] not in ("true", "false"):
            raise InputError(f"{path}:{lineno}: censored must be true or false")
        if not birth < death:
            raise InputError(f"{path}:{lineno}: birth {birth} is not below death {death}")
        pairs.append(PersistencePair(q, birth, death, len(pairs), None, fields[3] == "true"))
    if not header_seen:
        raise InputError(f"{path}: missing header line")
    t_max = float(meta.get("t_max", "inf"))
    q_max = int(meta["q_max"]) if "q_max" in meta else max((p.q for p in pairs), default=0)
    return PersistenceDiagram(tuple(pairs), q_max=q_max, t_max=t_max)


def write_diagram_svg(diagram, path, q=None):
    """Scatter of (birth, death) with the diagonal; essential points drawn at the top edge."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    degrees = range(diagram.q_max + 1) if q is None else [q]
    finite_top = [p.death for p in diagram.pairs if math.isfinite(p.death)]
    top = diagram.t_max if math.isfinite(diagram.t_max) else max(finite_top + [1.0]) * 1.1
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.plot([0, top], [0, top], color="grey", lw=0.8)
    for d in degrees:
        pts = diagram.points(d)
        if len(pts) == 0:
            continue
        deaths = np.where(np.isinf(pts[:, 1]), top, pts[:, 1])
        ax.scatter(pts[:, 0], deaths, s=10, label=f"H{d}")
    ax.set_xlabel("birth")
    ax.set_ylabel("death")
    ax.set_xlim(0, top)
    ax.set_ylim(0, top * 1.02)
    ax.legend(loc="lower right")
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
