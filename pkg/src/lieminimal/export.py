"""File outputs: CSV grids, OBJ meshes and the JSON report."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import jets
from .surface import frame

SCHEMA_VERSION = 1


def _fmt(x):
    return f"{float(x):.10g}"


def write_csv(path, columns):
    """Write equal-length columns (dict name -> array) with a header row."""
    names = list(columns)
    data = [np.ravel(np.asarray(columns[k], dtype=float)) for k in names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*data):
            w.writerow([_fmt(x) for x in row])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(r[i]) for r in body]) for i, name in enumerate(header)}


def _project(P, Nrm, kappa):
    """Map ambient points/normals to R^3 (identity, stereographic, or Poincare ball)."""
    if kappa == 0:
        return P[:3], Nrm[:3]
    d = 1.0 + P[3]
    X = P[:3] / d
    # differential of p -> p[:3] / (1 + p4) applied to the normal
    dn = Nrm[:3] / d - P[:3] * Nrm[3] / d**2
    return X, dn


def export_mesh(p, grid, path):
    """Triangulated OBJ of the patch with per-vertex normals.

    Curved space forms are drawn in R^3: the 3-sphere by stereographic
    projection ``p[:3] / (1 + p4)`` and hyperbolic space by the same formula,
    which lands in the Poincare ball.
    """
    U, V = grid.points()
    fr = frame(p, U, V, jets.MIN_SEED_ORDER)
    P = np.array([c.value for c in fr.X])
    Nrm = np.array([c.value for c in fr.n])
    X, dn = _project(P, Nrm, p.sf.kappa)
    dn = dn / np.linalg.norm(dn, axis=0)
    nx, ny = U.shape
    lines = [
        f"# {p.label}: {nx}x{ny} grid over {p.domain}",
        {
            0: "# Euclidean coordinates",
            1: "# 3-sphere shown by stereographic projection p[:3]/(1+p4)",
            -1: "# hyperbolic space shown in the Poincare ball p[:3]/(1+p4)",
        }[p.sf.kappa],
    ]
    for i in range(nx):
        for j in range(ny):
            lines.append("v " + " ".join(_fmt(X[k, i, j]) for k in range(3)))
    for i in range(nx):
        for j in range(ny):
            lines.append("vn " + " ".join(_fmt(dn[k, i, j]) for k in range(3)))
    for i in range(nx - 1):
        for j in range(ny - 1):
            a = i * ny + j + 1
            b, c, d = a + ny, a + ny + 1, a + 1
            lines.append(f"f {a}//{a} {b}//{b} {c}//{c}")
            lines.append(f"f {a}//{a} {c}//{c} {d}//{d}")
    Path(path).write_text("\n".join(lines) + "\n")
    return nx * ny, 2 * (nx - 1) * (ny - 1)


def read_obj(path):
    verts, normals, faces = [], [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "vn":
            normals.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(x.split("/")[0]) for x in parts[1:]])
    return np.array(verts), np.array(normals), faces


def _clean(obj):
    """Convert numpy scalars/arrays and non-finite floats to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps_report(report):
    report = dict(report)
    report.setdefault("schema_version", SCHEMA_VERSION)
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def write_report(report, path):
    Path(path).write_text(dumps_report(report))


def read_report(path):
    data = json.loads(Path(path).read_text())
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema {data.get('schema_version')!r}")
    return data
