"""Batch driver: load a TOML run description, analyze a surface, write reports.

Exit codes: 0 success, 2 precondition failure (umbilic or misaligned patch,
unknown fixture, malformed config), 3 I/O error.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .errors import ConfigError, GeometryError, NotIsothermic
from .export import dumps_report, export_mesh, read_csv, write_csv
from .fixtures import builtin_fixture, list_fixtures
from .lie_energy import el_residuals, is_channel, lie_energy, log_gap_residual, log_gap_uv
from .rotational import make_rotational, profile_from_samples
from .spaceform import SpaceForm
from .surface import Grid, check_coordinates, codazzi_residual, curvature_data, gauss_residual
from .variation import bump, first_variation_estimate, random_bumps
from .weingarten import (
    bonnet_check,
    fit_affine_weingarten,
    fit_linear_weingarten,
    is_tubular,
)

ALL_ANALYSES = ("curvature", "el", "energy", "weingarten", "structure")
KNOWN_ANALYSES = ALL_ANALYSES + ("variation",)
EXIT_OK, EXIT_PRECONDITION, EXIT_IO = 0, 2, 3


@dataclass
class AnalysisConfig:
    surface: str | None = None
    params: dict = field(default_factory=dict)
    profile: str | None = None
    kappa: int = 0
    domain: list | None = None
    nx: int = 64
    ny: int = 64
    tol_umbilic: float = 1e-8
    tol_curvature_line: float = 1e-8
    tol_fit: float = 1e-6
    tol_residual: float = 1e-9
    analyses: list = field(default_factory=lambda: list(ALL_ANALYSES))
    parallel: list = field(default_factory=list)
    variation: dict = field(default_factory=dict)
    seed: int = 0
    report: str | None = None
    csv_dir: str | None = None
    mesh: str | None = None
    base_dir: str = "."

    @classmethod
    def from_dict(cls, data, base_dir="."):
        try:
            surf = dict(data.get("surface", {}))
            grid = dict(data.get("grid", {}))
            tol = dict(data.get("tolerances", {}))
            an = dict(data.get("analyses", {}))
            out = dict(data.get("output", {}))
            cfg = cls(
                surface=surf.get("name"),
                params=dict(surf.get("params", {})),
                profile=surf.get("profile"),
                kappa=int(surf.get("kappa", 0)),
                domain=surf.get("domain"),
                nx=int(grid.get("nx", 64)),
                ny=int(grid.get("ny", grid.get("nx", 64))),
                tol_umbilic=float(tol.get("umbilic", 1e-8)),
                tol_curvature_line=float(tol.get("curvature_line", 1e-8)),
                tol_fit=float(tol.get("fit", 1e-6)),
                tol_residual=float(tol.get("residual", 1e-9)),
                analyses=list(an.get("requested", ALL_ANALYSES)),
                parallel=[float(t) for t in an.get("parallel", [])],
                variation=dict(an.get("variation", {})),
                seed=int(data.get("seed", 0)),
                report=out.get("report"),
                csv_dir=out.get("csv_dir"),
                mesh=out.get("mesh"),
                base_dir=str(base_dir),
            )
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"malformed config: {exc}") from None
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        path = Path(path)
        text = path.read_text()
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        return cls.from_dict(data, path.parent)

    def validate(self):
        if (self.surface is None) == (self.profile is None):
            raise ConfigError("give exactly one of surface.name or surface.profile")
        if self.nx < 8 or self.ny < 8:
            raise ConfigError(f"grid must be at least 8x8, got {self.nx}x{self.ny}")
        for name in ("tol_umbilic", "tol_curvature_line", "tol_fit", "tol_residual"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"tolerance {name} must be positive")
        unknown = set(self.analyses) - set(KNOWN_ANALYSES)
        if unknown:
            raise ConfigError(f"unknown analyses {sorted(unknown)}")
        if self.kappa not in (-1, 0, 1):
            raise ConfigError("kappa must be -1, 0 or 1")

    def resolve(self, name):
        return Path(self.base_dir) / name


def build_patch(cfg):
    if cfg.profile is not None:
        data = read_csv(cfg.resolve(cfg.profile))
        prof = profile_from_samples(data["v"], data["r"], data["h"], label=Path(cfg.profile).stem)
        patch = make_rotational(prof, SpaceForm(cfg.kappa) if cfg.kappa else None)
        patch.meta["fixture"] = f"profile:{cfg.profile}"
        patch.meta["params"] = {}
    else:
        params = dict(cfg.params)
        if cfg.surface == "spline-profile":
            params.setdefault("seed", cfg.seed)
        patch = builtin_fixture(cfg.surface, params)
    if cfg.domain is not None:
        patch = dataclasses.replace(patch, domain=tuple(tuple(map(float, d)) for d in cfg.domain))
    return patch


def _range(x):
    return [float(np.min(x)), float(np.max(x))]


def _verdict(claim, tag, holds, value, tol):
    return {"claim": claim, "tag": tag, "holds": bool(holds), "value": value, "tolerance": tol}


def _metadata(cfg, patch):
    return {
        "fixture": {
            "name": patch.meta.get("fixture", patch.label),
            "label": patch.label,
            "params": patch.meta.get("params", {}),
            "kappa": patch.sf.kappa,
            "domain": [list(d) for d in patch.domain],
            "rotational": bool(patch.meta.get("rotational", False)),
        },
        "grid": {"nx": cfg.nx, "ny": cfg.ny},
        "seed": cfg.seed,
        "tolerances": {
            "umbilic": cfg.tol_umbilic,
            "curvature_line": cfg.tol_curvature_line,
            "fit": cfg.tol_fit,
            "residual": cfg.tol_residual,
        },
        "tool": {"name": "lieminimal", "version": __version__},
    }


def _weingarten_section(c, cfg):
    lw = fit_linear_weingarten(c.K, c.H, cfg.tol_fit)
    aw = fit_affine_weingarten(c.k1, c.k2, cfg.tol_fit)
    return {
        "linear": {
            "coefficients": [lw.a, lw.b, lw.c],
            "delta": lw.delta,
            "fit_residual": lw.fit_residual,
            "null_dim": lw.null_dim,
            "holds": lw.holds,
            "tubular": is_tubular(lw, c.k1, c.k2, cfg.tol_fit),
            "elliptic": lw.elliptic,
            "tolerance": cfg.tol_fit,
        },
        "affine": {
            "coefficients": [aw.x, aw.y, aw.z],
            "fit_residual": aw.fit_residual,
            "null_dim": aw.null_dim,
            "holds": aw.holds,
            "tolerance": cfg.tol_fit,
        },
    }


def _variation_section(patch, cfg):
    opts = cfg.variation
    amplitude = float(opts.get("amplitude", 0.1))
    if "bumps" in opts:
        bumps = [bump(b["center"], b["radii"], b.get("amplitude", amplitude), patch.domain)
                 for b in opts["bumps"]]
    else:
        bumps = random_bumps(patch.domain, int(opts.get("count", 5)), seed=cfg.seed,
                             amplitude=amplitude, radius_range=(0.3, 0.5))
    eps = float(opts.get("eps", 1e-4))
    rows = []
    for i, b in enumerate(bumps):
        est = first_variation_estimate(patch, b, eps=eps)
        rows.append({
            "id": i,
            "center": list(b.center),
            "radii": list(b.radii),
            "amplitude": b.amplitude,
            "eps": eps,
            "dL_deps": est.value,
            "scaled": abs(est.value) / b.amplitude,
            "error_estimate": est.error / b.amplitude,
            "nodes": est.nodes,
        })
    return rows


def run(cfg, only=None):
    """Analyze the configured surface; returns ``(report, grids)``.

    ``only`` restricts the run to a subset of sections (used by subcommands).
    ``grids`` holds per-point arrays for CSV export.
    """
    patch = build_patch(cfg)
    report = _metadata(cfg, patch)
    analyses = list(only if only is not None else cfg.analyses)
    grids = {}
    verdicts = []
    grid = Grid(cfg.nx, cfg.ny, patch.domain)
    U, V = grid.points()

    coords = check_coordinates(patch, grid, cfg.tol_curvature_line)
    coords["tolerance"] = cfg.tol_curvature_line
    report["coordinates"] = coords

    needs_curvature = bool(set(analyses) & {"curvature", "el", "energy", "weingarten", "structure"})
    c = None
    if needs_curvature or cfg.parallel:
        c = curvature_data(patch, U, V, tol_umb=cfg.tol_umbilic, tol_cl=cfg.tol_curvature_line)
        grids["curvature"] = {"u": U, "v": V, "k1": c.k1, "k2": c.k2, "H": c.H, "K": c.K}

    if "curvature" in analyses:
        report["curvature"] = {
            "k1": _range(c.k1), "k2": _range(c.k2), "H": _range(c.H), "K": _range(c.K),
            "H_stddev": float(np.std(c.H)),
            "labeling": "k1 belongs to the u-direction, k2 to the v-direction",
        }
        ch = is_channel(patch, grid, cfg.tol_residual)
        ch["tolerance"] = cfg.tol_residual
        report["channel"] = ch
        report["separability"] = {
            "max_abs_log_gap_uv": float(np.max(np.abs(log_gap_uv(c)))),
            "max_abs_log_gap_residual": float(np.max(np.abs(log_gap_residual(c)))),
        }
    if "el" in analyses:
        el = el_residuals(c, patch.length_scale)
        grids["residuals"] = {"u": U, "v": V, "R1": el.R1, "R2": el.R2,
                              "R1_normalized": el.R1_normalized, "R2_normalized": el.R2_normalized}
        report["el"] = {"max_normalized": el.max_normalized, "mean_normalized": el.mean_normalized,
                        "max_raw": el.max_raw, "tolerance": cfg.tol_residual}
        minimal = el.max_normalized <= cfg.tol_residual
        tag = ("rotational-critical" if patch.meta.get("rotational")
               else "euler-lagrange")
        verdicts.append(_verdict(f"Lie minimal: {'yes' if minimal else 'no'} at tolerance "
                                 f"{cfg.tol_residual:g}", tag, minimal, el.max_normalized,
                                 cfg.tol_residual))
        h_spread = float(np.std(c.H))
        if h_spread <= 1e-8 and patch.meta.get("rotational"):
            verdicts.append(_verdict("cmc rotational surface is Lie minimal",
                                     "cmc-critical-rotational", minimal, h_spread, 1e-8))
    if "energy" in analyses:
        value = lie_energy(patch)
        report["energy"] = {"value": value, "abs": abs(value), "quadrature_nodes": [32, 32],
                            "labeling": "integrand k1_u k2_v / (k1 - k2)^2 with k1 along u"}
    if "weingarten" in analyses:
        w = _weingarten_section(c, cfg)
        report["weingarten"] = w
        verdicts.append(_verdict("linear Weingarten relation holds", "linear-weingarten",
                                 w["linear"]["holds"], w["linear"]["fit_residual"], cfg.tol_fit))
        verdicts.append(_verdict("affine Weingarten relation holds", "affine-weingarten",
                                 w["affine"]["holds"], w["affine"]["fit_residual"], cfg.tol_fit))
    if "structure" in analyses:
        r1, r2 = codazzi_residual(patch, U, V, scaled=True)
        codazzi = float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))
        try:
            gauss = float(np.max(np.abs(gauss_residual(patch, U, V, scaled=True))))
            gauss_note = "isothermic coordinates"
        except NotIsothermic:
            gauss, gauss_note = None, "skipped: coordinates are not isothermic"
        report["structure"] = {"codazzi_max_scaled": codazzi, "gauss_max_scaled": gauss,
                               "gauss_note": gauss_note, "tolerance": 1e-8}
        ok = codazzi <= 1e-8 and (gauss is None or gauss <= 1e-8)
        verdicts.append(_verdict("structure equations hold", "gauss-codazzi", ok,
                                 max(codazzi, gauss or 0.0), 1e-8))
    if cfg.parallel:
        base, rows = bonnet_check(patch, cfg.parallel, grid, fit_tol=cfg.tol_fit)
        report["bonnet"] = {"base": [base.a, base.b, base.c], "delta": base.delta, "rows": rows,
                            "tolerance_angle": 1e-6, "tolerance_delta": 1e-8}
        verdicts.append(_verdict("parallel surfaces stay linear Weingarten with the same Delta",
                                 "bonnet-delta", all(r["ok"] for r in rows),
                                 max(r["angle"] for r in rows), 1e-6))
    if "variation" in analyses:
        rows = _variation_section(patch, cfg)
        report["variation"] = {"rows": rows, "tolerance_scaled": 1e-6}
        grids["variation"] = {k: np.array([r[k] for r in rows], dtype=float)
                              for k in ("id", "dL_deps", "scaled", "error_estimate")}
        worst = max(r["scaled"] for r in rows) if rows else 0.0
        verdicts.append(_verdict("first variation vanishes for all tested bumps",
                                 "first-variation", worst <= 1e-6, worst, 1e-6))
    if patch.meta.get("rotational") and "profile" in patch.meta:
        v, r, h, _ = patch.meta["profile"].sample(max(cfg.ny, 2))
        grids["profile"] = {"v": v, "r": r, "h": h}
    report["verdicts"] = verdicts
    report["analyses"] = sorted(analyses) + (["parallel"] if cfg.parallel else [])
    return report, grids


def _write_outputs(cfg, report, grids, out):
    text = dumps_report(report)
    target = out or (str(cfg.resolve(cfg.report)) if cfg.report else None)
    if target:
        Path(target).write_text(text)
    else:
        sys.stdout.write(text)
    if cfg.csv_dir:
        d = cfg.resolve(cfg.csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        for name, cols in grids.items():
            write_csv(d / f"{name}.csv", cols)


def _parse_grid(text):
    try:
        nx, ny = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 64x64, got {text!r}") from None
    return nx, ny


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=_parse_grid, help="sample grid NxM")
    common.add_argument("--tol-el", type=float, help="Euler-Lagrange residual tolerance")
    common.add_argument("--seed", type=int, help="seed for random profiles and bumps")
    common.add_argument("--out", help="output path (report or mesh)")

    ap = argparse.ArgumentParser(prog="lieminimal", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list built-in fixtures")
    for name, text in (
        ("analyze", "full analysis, JSON report"),
        ("mesh", "export an OBJ mesh"),
        ("fit", "Weingarten fits only"),
        ("variation", "first-variation sweep only"),
    ):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("config")
    s = sub.add_parser("parallel", parents=[common], help="parallel surfaces and Bonnet check")
    s.add_argument("config")
    s.add_argument("--t", type=float, nargs="+", required=True, help="offset distances")
    return ap


def _apply_overrides(cfg, args):
    if args.grid:
        cfg.nx, cfg.ny = args.grid
    if args.tol_el is not None:
        cfg.tol_residual = args.tol_el
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.validate()


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "list":
            for name, doc in list_fixtures():
                print(f"{name:16s} {doc}")
            return EXIT_OK
        cfg = AnalysisConfig.load(args.config)
        _apply_overrides(cfg, args)
        if args.command == "mesh":
            patch = build_patch(cfg)
            target = args.out or (str(cfg.resolve(cfg.mesh)) if cfg.mesh else "mesh.obj")
            nv, nf = export_mesh(patch, Grid(cfg.nx, cfg.ny, patch.domain), target)
            print(f"wrote {target}: {nv} vertices, {nf} triangles")
            return EXIT_OK
        if args.command in ("fit", "variation"):
            cfg.parallel = []
        if args.command == "fit":
            report, grids = run(cfg, only=["weingarten"])
        elif args.command == "parallel":
            cfg.parallel = list(args.t)
            report, grids = run(cfg, only=[])
        elif args.command == "variation":
            report, grids = run(cfg, only=["variation"])
        else:
            report, grids = run(cfg)
        _write_outputs(cfg, report, grids, args.out)
        return EXIT_OK
    except OSError as exc:
        print(f"error: I/O: {exc}", file=sys.stderr)
        return EXIT_IO
    except GeometryError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
