"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are printed
in the terminal summary under "acceptance criteria".
"""
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from lieminimal import jets
from lieminimal.errors import FocalDegeneracy, NotIsothermic
from lieminimal.fixtures import builtin_fixture
from lieminimal.lie_energy import el_residuals, lie_energy, log_gap_uv
from lieminimal.rotational import channel_data, channel_to_rotational, delaunay_profile, make_rotational
from lieminimal.surface import (
    codazzi_residual,
    corrupt_second_form,
    curvature_data,
    fundamental_forms,
    gauss_residual,
)
from lieminimal.variation import first_variation_estimate, random_bumps
from lieminimal.weingarten import (
    angle_between,
    bonnet_check,
    fit_linear_weingarten,
    is_tubular,
    parallel_curvatures,
    parallel_surface,
)

from exprgen import random_expression

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

ROTATIONAL = [("cylinder", {}), ("cone", {}), ("catenoid", {}), ("torus", {}),
              ("unduloid", {"H": 0.5}), ("band", {"kappa": 1}), ("band", {"kappa": -1})]
ROTATIONAL += [("spline-profile", {"seed": s}) for s in range(5)]


def test_criterion_01_rotational_surfaces_are_critical(record):
    worst_el = worst_energy = worst_time = 0.0
    failures = []
    for name, params in ROTATIONAL:
        start = time.perf_counter()
        p = builtin_fixture(name, params)
        U, V = p.grid(64).points()
        el = el_residuals(curvature_data(p, U, V), p.length_scale).max_normalized
        energy = abs(lie_energy(p))
        elapsed = time.perf_counter() - start
        worst_el, worst_energy = max(worst_el, el), max(worst_energy, energy)
        worst_time = max(worst_time, elapsed)
        if el > 1e-9 or energy > 1e-12 or elapsed > 2.0:
            failures.append(f"{name}{params}")
    ok = record(1, not failures,
                f"{len(ROTATIONAL)} fixtures: max EL {worst_el:.2e} (<=1e-9), "
                f"max |L| {worst_energy:.2e} (<=1e-12), slowest {worst_time:.2f}s (<=2s)"
                + (f"; failing {failures}" if failures else ""))
    assert ok


def test_criterion_02_enneper_is_not_critical(record):
    p = builtin_fixture("enneper", {})
    U, V = p.grid(64).points()
    peak = float(np.max(np.abs(el_residuals(curvature_data(p, U, V)).R1)))
    rng = np.random.default_rng(2)
    u, v = rng.uniform(-1, 1, (2, 50))
    r1 = el_residuals(curvature_data(p, u, v)).R1
    pointwise = float(np.max(np.abs(r1 + 64 * u * v / (1 + u * u + v * v) ** 6)))
    ok = record(2, 2.0 <= peak <= 2.3 and pointwise <= 1e-9,
                f"max |R1| {peak:.4f} in [2.0, 2.3]; closed-form deviation {pointwise:.1e} (<=1e-9)")
    assert ok


def test_criterion_03_structure_equations(record):
    codazzi_fixtures = ROTATIONAL + [("enneper", {}), ("nodoid", {}), ("clifford", {})]
    worst_c = worst_g = 0.0
    n_gauss = 0
    for name, params in codazzi_fixtures:
        p = builtin_fixture(name, params)
        U, V = p.grid(24).points()
        r1, r2 = codazzi_residual(p, U, V, scaled=True)
        worst_c = max(worst_c, float(np.max(np.abs(r1))), float(np.max(np.abs(r2))))
        try:
            g = gauss_residual(p, U, V, scaled=True)
        except NotIsothermic:
            continue
        n_gauss += 1
        worst_g = max(worst_g, float(np.max(np.abs(g))))
    p = builtin_fixture("unduloid", {})
    U, V = p.grid(24).points()
    c1, c2 = codazzi_residual(corrupt_second_form(p, 1.1, 1.0), U, V, scaled=True)
    corrupted_c = max(float(np.max(np.abs(c1))), float(np.max(np.abs(c2))))
    corrupted_g = float(np.max(np.abs(gauss_residual(corrupt_second_form(p), U, V, scaled=True))))
    ok = record(3, worst_c <= 1e-8 and worst_g <= 1e-8 and min(corrupted_c, corrupted_g) >= 1e-3,
                f"Codazzi {worst_c:.1e} on {len(codazzi_fixtures)} fixtures, Gauss {worst_g:.1e} on "
                f"{n_gauss} isothermic ones (<=1e-8); corrupted {corrupted_c:.2e}/{corrupted_g:.2e} (>=1e-3)")
    assert ok


def test_criterion_04_bonnet(record):
    worst_angle = worst_delta = 0.0
    for name in ("unduloid", "catenoid"):
        p = builtin_fixture(name, {})
        base, rows = bonnet_check(p, [-0.3, -0.1, 0.1, 0.3], p.grid(32))
        worst_angle = max([worst_angle] + [r["angle"] for r in rows])
        worst_delta = max([worst_delta] + [abs(r["delta"] - base.delta) for r in rows])
    ok = record(4, worst_angle <= 1e-6 and worst_delta <= 1e-8,
                f"max angle {worst_angle:.1e} (<=1e-6), max |Delta^t - Delta| {worst_delta:.1e} (<=1e-8)")
    assert ok


def test_criterion_05_offset_consistency(record):
    worst = 0.0
    for name in ("catenoid", "unduloid", "torus", "cone", "cylinder"):
        p = builtin_fixture(name, {})
        U, V = p.grid(32).points()
        c = curvature_data(p, U, V)
        for t in (-0.3, -0.1, 0.1, 0.3):
            try:
                k1t, k2t = parallel_curvatures(c.k1, c.k2, t)
            except FocalDegeneracy:
                continue
            ct = curvature_data(parallel_surface(p, t), U, V)
            worst = max(worst, float(np.max(np.abs(ct.k1 - k1t))), float(np.max(np.abs(ct.k2 - k2t))))
    ok = record(5, worst <= 1e-8, f"max |k_i^t - k_i/(1 - t k_i)| {worst:.1e} (<=1e-8)")
    assert ok


def test_criterion_06_cmc_rotational(record):
    p = make_rotational(delaunay_profile(0.5, 0.6, (-1.5, 1.5)))
    U, V = p.grid(64).points()
    c = curvature_data(p, U, V)
    spread = float(np.std(c.H))
    el = el_residuals(c, p.length_scale).max_normalized
    q = builtin_fixture("enneper", {})
    Uq, Vq = q.grid(32).points()
    cq = curvature_data(q, Uq, Vq)
    enneper_h = float(np.max(np.abs(cq.H)))
    enneper_el = el_residuals(cq).max_normalized
    ok = record(6, spread <= 1e-8 and el <= 1e-9 and enneper_h <= 1e-12 and enneper_el > 1e-3,
                f"Delaunay H=0.5: std(H) {spread:.1e} (<=1e-8), EL {el:.1e} (<=1e-9); "
                f"Enneper |H| {enneper_h:.0e}, EL {enneper_el:.2f} (not critical)")
    assert ok


def _sweep(name, count=10, seed=11, amplitude=0.1):
    p = builtin_fixture(name, {})
    bumps = random_bumps(p.domain, count, seed=seed, amplitude=amplitude, radius_range=(0.3, 0.5))
    return [first_variation_estimate(p, b) for b in bumps]


def test_criterion_07_first_variation(record):
    start = time.perf_counter()
    cat, und, enn = _sweep("catenoid"), _sweep("unduloid"), _sweep("enneper")
    elapsed = time.perf_counter() - start
    scale = 0.1
    critical = max(abs(e.value) / scale for e in cat + und)
    floor = max(max(abs(e.value), e.error) / scale for e in cat)
    enn_max = max(abs(e.value) / scale for e in enn)
    # a value only counts when it also clears its own quadrature and eps error
    resolved = max(abs(e.value) / max(e.error, 1e-300) for e in enn)
    significant = max(abs(e.value) / scale for e in enn if abs(e.value) > 1e3 * e.error) \
        if any(abs(e.value) > 1e3 * e.error for e in enn) else 0.0
    ok = record(7, critical <= 1e-6 and significant >= 1e3 * floor and elapsed <= 30.0,
                f"catenoid/unduloid max {critical:.1e} (<=1e-6); Enneper raw max {enn_max:.1e} "
                f"= {enn_max / floor:.1e} x catenoid floor {floor:.1e}, but best value/error "
                f"ratio {resolved:.2e}: no Enneper value is resolved; {elapsed:.1f}s (<=30s)")
    assert ok


def test_criterion_08_separability(record):
    worst = 0.0
    for name in ("catenoid", "unduloid"):
        p = builtin_fixture(name, {})
        U, V = p.grid(64).points()
        worst = max(worst, float(np.max(np.abs(log_gap_uv(curvature_data(p, U, V))))))
    ok = record(8, worst <= 1e-9, f"max |(log|k1-k2|)_uv| {worst:.1e} (<=1e-9)")
    assert ok


def test_criterion_09_channel_round_trip(record):
    p = builtin_fixture("spline-profile", {"seed": 4})
    E, k_profile, k_rotation = channel_data(p)
    q = make_rotational(channel_to_rotational(E, k_profile, k_rotation, p.domain[1]),
                        u_domain=p.domain[0])
    U, V = p.grid(16).points()
    a, b = fundamental_forms(p, U, V).values(), fundamental_forms(q, U, V).values()
    worst = max(float(np.max(np.abs(a[k] - b[k]))) for k in "EFGLMN")
    ok = record(9, worst <= 1e-8, f"spline-profile seed 4: max form difference {worst:.1e} (<=1e-8)")
    assert ok


def test_criterion_10_weingarten_fits(record):
    p = builtin_fixture("torus", {"R": 2.0, "r": 0.5})
    U, V = p.grid(32).points()
    c = curvature_data(p, U, V)
    torus = fit_linear_weingarten(c.K, c.H)
    angle = angle_between(torus.vector, [0.25, -0.5, 1.0])
    tubular = is_tubular(torus, c.k1, c.k2)
    q = builtin_fixture("unduloid", {})
    cu = curvature_data(q, *q.grid(32).points())
    und = fit_linear_weingarten(cu.K, cu.H)
    ok = record(10, angle <= 1e-8 and abs(torus.delta) <= 1e-10 and tubular
                and und.delta > 0 and und.fit_residual <= 1e-6,
                f"torus angle to (r^2,-r,1) {angle:.1e}, Delta {torus.delta:.1e}, tubular {tubular}; "
                f"unduloid Delta {und.delta:.3f} > 0, residual {und.fit_residual:.1e} (<=1e-6)")
    assert ok


_MULTI = [(i, n - i) for n in range(5) for i in range(n + 1)]
_STEN = {0: {0: 1.0}, 1: {-1: -0.5, 1: 0.5}, 2: {-1: 1.0, 0: -2.0, 1: 1.0},
         3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5}, 4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0}}


def _fd_all(f, u, v, h=0.03):
    """Richardson-extrapolated central differences for every order <= 4 partial, batched.

    Truncation is O(h^6) and roundoff O(eps / h^4) for fourth partials, which
    balance near h = eps^(1/10), about 0.03.
    """
    offs = np.arange(-2, 3)
    steps = np.array([h, h / 2, h / 4])
    du = offs[None, :, None, None] * steps[:, None, None, None]
    dv = offs[None, None, :, None] * steps[:, None, None, None]
    vals = f(u + du, v + dv + 0 * du)
    out = {}
    for i, j in _MULTI:
        d = [sum(wa * wb * vals[s, a + 2, b + 2] for a, wa in _STEN[i].items()
                 for b, wb in _STEN[j].items()) / steps[s] ** (i + j) for s in range(3)]
        r1, r2 = (4 * d[1] - d[0]) / 3, (4 * d[2] - d[1]) / 3
        out[i, j] = (16 * r2 - r1) / 15
    return out


def test_criterion_11_jet_layer(record):
    rng = np.random.default_rng(2024)
    n_trees, n_points = 200, 50
    worst, count, bad = 0.0, 0, 0
    for _ in range(n_trees):
        f = random_expression(rng)
        u, v = rng.uniform(-0.5, 0.5, (2, n_points))
        U, V = jets.seeds(u, v)
        J = f(U, V)
        fd = _fd_all(f, u, v)
        for key, ref in fd.items():
            err = np.abs(J.partial(*key) - ref) / np.maximum(np.abs(ref), 1.0)
            worst = max(worst, float(np.max(err)))
            bad += int(np.sum(err > 1e-5))
        count += n_points
    ok = record(11, count >= 10**4 and bad == 0,
                f"{count} expression instances x {len(_MULTI)} partials: max relative error "
                f"{worst:.1e} (<=1e-5), {bad} violations")
    assert ok


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "lieminimal.cli", *args],
                          capture_output=True, text=True)


def test_criterion_12_cli(record, tmp_path):
    outs = []
    for k in range(2):
        target = tmp_path / f"r{k}.json"
        proc = _cli("analyze", str(CONFIGS / "catenoid.toml"), "--grid", "24x24", "--seed", "5",
                    "--out", str(target))
        outs.append(target.read_bytes() if proc.returncode == 0 else b"")
    same = bool(outs[0]) and outs[0] == outs[1]
    sphere = _cli("analyze", str(CONFIGS / "sphere.toml"))
    umbilic = sphere.returncode == 2 and "UmbilicPoint" in sphere.stderr
    ok = record(12, same and umbilic,
                f"byte-identical reports {same}; sphere exit code {sphere.returncode} "
                f"with diagnostic {sphere.stderr.strip()[:60]!r}")
    assert ok
