"""Linear and affine Weingarten relations, tubularity and parallel surfaces.

A linear Weingarten relation is ``a K + 2 b H + c = 0`` and an affine one is
``x k1 + y k2 + z = 0``.  Both are fitted by total least squares.  Parallel
surfaces are restricted to Euclidean space.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import FocalDegeneracy, SpaceFormError
from .surface import curvature_data, frame

FIT_TOL = 1e-6
FOCAL_TOL = 1e-6


def _normalize(vec):
    vec = np.asarray(vec, dtype=float)
    vec = vec / np.linalg.norm(vec)
    for x in vec:
        if abs(x) > 1e-12:
            return (vec if x > 0 else -vec) + 0.0
    return vec + 0.0


def _tls(columns, tol):
    A = np.column_stack([np.ravel(c) for c in columns])
    n = A.shape[0]
    if n < 3:
        raise ValueError("need at least 3 samples")
    _, s, vt = np.linalg.svd(A, full_matrices=False)
    residuals = s / np.sqrt(n)
    null_dim = int(np.sum(residuals <= tol))
    return _normalize(vt[-1]), float(residuals[-1]), null_dim, n


@dataclass
class LinearWeingartenFit:
    a: float
    b: float
    c: float
    fit_residual: float
    null_dim: int
    n_samples: int
    tol: float = FIT_TOL

    @property
    def vector(self):
        return np.array([self.a, self.b, self.c])

    @property
    def delta(self):
        return self.b**2 - self.a * self.c

    @property
    def holds(self):
        return self.fit_residual <= self.tol

    @property
    def elliptic(self):
        return self.delta > 0

    @property
    def unique(self):
        return self.null_dim <= 1


@dataclass
class AffineWeingartenFit:
    x: float
    y: float
    z: float
    fit_residual: float
    null_dim: int
    n_samples: int
    tol: float = FIT_TOL

    @property
    def vector(self):
        return np.array([self.x, self.y, self.z])

    @property
    def holds(self):
        return self.fit_residual <= self.tol


def fit_linear_weingarten(K, H, tol=FIT_TOL):
    """Fit ``a K + 2 b H + c = 0`` to samples.

    ``null_dim`` counts singular values below ``tol`` (after dividing by
    sqrt(n)); values above 1 mean several independent relations hold.
    """
    K = np.ravel(K)
    vec, res, null_dim, n = _tls([K, 2.0 * np.ravel(H), np.ones_like(K)], tol)
    return LinearWeingartenFit(*map(float, vec), res, null_dim, n, tol)


def fit_affine_weingarten(k1, k2, tol=FIT_TOL):
    k1 = np.ravel(k1)
    vec, res, null_dim, n = _tls([k1, np.ravel(k2), np.ones_like(k1)], tol)
    return AffineWeingartenFit(*map(float, vec), res, null_dim, n, tol)


def is_tubular(fit, k1, k2, tol=FIT_TOL):
    """Delta = 0, or one principal curvature constant over the samples."""
    k1, k2 = np.ravel(k1), np.ravel(k2)
    scale = float(np.mean(np.abs(k1) + np.abs(k2))) or 1.0
    return bool(
        abs(fit.delta) <= tol or np.std(k1) <= tol * scale or np.std(k2) <= tol * scale
    )


def angle_between(a, b):
    """Angle between two coefficient vectors as lines (sign ignored)."""
    a = np.asarray(a, dtype=float) / np.linalg.norm(a)
    b = np.asarray(b, dtype=float) / np.linalg.norm(b)
    return float(np.arctan2(np.linalg.norm(np.cross(a, b)), abs(np.dot(a, b))))


def parallel_curvatures(k1, k2, t):
    d1, d2 = 1.0 - t * np.asarray(k1), 1.0 - t * np.asarray(k2)
    if np.any(np.abs(d1) <= FOCAL_TOL) or np.any(np.abs(d2) <= FOCAL_TOL):
        raise FocalDegeneracy(f"offset t={t} reaches a focal point")
    return k1 / d1, k2 / d2


def bonnet_coeffs(a, b, c, t):
    """Coefficients of the linear Weingarten relation of the parallel surface at distance t."""
    return a + 2 * b * t + c * t * t, b + c * t, c


def parallel_surface(p, t):
    """Offset ``X + t n`` of a Euclidean patch, evaluated in jets.

    The base patch is expanded one order higher so the offset keeps the
    requested order.
    """
    if p.sf.kappa != 0:
        raise SpaceFormError("parallel surfaces are only supported in Euclidean space")
    t = float(t)
    if t == 0.0:
        return p

    def evaluator(u, v, order):
        fr = frame(p, u, v, order + 1)
        fv = fr.forms.values()
        D = fv["E"] * fv["G"] - fv["F"] ** 2
        H = (fv["E"] * fv["N"] - 2 * fv["F"] * fv["M"] + fv["G"] * fv["L"]) / (2 * D)
        K = (fv["L"] * fv["N"] - fv["M"] ** 2) / D
        root = np.sqrt(np.maximum(H * H - K, 0.0))
        parallel_curvatures(H + root, H - root, t)
        return [fr.X[i].truncate(order) + t * fr.n[i] for i in range(4)]

    return dataclasses.replace(
        p,
        evaluator=evaluator,
        label=f"{p.label}[t={t:g}]",
        meta={**p.meta, "offset": t},
    )


def cmc_offset(k1, k2, bracket=(-1.0, 1.0)):
    """Offset distance minimizing the spread of the parallel mean curvature.

    Returns ``(t, stddev)``.  Offsets hitting focal points inside the bracket
    are penalized.
    """
    k1, k2 = np.ravel(k1), np.ravel(k2)

    def spread(t):
        d1, d2 = 1.0 - t * k1, 1.0 - t * k2
        if np.any(np.abs(d1) <= FOCAL_TOL) or np.any(np.abs(d2) <= FOCAL_TOL):
            return np.inf
        h = 0.5 * (k1 / d1 + k2 / d2)
        return float(np.std(h))

    res = minimize_scalar(spread, bounds=bracket, method="bounded",
                          options={"xatol": 1e-12, "maxiter": 500})
    return float(res.x), float(res.fun)


def bonnet_check(p, t_values, grid, tol_angle=1e-6, tol_delta=1e-8, fit_tol=FIT_TOL):
    """Refit the linear Weingarten relation on offsets and compare with the prediction."""
    U, V = grid.points()
    c = curvature_data(p, U, V)
    base = fit_linear_weingarten(c.K, c.H, fit_tol)
    rows = []
    for t in t_values:
        q = parallel_surface(p, t)
        ct = curvature_data(q, U, V)
        fit = fit_linear_weingarten(ct.K, ct.H, fit_tol)
        predicted = np.array(bonnet_coeffs(*base.vector, t))
        angle = angle_between(fit.vector, predicted)
        # Delta is quadratic in the triple: compare at the scale of the prediction
        scale = np.dot(fit.vector, predicted)
        delta_t = scale**2 * fit.delta
        rows.append({
            "t": float(t),
            "fit": [fit.a, fit.b, fit.c],
            "predicted": [float(x) for x in _normalize(predicted)],
            "angle": angle,
            "delta": float(delta_t),
            "delta_base": base.delta,
            "fit_residual": fit.fit_residual,
            "ok": bool(angle <= tol_angle and abs(delta_t - base.delta) <= tol_delta),
        })
    return base, rows

