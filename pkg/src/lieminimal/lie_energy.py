"""The Lie functional, its Euler-Lagrange residuals and related diagnostics.

The functional of a patch in curvature-line coordinates is

    L = integral of k1_u * k2_v / (k1 - k2)^2 du dv,

and its critical points are characterized by the residuals

    R1 = (k2 - k1) k1_uv + 2 k1_u k1_v,    R2 = (k1 - k2) k2_uv + 2 k2_u k2_v.

For coordinates that are not curvature-line (perturbed patches) the same
integrand is written against the area measure as
``dk1(e1) dk2(e2) / (k1 - k2)^2`` with unit principal directions e1, e2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .surface import DirectionField, curvature_data, frame, principal_jets


@dataclass
class ELResiduals:
    R1: np.ndarray
    R2: np.ndarray
    R1_normalized: np.ndarray
    R2_normalized: np.ndarray

    @property
    def max_normalized(self):
        return float(max(np.max(np.abs(self.R1_normalized)), np.max(np.abs(self.R2_normalized))))

    @property
    def mean_normalized(self):
        return float(0.5 * (np.mean(np.abs(self.R1_normalized)) + np.mean(np.abs(self.R2_normalized))))

    @property
    def max_raw(self):
        return float(max(np.max(np.abs(self.R1)), np.max(np.abs(self.R2))))


def el_residuals(c, length_scale=1.0):
    """Euler-Lagrange residuals of curvature data, raw and scale-normalized."""
    r1 = (c.k2 - c.k1) * c.k1_uv + 2.0 * c.k1_u * c.k1_v
    r2 = (c.k1 - c.k2) * c.k2_uv + 2.0 * c.k2_u * c.k2_v
    scale = (np.abs(c.k1) + np.abs(c.k2) + 1.0 / length_scale) ** 3
    return ELResiduals(r1, r2, r1 / scale, r2 / scale)


def gauss_legendre(domain, nx=32, ny=None):
    """Tensor Gauss-Legendre nodes ``(U, V)`` and weights ``W`` on a rectangle."""
    ny = nx if ny is None else ny
    (u0, u1), (v0, v1) = domain
    xu, wu = np.polynomial.legendre.leggauss(nx)
    xv, wv = np.polynomial.legendre.leggauss(ny)
    u = 0.5 * (u1 - u0) * xu + 0.5 * (u1 + u0)
    v = 0.5 * (v1 - v0) * xv + 0.5 * (v1 + v0)
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv) * 0.25 * (u1 - u0) * (v1 - v0)
    return U, V, W


def coordinate_integrand(c):
    return c.k1_u * c.k2_v / (c.k1 - c.k2) ** 2


def lie_energy(p, grid=None, nodes=32, domain=None):
    """Lie energy of a curvature-line patch by tensor Gauss-Legendre quadrature.

    With a Grid, its ``nx``/``ny`` are the node counts per axis and its domain
    the integration rectangle; otherwise ``nodes`` points per axis over
    ``domain`` (default: the patch domain) are used.
    """
    if grid is not None:
        nx, ny, domain = grid.nx, grid.ny, grid.domain
    else:
        nx = ny = nodes
        domain = domain or p.domain
    (u0, u1), (v0, v1) = domain
    if u1 <= u0 or v1 <= v0:
        return 0.0
    U, V, W = gauss_legendre(domain, nx, ny)
    c = curvature_data(p, U, V)
    return float(np.sum(W * coordinate_integrand(c)))


def _density_jets(p, u, v, field=None, order=jets.DEFAULT_ORDER):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    forms = frame(p, u, v, order).forms
    k1, k2, e1, e2 = principal_jets(forms, field)
    d1 = e1[0].value * k1.partial(1, 0) + e1[1].value * k1.partial(0, 1)
    d2 = e2[0].value * k2.partial(1, 0) + e2[1].value * k2.partial(0, 1)
    fv = forms.values()
    area = np.sqrt(fv["E"] * fv["G"] - fv["F"] ** 2)
    return d1 * d2 / (k1.value - k2.value) ** 2, area


def invariant_density(p, u, v, orientation=None):
    """``dk1(e1) dk2(e2) / (k1 - k2)^2``, a density against the area measure.

    ``orientation`` is a DirectionField fixing labels and signs of e1, e2
    (default: the coordinate field, e1 nearest to d/du).
    """
    return _density_jets(p, u, v, orientation)[0]


def invariant_energy(p, domain=None, nodes=32, orientation=None):
    """Lie energy through the invariant density; valid in any coordinates."""
    domain = domain or p.domain
    U, V, W = gauss_legendre(domain, nodes)
    dens, area = _density_jets(p, U, V, orientation)
    return float(np.sum(W * dens * area))


def is_channel(p, grid, tol=1e-8):
    """Whether one principal curvature is constant along its own direction.

    Derivatives are taken along unit principal directions (``k1_u / sqrt(E)``)
    and compared with ``(|k1| + |k2| + 1/l)^2``.
    """
    U, V = grid.points()
    c = curvature_data(p, U, V)
    scale = (np.abs(c.k1) + np.abs(c.k2) + 1.0 / p.length_scale) ** 2
    d1 = float(np.max(np.abs(c.k1_u) / np.sqrt(c.E) / scale))
    d2 = float(np.max(np.abs(c.k2_v) / np.sqrt(c.G) / scale))
    if d1 <= tol:
        which = "k1-along-u"
    elif d2 <= tol:
        which = "k2-along-v"
    else:
        which = "none"
    return {"channel": which != "none", "which": which, "max_k1_u": d1, "max_k2_v": d2}


def log_gap_uv(c):
    """Mixed partial of log|k1 - k2| from the curvature jets."""
    gap = c.k1_jet - c.k2_jet
    return jets.log(gap * np.sign(gap.value)).partial(1, 1)


def log_gap_residual(c):
    """``(log|k1 - k2|)_uv - 4 H_u H_v / (k1 - k2)^2``.

    Vanishes wherever both Euler-Lagrange equations hold.
    """
    h_u = 0.5 * (c.k1_u + c.k2_u)
    h_v = 0.5 * (c.k1_v + c.k2_v)
    return log_gap_uv(c) - 4.0 * h_u * h_v / (c.k1 - c.k2) ** 2
