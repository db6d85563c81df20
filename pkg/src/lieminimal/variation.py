"""Compactly supported normal variations and the first variation of the Lie energy."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import SupportError, UmbilicPoint
from .lie_energy import _density_jets, gauss_legendre
from .spaceform import exp_normal
from .surface import DirectionField, frame, principal_jets

DENSITY_ORDER = 3


@dataclass(frozen=True)
class BumpFunction:
    """Mollifier ``A e exp(-1/(1 - s^2))`` on the ellipse ``s < 1``, zero outside.

    ``s^2 = ((u - u0)/ru)^2 + ((v - v0)/rv)^2``; the peak value is ``A``.
    """

    center: tuple
    radii: tuple
    amplitude: float = 1.0

    @property
    def support(self):
        (u0, v0), (ru, rv) = self.center, self.radii
        return ((u0 - ru, u0 + ru), (v0 - rv, v0 + rv))

    def jet(self, u, v, order=jets.DEFAULT_ORDER):
        U, V = jets.seeds(u, v, max(order, jets.MIN_SEED_ORDER))
        (u0, v0), (ru, rv) = self.center, self.radii
        s2 = ((U - u0) / ru) ** 2 + ((V - v0) / rv) ** 2
        inside = s2.value < 1.0
        safe = jets.where(inside, s2, 0.0 * s2)
        body = self.amplitude * math.e * jets.exp(-1.0 / (1.0 - safe))
        out = jets.where(inside, body, 0.0 * body)
        return out.truncate(order) if order < out.order else out

    def __call__(self, u, v):
        return self.jet(u, v, jets.MIN_SEED_ORDER).value


def bump(center, radii, amplitude=1.0, domain=None):
    """Bump function; with ``domain`` its support must stay inside the open rectangle."""
    ru, rv = map(float, radii)
    if ru <= 0 or rv <= 0:
        raise ValueError("bump radii must be positive")
    b = BumpFunction(tuple(map(float, center)), (ru, rv), float(amplitude))
    if domain is not None:
        (su0, su1), (sv0, sv1) = b.support
        (u0, u1), (v0, v1) = domain
        if su0 <= u0 or su1 >= u1 or sv0 <= v0 or sv1 >= v1:
            raise SupportError(f"bump support {b.support} touches the domain boundary {domain}")
    return b


def random_bumps(domain, count, seed=0, amplitude=1.0, radius_range=(0.15, 0.3)):
    """Seeded bumps with supports inside ``domain`` (radii relative to the domain sides)."""
    rng = np.random.default_rng(seed)
    (u0, u1), (v0, v1) = domain
    lu, lv = u1 - u0, v1 - v0
    out = []
    for _ in range(count):
        ru = rng.uniform(*radius_range) * lu / 2
        rv = rng.uniform(*radius_range) * lv / 2
        cu = rng.uniform(u0 + ru + 0.05 * lu, u1 - ru - 0.05 * lu)
        cv = rng.uniform(v0 + rv + 0.05 * lv, v1 - rv - 0.05 * lv)
        out.append(bump((cu, cv), (ru, rv), amplitude, domain))
    return out


def perturb_normal(p, phi, eps):
    """Patch ``exp_X(eps * phi * n)``; stays on the model quadric for curved space forms."""
    eps = float(eps)
    if eps == 0.0:
        return p

    def evaluator(u, v, order):
        fr = frame(p, u, v, order + 1)
        X = [c.truncate(order) for c in fr.X]
        uu, vv = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        t = eps * phi.jet(uu, vv, order)
        return exp_normal(X, fr.n, t, p.sf, check=False)

    return dataclasses.replace(
        p, evaluator=evaluator, label=f"{p.label}[eps={eps:g}]", meta={**p.meta, "perturbed": True}
    )


class _Nodes:
    """Base-patch data at the quadrature nodes inside a bump support, shared by all eps."""

    def __init__(self, p, phi, nodes):
        U, V, W = gauss_legendre(phi.support, nodes)
        (u0, v0), (ru, rv) = phi.center, phi.radii
        inside = ((U - u0) / ru) ** 2 + ((V - v0) / rv) ** 2 < 1.0
        # outside the support the perturbed energies coincide and cancel exactly
        self.u, self.v, self.w = U[inside], V[inside], W[inside]
        self.patch = p
        fr = frame(p, self.u, self.v, DENSITY_ORDER + 1)
        self.X = [c.truncate(DENSITY_ORDER) for c in fr.X]
        self.n = fr.n
        self.phi = phi.jet(self.u, self.v, DENSITY_ORDER)
        # label and orient the perturbed principal directions by those of the base
        _, _, e1, e2 = principal_jets(fr.forms)
        self.field = DirectionField(np.stack([c.value for c in e1]), np.stack([c.value for c in e2]))

    def energy(self, eps):
        X = exp_normal(self.X, self.n, eps * self.phi, self.patch.sf, check=False)
        q = dataclasses.replace(self.patch, evaluator=lambda u, v, order: X)
        try:
            dens, area = _density_jets(q, self.u, self.v, self.field, DENSITY_ORDER)
        except UmbilicPoint as exc:
            raise UmbilicPoint(f"{self.patch.label}: perturbation created an umbilic ({exc})") from exc
        return float(np.sum(self.w * dens * area))

    def derivative(self, eps):
        return (self.energy(eps) - self.energy(-eps)) / (2.0 * eps)


def first_variation(p, phi, grid=None, eps=1e-4, nodes=48):
    """Central difference of the Lie energy along the normal variation ``eps * phi``.

    Energies are evaluated through the invariant density at Gauss-Legendre
    nodes over the bump's support (the energies agree elsewhere); ``grid.nx``
    sets the node count per axis when a Grid is given.
    """
    if grid is not None:
        nodes = grid.nx
    return _Nodes(p, phi, nodes).derivative(eps)


@dataclass
class VariationEstimate:
    value: float
    quadrature_error: float
    eps_error: float
    nodes: int

    @property
    def error(self):
        return self.quadrature_error + self.eps_error


def first_variation_estimate(p, phi, eps=1e-4, nodes=32, max_nodes=128, rtol=1e-4, atol=1e-13):
    """First variation with node doubling until two refinements agree.

    The quadrature error is the change under the last doubling; the eps error
    is the Richardson estimate ``|D(2 eps) - D(eps)| / 3`` at the final nodes.
    """
    prev = _Nodes(p, phi, nodes).derivative(eps)
    while True:
        nodes *= 2
        data = _Nodes(p, phi, nodes)
        value = data.derivative(eps)
        quad = abs(value - prev)
        if quad <= atol + rtol * abs(value) or nodes >= max_nodes:
            break
        prev = value
    eps_err = abs(data.derivative(2 * eps) - value) / 3.0
    return VariationEstimate(value, quad, eps_err, nodes)
