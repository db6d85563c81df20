"""The three Riemannian space forms as quadrics in a 4-dimensional ambient space.

Points and vectors are 4-sequences whose entries may be floats, numpy arrays or
jets.  Euclidean space is the affine slice ``x4 = 1``; the 3-sphere is
``<p, p> = 1`` in Euclidean R^4; hyperbolic space is the upper sheet of
``<p, p> = -1`` in Minkowski R^(3,1) with signature (+, +, +, -).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import SpaceFormError

TOL_TANGENT = 1e-9


@dataclass(frozen=True)
class SpaceForm:
    kappa: int = 0

    def __post_init__(self):
        if self.kappa not in (-1, 0, 1):
            raise ValueError(f"kappa must be -1, 0 or 1, got {self.kappa!r}")

    @property
    def signature(self):
        return (1.0, 1.0, 1.0, -1.0) if self.kappa == -1 else (1.0, 1.0, 1.0, 1.0)

    @property
    def name(self):
        return {0: "R3", 1: "S3", -1: "H3"}[self.kappa]

    def inner(self, a, b):
        return inner(a, b, self)


EUCLIDEAN = SpaceForm(0)
SPHERE = SpaceForm(1)
HYPERBOLIC = SpaceForm(-1)


def inner(a, b, sf):
    """Signature-aware inner product of two ambient vectors."""
    s = sf.signature
    total = a[0] * b[0]
    for i in range(1, 4):
        if s[i] > 0:
            total = total + a[i] * b[i]
        else:
            total = total - a[i] * b[i]
    return total


def quadric_residual(p, sf):
    """Zero iff ``p`` lies on the model quadric of ``sf``."""
    if sf.kappa == 0:
        return p[3] - 1.0
    return inner(p, p, sf) - 1.0 / sf.kappa


def exp_normal(p, n, t, sf, check=True):
    """Point at geodesic distance ``t`` from ``p`` in the unit tangent direction ``n``."""
    if check:
        _check_unit_tangent(p, n, sf)
    if sf.kappa == 0:
        return [p[i] + t * n[i] for i in range(4)]
    if sf.kappa == 1:
        c, s = jets.cos(t), jets.sin(t)
    else:
        c, s = jets.cosh(t), jets.sinh(t)
    return [c * p[i] + s * n[i] for i in range(4)]


def _value(x):
    return x.coeffs[0] if isinstance(x, jets.Jet2) else np.asarray(x, dtype=float)


def _check_unit_tangent(p, n, sf):
    pv = [_value(x) for x in p]
    nv = [_value(x) for x in n]
    norm = inner(nv, nv, sf)
    if np.any(np.abs(norm - 1.0) > TOL_TANGENT):
        raise SpaceFormError("offset direction is not a unit vector")
    if sf.kappa == 0:
        tangent = np.abs(nv[3])
    else:
        tangent = np.abs(inner(pv, nv, sf))
    if np.any(tangent > TOL_TANGENT):
        raise SpaceFormError("offset direction is not tangent to the space form")
