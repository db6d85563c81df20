"""Immersion patches, fundamental forms and curvature data.

A patch is an analytic map from a parameter rectangle into the ambient model of
a space form.  Every quantity is computed from jets of the immersion, so all
partial derivatives are exact up to rounding.

Normal orientation: ``n`` is chosen so that ``(X_u, X_v, n)`` (``(X_u, X_v, n,
X)`` for curved space forms) is positively oriented, then multiplied by the
patch's ``orientation`` flag.  Rotational patches set the flag so that their
curvatures follow the profile-curve formulas.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .errors import (
    DegenerateFrame,
    DegenerateMetric,
    NotCurvatureLine,
    NotIsothermic,
    UmbilicPoint,
)
from .jets import Jet2
from .spaceform import SpaceForm, inner

TOL_UMBILIC = 1e-8
TOL_CURVATURE_LINE = 1e-8
TOL_ISOTHERMIC = 1e-8


@dataclass(frozen=True)
class Grid:
    """Uniform sample grid (endpoints included) over a parameter rectangle."""

    nx: int
    ny: int
    domain: tuple

    def points(self):
        (u0, u1), (v0, v1) = self.domain
        u = np.linspace(u0, u1, self.nx)
        v = np.linspace(v0, v1, self.ny)
        return np.meshgrid(u, v, indexing="ij")

    def interior(self, margin=1e-3):
        """Same grid shrunk by a relative margin (avoids evaluating on the boundary)."""
        (u0, u1), (v0, v1) = self.domain
        du, dv = margin * (u1 - u0), margin * (v1 - v0)
        return Grid(self.nx, self.ny, ((u0 + du, u1 - du), (v0 + dv, v1 - dv)))


@dataclass(frozen=True)
class ImmersionPatch:
    """Analytic immersion evaluated as jets.

    ``evaluator(u, v, order)`` returns the four ambient components as jets
    expanded at the (broadcast) points ``u, v``.
    """

    sf: SpaceForm
    evaluator: Callable
    domain: tuple
    label: str = "patch"
    orientation: int = 1
    second_form_scale: tuple = (1.0, 1.0)
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_map(cls, func, sf, domain, label="patch", **kwargs):
        """Patch from ``func(U, V) -> 4 components`` written in jet arithmetic."""

        def evaluator(u, v, order):
            U, V = jets.seeds(u, v, order)
            return [jets.as_jet(c, order) + np.zeros(U.batch_shape) for c in func(U, V)]

        return cls(sf, evaluator, tuple(map(tuple, domain)), label, **kwargs)

    def jets(self, u, v, order=jets.DEFAULT_ORDER):
        return self.evaluator(u, v, order)

    def point(self, u, v):
        return np.array([c.coeffs[0] for c in self.jets(u, v, jets.MIN_SEED_ORDER)])

    @property
    def length_scale(self):
        (u0, u1), (v0, v1) = self.domain
        return max(u1 - u0, v1 - v0)

    def grid(self, nx=64, ny=None):
        return Grid(nx, nx if ny is None else ny, self.domain)


def swap_parameters(p):
    """The same surface with the roles of u and v exchanged (normal kept)."""
    (u0, u1), (v0, v1) = p.domain

    def evaluator(u, v, order):
        return [c.swapped() for c in p.evaluator(v, u, order)]

    return dataclasses.replace(
        p,
        evaluator=evaluator,
        domain=((v0, v1), (u0, u1)),
        label=f"{p.label}[swapped]",
        orientation=-p.orientation,
    )


def corrupt_second_form(p, scale_l=1.1, scale_n=1.1):
    """Control patch whose second fundamental form is rescaled (no longer an immersion's)."""
    return dataclasses.replace(
        p, second_form_scale=(scale_l, scale_n), label=f"{p.label}[corrupted]"
    )


@dataclass
class FundamentalForms:
    E: Jet2
    F: Jet2
    G: Jet2
    L: Jet2
    M: Jet2
    N: Jet2

    def values(self):
        return {k: getattr(self, k).coeffs[0] for k in "EFGLMN"}


@dataclass
class Frame:
    X: list
    Xu: list
    Xv: list
    n: list
    forms: FundamentalForms


def _det3(a, b, c):
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def _cross4(a, b, c):
    """w with w . y = det[a, b, y, c] for every y in R^4."""
    w = []
    for i in range(4):
        rows = [r for r in range(4) if r != i]
        minor = _det3([a[r] for r in rows], [b[r] for r in rows], [c[r] for r in rows])
        w.append(minor if i % 2 == 0 else -minor)
    return w


def _normal(p, X, Xu, Xv):
    sf = p.sf
    if sf.kappa == 0:
        a, b = Xu, Xv
        w = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
        norm2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
        w.append(0.0 * w[0])
    else:
        w = _cross4(Xu, Xv, X)
        sig = sf.signature
        w = [w[i] * sig[i] for i in range(4)]
        norm2 = inner(w, w, sf)
    if np.any(norm2.coeffs[0] <= 0):
        raise DegenerateFrame(f"{p.label}: tangent frame is degenerate")
    scale = p.orientation / jets.sqrt(norm2)
    return [c * scale for c in w]


def frame(p, u, v, order=jets.DEFAULT_ORDER):
    """Position, tangents, unit normal and both fundamental forms as jets."""
    X = p.jets(u, v, order)
    Xu = [c.diff("u") for c in X]
    Xv = [c.diff("v") for c in X]
    n = _normal(p, X, Xu, Xv)
    Xuu = [c.diff("u") for c in Xu]
    Xuv = [c.diff("v") for c in Xu]
    Xvv = [c.diff("v") for c in Xv]
    sf = p.sf
    sl, sn = p.second_form_scale
    forms = FundamentalForms(
        E=inner(Xu, Xu, sf),
        F=inner(Xu, Xv, sf),
        G=inner(Xv, Xv, sf),
        L=inner(Xuu, n, sf) * sl,
        M=inner(Xuv, n, sf) * np.sqrt(sl * sn),
        N=inner(Xvv, n, sf) * sn,
    )
    det = forms.E.coeffs[0] * forms.G.coeffs[0] - forms.F.coeffs[0] ** 2
    if np.any(det <= 0) or np.any(forms.E.coeffs[0] <= 0):
        raise DegenerateMetric(f"{p.label}: first fundamental form is degenerate")
    return Frame(X, Xu, Xv, n, forms)


def fundamental_forms(p, u, v, order=jets.DEFAULT_ORDER):
    return frame(p, u, v, order).forms


def unit_normal(p, u, v, order=jets.DEFAULT_ORDER):
    return frame(p, u, v, order).n


def misalignment(forms):
    """Per-point (|F| / sqrt(EG), principal-direction tilt) of a coordinate system.

    The tilt is ``2|M| / sqrt(EG) / |L/E - N/G|``, i.e. tan of twice the angle
    between the coordinate axes and the principal directions when F = 0.
    """
    f = forms.values()
    area = np.sqrt(f["E"] * f["G"])
    m_f = np.abs(f["F"]) / area
    ka, kb = f["L"] / f["E"], f["N"] / f["G"]
    # near umbilics the tilt is undefined; the floor leaves them to the umbilic test
    gap = np.maximum(np.abs(ka - kb), TOL_UMBILIC * (np.abs(ka) + np.abs(kb) + 1.0))
    m_m = 2 * np.abs(f["M"]) / area / gap
    return m_f, m_m


@dataclass
class CurvatureData:
    """Principal curvatures and their partials at a batch of parameter points.

    ``k1`` belongs to the u-direction and ``k2`` to the v-direction; no size
    ordering is imposed.
    """

    u: np.ndarray
    v: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    H: np.ndarray
    K: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    k1_u: np.ndarray
    k1_v: np.ndarray
    k2_u: np.ndarray
    k2_v: np.ndarray
    k1_uv: np.ndarray
    k2_uv: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    aligned: bool = True
    k1_jet: Jet2 = field(default=None, repr=False)
    k2_jet: Jet2 = field(default=None, repr=False)

    @property
    def area_element(self):
        return np.sqrt(self.E * self.G - self.F**2)


class DirectionField:
    """Continuous choice of oriented unit principal directions.

    ``ref1``/``ref2`` are parameter-space reference vectors (shape ``(2, *batch)``)
    or None for the coordinate field (``d/du``, ``d/dv``).  A principal direction
    is labelled 1 when it is the closer of the two to ``ref1`` and is oriented
    to have positive first-fundamental-form product with its reference.
    """

    def __init__(self, ref1=None, ref2=None):
        self.ref1 = ref1
        self.ref2 = ref2

    @classmethod
    def coordinate(cls):
        return cls()

    @classmethod
    def propagated(cls, e1, e2, E, F, G):
        """Sign-consistent field on a 2-D grid, walked from the (0, 0) corner.

        ``e1``, ``e2`` have shape ``(2, nx, ny)``; signs are flipped so that
        neighbouring vectors have positive metric product.
        """
        e1 = np.array(e1, dtype=float)
        e2 = np.array(e2, dtype=float)

        def dot(a, b, i, j):
            return (
                E[i, j] * a[0] * b[0]
                + F[i, j] * (a[0] * b[1] + a[1] * b[0])
                + G[i, j] * a[1] * b[1]
            )

        nx, ny = e1.shape[1:]
        for e in (e1, e2):
            for j in range(1, ny):
                if dot(e[:, 0, j], e[:, 0, j - 1], 0, j) < 0:
                    e[:, 0, j] *= -1
            for i in range(1, nx):
                for j in range(ny):
                    if dot(e[:, i, j], e[:, i - 1, j], i, j) < 0:
                        e[:, i, j] *= -1
        return cls(e1, e2)

    def refs(self, shape):
        if self.ref1 is None:
            r1 = np.zeros((2,) + shape)
            r2 = np.zeros((2,) + shape)
            r1[0] = 1.0
            r2[1] = 1.0
            return r1, r2
        return self.ref1, self.ref2


def principal_jets(forms, field=None):
    """Principal curvature and unit direction jets without assuming alignment.

    Returns ``(k1, k2, e1, e2)`` with ``e1``/``e2`` pairs of jets of parameter
    coefficients.  Raises UmbilicPoint where the discriminant H^2 - K vanishes.
    """
    field = field or DirectionField.coordinate()
    E, F, G, L, M, N = forms.E, forms.F, forms.G, forms.L, forms.M, forms.N
    D = E * G - F * F
    H = (E * N - 2.0 * F * M + G * L) / (2.0 * D)
    K = (L * N - M * M) / D
    disc = H * H - K
    scale = np.abs(H.coeffs[0]) + np.sqrt(np.abs(K.coeffs[0])) + 1.0
    if np.any(disc.coeffs[0] <= (TOL_UMBILIC * scale) ** 2):
        raise UmbilicPoint("umbilic point: H^2 - K vanishes")
    root = jets.sqrt(disc)
    shape = H.batch_shape
    ref1, ref2 = field.refs(shape)

    def eigvec(k):
        a = (M - k * F, k * E - L)
        b = (k * G - N, M - k * F)
        na = a[0].coeffs[0] ** 2 + a[1].coeffs[0] ** 2
        nb = b[0].coeffs[0] ** 2 + b[1].coeffs[0] ** 2
        x = jets.where(na >= nb, a[0], b[0])
        y = jets.where(na >= nb, a[1], b[1])
        length = jets.sqrt(E * x * x + 2.0 * F * x * y + G * y * y)
        return x / length, y / length

    def metric_dot(vec, ref):
        x, y = vec[0].coeffs[0], vec[1].coeffs[0]
        e, f, g = E.coeffs[0], F.coeffs[0], G.coeffs[0]
        return e * x * ref[0] + f * (x * ref[1] + y * ref[0]) + g * y * ref[1]

    kp, km = H + root, H - root
    vp, vm = eigvec(kp), eigvec(km)
    first_is_p = np.abs(metric_dot(vp, ref1)) >= np.abs(metric_dot(vm, ref1))
    k1 = jets.where(first_is_p, kp, km)
    k2 = jets.where(first_is_p, km, kp)
    e1 = [jets.where(first_is_p, vp[i], vm[i]) for i in range(2)]
    e2 = [jets.where(first_is_p, vm[i], vp[i]) for i in range(2)]
    s1 = np.where(metric_dot(e1, ref1) < 0, -1.0, 1.0)
    s2 = np.where(metric_dot(e2, ref2) < 0, -1.0, 1.0)
    return k1, k2, [c * s1 for c in e1], [c * s2 for c in e2]


def _umbilic_check(k1, k2, u, v, tol_umb, label):
    bad = np.abs(k1 - k2) <= tol_umb * (np.abs(k1) + np.abs(k2) + 1.0)
    if np.any(bad):
        idx = np.argwhere(np.atleast_1d(bad))[0]
        uu = np.atleast_1d(np.broadcast_to(u, np.shape(bad)))[tuple(idx)]
        vv = np.atleast_1d(np.broadcast_to(v, np.shape(bad)))[tuple(idx)]
        raise UmbilicPoint(
            f"{label}: umbilic point at (u, v) = ({uu:.6g}, {vv:.6g})", location=(uu, vv)
        )


def curvature_data(
    p,
    u,
    v,
    tol_umb=TOL_UMBILIC,
    tol_cl=TOL_CURVATURE_LINE,
    strict=True,
    order=jets.DEFAULT_ORDER,
):
    """Principal curvatures (u-direction first) and their partials.

    In curvature-line coordinates ``k1 = L/E`` and ``k2 = N/G``.  Otherwise
    NotCurvatureLine is raised, unless ``strict`` is False, in which case the
    roots of the shape operator labelled by the coordinate direction field are
    used.
    """
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    fr = frame(p, u, v, order)
    forms = fr.forms
    m_f, m_m = misalignment(forms)
    aligned = bool(np.all(m_f <= tol_cl) and np.all(m_m <= tol_cl))
    fv = forms.values()
    if aligned:
        k1 = forms.L / forms.E
        k2 = forms.N / forms.G
        e1 = np.stack([1.0 / np.sqrt(fv["E"]), np.zeros_like(fv["E"])])
        e2 = np.stack([np.zeros_like(fv["G"]), 1.0 / np.sqrt(fv["G"])])
    elif strict:
        worst = float(max(np.max(m_f), np.max(m_m)))
        raise NotCurvatureLine(
            f"{p.label}: coordinates are not curvature-line (misalignment {worst:.3g})"
        )
    else:
        k1, k2, j1, j2 = principal_jets(forms)
        e1 = np.stack([c.coeffs[0] for c in j1])
        e2 = np.stack([c.coeffs[0] for c in j2])
    k1v, k2v = k1.coeffs[0], k2.coeffs[0]
    _umbilic_check(k1v, k2v, u, v, tol_umb, p.label)
    return CurvatureData(
        u=u,
        v=v,
        k1=k1v,
        k2=k2v,
        H=0.5 * (k1v + k2v),
        K=k1v * k2v,
        e1=e1,
        e2=e2,
        k1_u=k1.partial(1, 0),
        k1_v=k1.partial(0, 1),
        k2_u=k2.partial(1, 0),
        k2_v=k2.partial(0, 1),
        k1_uv=k1.partial(1, 1),
        k2_uv=k2.partial(1, 1),
        E=fv["E"],
        F=fv["F"],
        G=fv["G"],
        aligned=aligned,
        k1_jet=k1,
        k2_jet=k2,
    )


def check_coordinates(p, grid, tol=TOL_CURVATURE_LINE):
    """Classify the coordinate regime of a patch on a grid."""
    U, V = grid.points()
    forms = fundamental_forms(p, U, V)
    m_f, m_m = misalignment(forms)
    fv = forms.values()
    conf = np.abs(fv["E"] - fv["G"]) / fv["E"]
    max_f, max_m, max_conf = float(np.max(m_f)), float(np.max(m_m)), float(np.max(conf))
    curvature_line = max(max_f, max_m) <= tol
    return {
        "curvature_line": bool(curvature_line),
        "isothermic": bool(curvature_line and max_conf <= tol),
        "max_F": max_f,
        "max_M": max_m,
        "max_conf_defect": max_conf,
    }


def _aligned_curvatures(p, u, v, order=jets.DEFAULT_ORDER):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    forms = fundamental_forms(p, u, v, order)
    m_f, m_m = misalignment(forms)
    if np.any(m_f > TOL_CURVATURE_LINE) or np.any(m_m > TOL_CURVATURE_LINE):
        raise NotCurvatureLine(f"{p.label}: structure equations need curvature-line coordinates")
    k1 = forms.L / forms.E
    k2 = forms.N / forms.G
    _umbilic_check(k1.coeffs[0], k2.coeffs[0], u, v, TOL_UMBILIC, p.label)
    return forms, k1, k2


def codazzi_residual(p, u, v, scaled=False):
    """Residuals of both Codazzi equations in curvature-line coordinates.

    ``r1 = k1_v/(k2-k1) - (log sqrt E)_v``, ``r2 = k2_u/(k1-k2) - (log sqrt G)_u``.
    With ``scaled`` each residual is divided by the sum of the magnitudes of its
    two terms plus 1/length_scale.
    """
    forms, k1, k2 = _aligned_curvatures(p, u, v)
    t1 = k1.partial(0, 1) / (k2.coeffs[0] - k1.coeffs[0])
    s1 = 0.5 * forms.E.partial(0, 1) / forms.E.coeffs[0]
    t2 = k2.partial(1, 0) / (k1.coeffs[0] - k2.coeffs[0])
    s2 = 0.5 * forms.G.partial(1, 0) / forms.G.coeffs[0]
    r1, r2 = t1 - s1, t2 - s2
    if scaled:
        floor = 1.0 / p.length_scale
        r1 = r1 / (np.abs(t1) + np.abs(s1) + floor)
        r2 = r2 / (np.abs(t2) + np.abs(s2) + floor)
    return r1, r2


def gauss_residual(p, u, v, scaled=False, tol_iso=TOL_ISOTHERMIC):
    """Residual of sigma_uu + sigma_vv + (kappa + K) e^(2 sigma) in isothermic coordinates."""
    forms, k1, k2 = _aligned_curvatures(p, u, v)
    E, G = forms.E.coeffs[0], forms.G.coeffs[0]
    if np.any(np.abs(E - G) > tol_iso * E):
        raise NotIsothermic(f"{p.label}: coordinates are not conformal (E != G)")
    sigma = 0.5 * jets.log(forms.E)
    lap = sigma.partial(2, 0) + sigma.partial(0, 2)
    K = k1.coeffs[0] * k2.coeffs[0]
    curv = (p.sf.kappa + K) * E
    res = lap + curv
    if scaled:
        res = res / (
            np.abs(sigma.partial(2, 0)) + np.abs(sigma.partial(0, 2)) + np.abs(curv)
            + 1.0 / p.length_scale**2
        )
    return res
