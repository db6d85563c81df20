"""Rotational surfaces: profile curves, closed-form curvatures, Delaunay profiles
and reconstruction of a surface of revolution from channel data.

Convention: the rotation parameter is ``u`` and the profile parameter is ``v``;
``X(u, v) = rho(u) (r(v), 0, h(v), k(v))`` with ``rho(u)`` rotating the first
two ambient coordinates.  A profile is *isothermic* when ``|gamma'|^2 = r^2``,
which makes the rotational coordinates isothermic (``E = G = r^2``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import make_interp_spline

from . import jets
from .errors import CodazziViolation, ProfileError
from .jets import Jet2
from .spaceform import SpaceForm
from .surface import ImmersionPatch, curvature_data, fundamental_forms

TOL_NORMALIZATION = 1e-8


def _univariate(jet, order):
    """Taylor coefficients in v of a jet seeded in v alone."""
    return np.stack([jet.coeff(0, n) * np.ones(jet.batch_shape) for n in range(order + 1)])


def _jet_function_taylor(fn):
    """Turn ``fn(V: Jet2) -> Jet2`` into ``taylor(v, order) -> (order+1, *batch)``."""

    def taylor(v, order):
        V = jets.seed(np.asarray(v, dtype=float), "v", max(order, jets.MIN_SEED_ORDER))
        return _univariate(jets.as_jet(fn(V), V.order), order)

    return taylor


def _spline_taylor(spl):
    def taylor(v, order):
        v = np.asarray(v, dtype=float)
        return np.stack(
            [spl(v, nu=n) / math.factorial(n) if n <= spl.k else np.zeros_like(v)
             for n in range(order + 1)]
        )

    return taylor


def _integrate_taylor(rate, value):
    """Taylor series of an antiderivative from its rate series and value."""
    out = np.empty((rate.shape[0] + 1,) + rate.shape[1:])
    out[0] = value
    for n in range(rate.shape[0]):
        out[n + 1] = rate[n] / (n + 1)
    return out


class _Antiderivative:
    """Cumulative Gauss-Legendre integral of a smooth rate over an interval."""

    def __init__(self, rate, span, cell=0.05, nodes=20):
        a, b = span
        ncell = max(1, int(math.ceil((b - a) / cell)))
        self.edges = np.linspace(a, b, ncell + 1)
        self.rate = rate
        self.x, self.w = np.polynomial.legendre.leggauss(nodes)
        pieces = [self._segment(self.edges[i], self.edges[i + 1]) for i in range(ncell)]
        self.cum = np.concatenate([[0.0], np.cumsum(np.array(pieces, dtype=float).ravel())])

    def _segment(self, lo, hi):
        lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
        pts = mid[..., None] + half[..., None] * self.x
        return half * np.sum(self.rate(pts) * self.w, axis=-1)

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        idx = np.clip(np.searchsorted(self.edges, v) - 1, 0, len(self.edges) - 2)
        return self.cum[idx] + self._segment(self.edges[idx], v)


@dataclass(frozen=True)
class ProfileCurve:
    """Generating curve ``(r, h, k)`` of a rotational surface.

    ``taylor(v, order)`` returns univariate Taylor coefficients of shape
    ``(3, order + 1, *v.shape)`` for ``r, h, k`` about every ``v``.
    """

    taylor: Callable
    domain: tuple
    kappa: int = 0
    isothermic: bool = False
    label: str = "profile"
    meta: dict = field(default_factory=dict, compare=False)

    def coefficients(self, v, order):
        """``taylor`` evaluated once per distinct parameter value."""
        v = np.asarray(v, dtype=float)
        vals, inverse = np.unique(v, return_inverse=True)
        return self.taylor(vals, order)[:, :, inverse.reshape(v.shape)]

    def jets(self, V):
        """Compose the profile with a jet ``V`` (expansion points = V's values)."""
        t = self.coefficients(V.coeffs[0], V.order)
        return [jets.compose(t[i], V) for i in range(3)]

    def values(self, v):
        return self.coefficients(v, 0)[:, 0]

    def derivatives(self, v, n=2):
        """Array ``(3, n + 1, ...)`` of r, h, k and their first n derivatives."""
        t = self.coefficients(v, max(n, 1))[:, : n + 1]
        fact = np.array([math.factorial(i) for i in range(n + 1)], dtype=float)
        return t * fact.reshape((1, n + 1) + (1,) * (t.ndim - 2))

    def sample(self, n=200):
        v = np.linspace(*self.domain, n)
        r, h, k = self.values(v)
        return v, r, h, k

    def check_radius(self, n=257):
        v = np.linspace(*self.domain, n)
        r = self.values(v)[0]
        if np.any(r <= 0) or not np.all(np.isfinite(r)):
            raise ProfileError(f"{self.label}: r <= 0 on the profile domain")


def profile_from_functions(r, h, k=None, domain=(0.0, 1.0), kappa=0, isothermic=False,
                           label="profile"):
    """Analytic profile from jet-arithmetic callables of the profile parameter."""
    fk = k if k is not None else (lambda V: 1.0 + 0.0 * V)
    fns = [_jet_function_taylor(f) for f in (r, h, fk)]

    def taylor(v, order):
        return np.stack([f(v, order) for f in fns])

    return ProfileCurve(taylor, tuple(domain), kappa, isothermic, label)


def profile_from_samples(v, r, h, label="sampled"):
    """Quintic interpolation of sampled ``(v, r, h)`` data (flat ambient space)."""
    v = np.asarray(v, dtype=float)
    sr = make_interp_spline(v, np.asarray(r, dtype=float), k=5)
    sh = make_interp_spline(v, np.asarray(h, dtype=float), k=5)
    tr, th = _spline_taylor(sr), _spline_taylor(sh)

    def taylor(vv, order):
        one = np.zeros((order + 1,) + np.shape(vv))
        one[0] = 1.0
        return np.stack([tr(vv, order), th(vv, order), one])

    prof = ProfileCurve(taylor, (float(v[0]), float(v[-1])), 0, False, label)
    prof.check_radius()
    return prof


def isothermic_profile(log_radius, r0=1.0, kappa=0, domain=(0.0, 1.0), label="isothermic"):
    """Isothermic profile whose radius is ``r0 * exp(q(v))``.

    ``log_radius(v, order)`` returns Taylor coefficients of q.  The remaining
    coordinates solve ``|gamma'|^2 = r^2``: for kappa = 0, ``h' = r sqrt(1 - q'^2)``;
    for kappa = +-1 the profile is ``(r, rho cos t, rho sin t)`` (resp.
    ``(r, rho sinh t, rho cosh t)``) with ``rho = sqrt(1 - kappa r^2)`` and
    ``t' = sqrt(r^2 - r'^2 / rho^2) / rho``.
    """

    def rate_jet(v, order):
        """Jets (r, rho, rate) of the free coordinate's derivative, seeded in v."""
        V = jets.seed(np.asarray(v, dtype=float), "v", max(order, jets.MIN_SEED_ORDER))
        q_t = log_radius(V.coeffs[0], V.order + 1)
        q = jets.compose(q_t, V)
        dq = jets.compose(np.stack([(n + 1) * q_t[n + 1] for n in range(V.order + 1)]), V)
        r = r0 * jets.exp(q)
        if kappa == 0:
            arg = 1.0 - dq * dq
            if np.any(arg.coeffs[0] <= 0):
                raise ProfileError(f"{label}: |q'| >= 1, no isothermic profile exists")
            return r, None, r * jets.sqrt(arg)
        rho2 = 1.0 - kappa * r * r
        if np.any(rho2.coeffs[0] <= 0):
            raise ProfileError(f"{label}: radius leaves the space-form chart")
        rho = jets.sqrt(rho2)
        arg = r * r - (r * dq) * (r * dq) / rho2
        if np.any(arg.coeffs[0] <= 0):
            raise ProfileError(f"{label}: profile too steep for an isothermic normalization")
        return r, rho, jets.sqrt(arg) / rho

    def rate_values(v):
        shape = np.shape(v)
        return rate_jet(np.ravel(v), 0)[2].coeffs[0].reshape(shape)

    antider = _Antiderivative(rate_values, domain)

    def taylor(v, order):
        v = np.asarray(v, dtype=float)
        r, rho, rate = rate_jet(v, order)
        free = _integrate_taylor(_univariate(rate, order - 1) if order else
                                 np.zeros((0,) + v.shape), antider(v))
        if kappa == 0:
            one = np.zeros((order + 1,) + v.shape)
            one[0] = 1.0
            return np.stack([_univariate(r, order), free, one])
        V = jets.seed(v, "v", max(order, jets.MIN_SEED_ORDER))
        t = jets.compose(np.concatenate([free, np.zeros((V.order - order,) + v.shape)]), V)
        if kappa == 1:
            h, k = rho * jets.cos(t), rho * jets.sin(t)
        else:
            h, k = rho * jets.sinh(t), rho * jets.cosh(t)
        return np.stack([_univariate(r, order), _univariate(h, order), _univariate(k, order)])

    prof = ProfileCurve(taylor, tuple(domain), kappa, True, label)
    prof.check_radius()
    return prof


def spline_profile(seed=0, kappa=0, domain=(0.0, 2.0), n_ctrl=7, amplitude=0.25):
    """Randomized isothermic profile: quintic spline log-radius through seeded controls."""
    rng = np.random.default_rng(seed)
    knots = np.linspace(domain[0], domain[1], n_ctrl)
    ctrl = rng.uniform(-amplitude, amplitude, n_ctrl)
    spl = make_interp_spline(knots, ctrl, k=5)
    fine = np.linspace(domain[0], domain[1], 1001)
    r0 = 1.0 if kappa == 0 else 0.5
    slope = np.max(np.abs(spl(fine, nu=1)))
    limit = 0.6
    if slope > limit:
        spl = make_interp_spline(knots, ctrl * (limit / slope), k=5)
    prof = isothermic_profile(_spline_taylor(spl), r0=r0, kappa=kappa, domain=domain,
                              label=f"spline-profile(seed={seed}, kappa={kappa})")
    return prof


def _delaunay_series(state, H, degree):
    """Taylor coefficients of (r, h, psi) for r' = r cos psi, h' = r sin psi,
    psi' = 2 H r - sin psi about the given states (shape (3, *batch))."""
    r0, h0, p0 = state
    shape = np.shape(r0)
    R = np.zeros((degree + 1,) + shape)
    Hh = np.zeros_like(R)
    P = np.zeros_like(R)
    S = np.zeros_like(R)
    C = np.zeros_like(R)
    R[0], Hh[0], P[0] = r0, h0, p0
    S[0], C[0] = np.sin(p0), np.cos(p0)
    for k in range(1, degree + 1):
        rc = np.sum(R[:k] * C[k - 1 :: -1], axis=0)
        rs = np.sum(R[:k] * S[k - 1 :: -1], axis=0)
        R[k] = rc / k
        Hh[k] = rs / k
        P[k] = (2.0 * H * R[k - 1] - S[k - 1]) / k
        j = np.arange(1, k + 1).reshape((k,) + (1,) * len(shape))
        S[k] = np.sum(j * P[1 : k + 1] * C[k - 1 :: -1], axis=0) / k
        C[k] = -np.sum(j * P[1 : k + 1] * S[k - 1 :: -1], axis=0) / k
    return R, Hh, P


def _shift_series(a, delta, order):
    """Taylor coefficients about x0 + delta of the polynomial sum a_n (x - x0)^n."""
    deg = a.shape[0] - 1
    out = np.zeros((order + 1,) + a.shape[1:])
    for m in range(order + 1):
        for n in range(m, deg + 1):
            out[m] = out[m] + math.comb(n, m) * a[n] * delta ** (n - m)
    return out


def delaunay_profile(H, r0, span=(-1.0, 1.0), psi0=math.pi / 2, node_step=0.02, degree=24):
    """Rotational constant-mean-curvature profile in isothermic parametrization.

    The arclength system ``r' = cos psi, h' = sin psi, psi' = 2H - sin(psi)/r``
    is integrated directly in the isothermic parameter (``ds = r dv``).  Node
    states come from an adaptive Runge-Kutta 4(5) solve; jets at arbitrary v
    come from the Taylor series of the vector field about the nearest node.
    """
    a, b = span

    def rhs(_, y):
        r, _h, psi = y
        return [r * math.cos(psi), r * math.sin(psi), 2.0 * H * r - math.sin(psi)]

    def collapse(_, y):
        return y[0] - 1e-6

    collapse.terminal = True
    nodes_fw = np.arange(0.0, max(b, 0.0) + node_step, node_step)
    nodes_bw = -np.arange(0.0, max(-a, 0.0) + node_step, node_step)
    states = []
    for nodes in (nodes_bw[::-1], nodes_fw):
        if len(nodes) < 2:
            continue
        t_span = (0.0, nodes[-1]) if nodes[-1] > 0 else (0.0, nodes[0])
        t_eval = nodes if nodes[-1] > 0 else nodes[::-1]
        sol = solve_ivp(rhs, t_span, [r0, 0.0, psi0], method="RK45", t_eval=t_eval,
                        rtol=1e-10, atol=1e-12, events=collapse)
        if sol.status == 1:
            raise ProfileError(f"delaunay profile: neck collapse (r -> 0) near v = {sol.t[-1]:.4g}")
        states.append((sol.t, sol.y))
    ts = np.concatenate([s[0] for s in states])
    ys = np.concatenate([s[1] for s in states], axis=1)
    order_idx = np.argsort(ts)
    ts, keep = np.unique(ts[order_idx], return_index=True)
    ys = ys[:, order_idx][:, keep]
    if np.any(ys[0] <= 0):
        raise ProfileError("delaunay profile: neck collapse (r -> 0) inside span")

    def taylor(v, order):
        v = np.asarray(v, dtype=float)
        idx = np.clip(np.rint((v - ts[0]) / node_step).astype(int), 0, len(ts) - 1)
        R, Hh, _ = _delaunay_series(ys[:, idx], H, degree)
        delta = v - ts[idx]
        one = np.zeros((order + 1,) + v.shape)
        one[0] = 1.0
        return np.stack([_shift_series(R, delta, order), _shift_series(Hh, delta, order), one])

    kind = "cylinder" if abs(2 * H * r0 - 1) < 1e-12 and abs(psi0 - math.pi / 2) < 1e-12 else (
        "catenoid" if H == 0 else "unduloid" if r0 < 1 / abs(H) else "nodoid")
    prof = ProfileCurve(taylor, tuple(span), 0, True, f"delaunay(H={H}, r0={r0})",
                        meta={"H": H, "r0": r0, "psi0": psi0, "kind": kind})
    prof.check_radius()
    return prof


def make_rotational(profile, sf=None, u_domain=(0.0, math.pi), label=None):
    """Surface of revolution ``rho(u) gamma(v)`` as an immersion patch.

    The patch normal is oriented so that its principal curvatures agree with
    :func:`rotational_curvatures`.
    """
    sf = sf or SpaceForm(profile.kappa)
    if sf.kappa != profile.kappa:
        raise ProfileError(f"profile built for kappa={profile.kappa}, space form has {sf.kappa}")
    profile.check_radius()

    def evaluator(u, v, order):
        U, V = jets.seeds(u, v, order)
        r, h, k = profile.jets(V)
        return [r * jets.cos(U), r * jets.sin(U), h, k + np.zeros(U.batch_shape)]

    return ImmersionPatch(
        sf,
        evaluator,
        (tuple(u_domain), tuple(profile.domain)),
        label or f"rotational[{profile.label}]",
        orientation=-1,
        meta={"rotational": True, "isothermic": profile.isothermic, "profile": profile},
    )


def profile_speed2(profile, v, sf=None):
    """Squared speed of the profile in the ambient (signature-aware) metric."""
    kappa = profile.kappa if sf is None else sf.kappa
    d = profile.derivatives(v, 1)
    sign = -1.0 if kappa == -1 else 1.0
    if kappa == 0:
        return d[0, 1] ** 2 + d[1, 1] ** 2
    return d[0, 1] ** 2 + d[1, 1] ** 2 + sign * d[2, 1] ** 2


def rotational_curvatures(profile, v, sf=None):
    """Closed-form principal curvatures of the surface of revolution.

    ``k1 = (k h' - h k') / r^2`` (rotation direction) and
    ``k2 = det[[r, r', r''], [h, h', h''], [k, k', k'']] / r^3`` (profile
    direction); valid for isothermic profiles only.  For kappa = 0 the last row
    is ``(1, 0, 0)``.
    """
    sf = sf or SpaceForm(profile.kappa)
    v = np.asarray(v, dtype=float)
    d = profile.derivatives(v, 2)
    r = d[0, 0]
    speed2 = profile_speed2(profile, v, sf)
    if np.any(np.abs(speed2 - r * r) > TOL_NORMALIZATION * r * r):
        raise ProfileError(f"{profile.label}: profile is not isothermically normalized")
    (r, r1, r2), (h, h1, h2), (k, k1, k2) = d
    if sf.kappa == 0:
        k, k1, k2 = np.ones_like(r), np.zeros_like(r), np.zeros_like(r)
    kappa_1 = (k * h1 - h * k1) / r**2
    det = r * (h1 * k2 - h2 * k1) - r1 * (h * k2 - h2 * k) + r2 * (h * k1 - h1 * k)
    return kappa_1, det / r**3


def channel_to_rotational(E, k1, k2, domain, tol=1e-8, label="channel"):
    """Surface-of-revolution profile reconstructed from channel data (flat space).

    ``E``, ``k1``, ``k2`` are jet-arithmetic callables of the profile parameter:
    the conformal factor of ``I = E (du^2 + dv^2)``, the curvature along the
    profile direction and the curvature along the rotation direction.  Then
    ``r = sqrt(E)`` and ``h' = E k2``.
    """
    probe = np.linspace(domain[0], domain[1], 65)
    V = jets.seed(probe, "v", jets.MIN_SEED_ORDER)
    Ej = jets.as_jet(E(V), V.order)
    if np.any(Ej.coeffs[0] <= 0):
        raise ProfileError(f"{label}: E <= 0")
    k1j, k2j = jets.as_jet(k1(V), V.order), jets.as_jet(k2(V), V.order)
    gap = k1j.coeffs[0] - k2j.coeffs[0]
    lhs = k2j.partial(0, 1) / gap
    rhs = 0.5 * Ej.partial(0, 1) / Ej.coeffs[0]
    scale = np.abs(lhs) + np.abs(rhs) + 1.0 / (domain[1] - domain[0])
    if np.any(np.abs(lhs - rhs) > tol * scale * 10):
        raise CodazziViolation(f"{label}: data violate k2'/(k1 - k2) = (log sqrt E)'")

    def rate_values(v):
        shape = np.shape(v)
        Vv = jets.seed(np.ravel(v), "v", jets.MIN_SEED_ORDER)
        val = jets.as_jet(E(Vv), Vv.order) * jets.as_jet(k2(Vv), Vv.order)
        return val.coeffs[0].reshape(shape)

    antider = _Antiderivative(rate_values, domain)

    def taylor(v, order):
        v = np.asarray(v, dtype=float)
        Vs = jets.seed(v, "v", max(order, jets.MIN_SEED_ORDER))
        Es = jets.as_jet(E(Vs), Vs.order)
        r = jets.sqrt(Es)
        rate = Es * jets.as_jet(k2(Vs), Vs.order)
        h = _integrate_taylor(_univariate(rate, order - 1) if order else
                              np.zeros((0,) + v.shape), antider(v))
        one = np.zeros((order + 1,) + v.shape)
        one[0] = 1.0
        return np.stack([_univariate(r, order), h, one])

    prof = ProfileCurve(taylor, tuple(domain), 0, True, label)
    prof.check_radius()
    speed2 = profile_speed2(prof, probe)
    r2 = prof.values(probe)[0] ** 2
    if np.any(np.abs(speed2 - r2) > 1e-6 * r2):
        raise CodazziViolation(f"{label}: data are not the conformal factor of a rotational surface")
    return prof


def channel_data(patch, u0=None):
    """Extract ``(E, k1, k2)`` along the profile of a rotational channel patch.

    Returned callables take a jet of the profile parameter and follow the roles
    of :func:`channel_to_rotational` (k1 along the profile, k2 along the rotation).
    """
    if u0 is None:
        u0 = 0.5 * (patch.domain[0][0] + patch.domain[0][1])

    def restricted(pick):
        def fn(V):
            order = V.order
            cd = curvature_data(patch, u0 + 0.0 * V.coeffs[0], V.coeffs[0], order=order + 2)
            src = pick(cd)
            t = np.stack([src.coeff(0, n) for n in range(order + 1)])
            return jets.compose(t, V)

        return fn

    def conformal(V):
        forms = fundamental_forms(patch, u0 + 0.0 * V.coeffs[0], V.coeffs[0], order=V.order + 1)
        t = np.stack([forms.E.coeff(0, n) for n in range(V.order + 1)])
        return jets.compose(t, V)

    return conformal, restricted(lambda cd: cd.k2_jet), restricted(lambda cd: cd.k1_jet)
