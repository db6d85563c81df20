"""Named surface patches used by tests, the acceptance suite and the CLI."""
from __future__ import annotations

import math

import numpy as np

from . import jets
from .errors import UnknownFixture
from .rotational import (
    delaunay_profile,
    isothermic_profile,
    make_rotational,
    profile_from_functions,
    spline_profile,
)
from .spaceform import SpaceForm
from .surface import ImmersionPatch

HALF_TURN = (0.0, math.pi)


def _plane(**_):
    return ImmersionPatch.from_map(
        lambda U, V: (U, V, 0.0, 1.0), SpaceForm(0), ((-1, 1), (-1, 1)), "plane",
        meta={"umbilic_only": True},
    )


def _cylinder(radius=1.0, **_):
    a = float(radius)
    prof = profile_from_functions(lambda V: a + 0.0 * V, lambda V: a * V, domain=(-1.0, 1.0),
                                  isothermic=True, label=f"cylinder(a={a})")
    return make_rotational(prof, u_domain=HALF_TURN, label=f"cylinder(radius={a})")


def _cone(alpha=0.5, **_):
    c, s = math.sin(alpha), math.cos(alpha)
    prof = profile_from_functions(lambda V: jets.exp(c * V), lambda V: (s / c) * jets.exp(c * V),
                                  domain=(-1.0, 1.0), isothermic=True, label=f"cone(alpha={alpha})")
    return make_rotational(prof, u_domain=HALF_TURN, label=f"cone(alpha={alpha})")


def _sphere(radius=1.0, **_):
    R = float(radius)
    prof = profile_from_functions(lambda V: R / jets.cosh(V), lambda V: R * jets.sinh(V) / jets.cosh(V),
                                  domain=(-1.0, 1.0), isothermic=True, label=f"sphere(R={R})")
    p = make_rotational(prof, u_domain=HALF_TURN, label=f"sphere(radius={R})")
    p.meta["umbilic_only"] = True
    return p


def _catenoid(scale=1.0, **_):
    c = float(scale)
    prof = profile_from_functions(lambda V: c * jets.cosh(V), lambda V: c * V, domain=(-1.0, 1.0),
                                  isothermic=True, label="catenoid")
    return make_rotational(prof, u_domain=HALF_TURN, label="catenoid")


def _torus(R=2.0, r=0.5, **_):
    R, r = float(R), float(r)
    prof = profile_from_functions(lambda V: R + r * jets.cos(V), lambda V: r * jets.sin(V),
                                  domain=(0.0, 2 * math.pi), label=f"torus(R={R}, r={r})")
    return make_rotational(prof, u_domain=HALF_TURN, label=f"torus(R={R}, r={r})")


def _unduloid(H=0.5, r0=0.6, span=(-1.5, 1.5), **_):
    prof = delaunay_profile(float(H), float(r0), tuple(span))
    return make_rotational(prof, u_domain=HALF_TURN, label=f"unduloid(H={H}, r0={r0})")


def _nodoid(H=0.5, r0=2.5, span=(-1.0, 1.0), **_):
    prof = delaunay_profile(float(H), float(r0), tuple(span))
    return make_rotational(prof, u_domain=HALF_TURN, label=f"nodoid(H={H}, r0={r0})")


def _enneper(**_):
    def f(U, V):
        return (
            U - U**3 / 3.0 + U * V * V,
            -(V - V**3 / 3.0 + V * U * U),
            U * U - V * V,
            1.0,
        )

    return ImmersionPatch.from_map(f, SpaceForm(0), ((-1, 1), (-1, 1)), "enneper")


def _sheared_graph(**_):
    return ImmersionPatch.from_map(lambda U, V: (U, V, U * V, 1.0), SpaceForm(0),
                                   ((0.1, 1.0), (0.1, 1.0)), "sheared-graph")


def _spline(seed=0, kappa=0, **_):
    prof = spline_profile(seed=int(seed), kappa=int(kappa))
    return make_rotational(prof, u_domain=HALF_TURN, label=prof.label)


def _band(kappa=1, r0=0.5, amplitude=0.2, **_):
    kappa = int(kappa)

    def taylor(v, order):
        V = jets.seed(v, "v", max(order, jets.MIN_SEED_ORDER))
        q = amplitude * jets.sin(V)
        return np.stack([q.coeff(0, n) * np.ones(V.batch_shape) for n in range(order + 1)])

    prof = isothermic_profile(taylor, r0=float(r0), kappa=kappa, domain=(0.0, 2.0),
                              label=f"band(kappa={kappa})")
    return make_rotational(prof, u_domain=HALF_TURN, label=f"band(kappa={kappa})")


def _clifford(alpha=math.pi / 4, **_):
    ca, sa = math.cos(alpha), math.sin(alpha)
    w = ca / sa
    prof = profile_from_functions(
        lambda V: ca + 0.0 * V,
        lambda V: sa * jets.cos(w * V),
        lambda V: sa * jets.sin(w * V),
        domain=(0.0, 2.0), kappa=1, isothermic=True, label=f"clifford(alpha={alpha:.4g})",
    )
    return make_rotational(prof, SpaceForm(1), u_domain=HALF_TURN, label="clifford-torus")


FIXTURES = {
    "plane": (_plane, "flat plane z = 0 (umbilic everywhere; error-path fixture)"),
    "cylinder": (_cylinder, "circular cylinder, isothermic rotational coordinates"),
    "cone": (_cone, "circular cone, isothermic rotational coordinates"),
    "sphere": (_sphere, "round sphere (umbilic everywhere; error-path fixture)"),
    "catenoid": (_catenoid, "catenoid (cosh v cos u, cosh v sin u, v)"),
    "torus": (_torus, "torus of revolution (R + r cos v)(cos u, sin u), not isothermic"),
    "unduloid": (_unduloid, "Delaunay unduloid, H = 0.5, from the profile ODE"),
    "nodoid": (_nodoid, "Delaunay nodoid, H = 0.5, from the profile ODE"),
    "enneper": (_enneper, "Enneper minimal surface in isothermic curvature-line coordinates"),
    "sheared-graph": (_sheared_graph, "graph (u, v, uv); coordinates not curvature-line"),
    "spline-profile": (_spline, "seeded random isothermic spline profile of revolution"),
    "band": (_band, "rotational band in S^3 (kappa=1) or H^3 (kappa=-1)"),
    "clifford": (_clifford, "Clifford-type torus in S^3"),
}


def builtin_fixture(name, params=None):
    """Construct a named fixture patch with optional parameters."""
    try:
        factory, _ = FIXTURES[name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}") from None
    patch = factory(**(params or {}))
    patch.meta.setdefault("fixture", name)
    patch.meta.setdefault("params", dict(params or {}))
    return patch


def list_fixtures():
    return [(name, doc) for name, (_, doc) in FIXTURES.items()]
