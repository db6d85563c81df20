import numpy as np
import pytest

from lieminimal import jets
from lieminimal.errors import CodazziViolation, ProfileError, UnknownFixture
from lieminimal.fixtures import builtin_fixture
from lieminimal.rotational import (
    channel_data,
    channel_to_rotational,
    delaunay_profile,
    make_rotational,
    profile_from_functions,
    profile_from_samples,
    rotational_curvatures,
    spline_profile,
)
from lieminimal.surface import check_coordinates, curvature_data, fundamental_forms


def test_unit_cylinder_is_curvature_line():
    prof = profile_from_functions(lambda V: 1.0 + 0 * V, lambda V: V, domain=(-1, 1), isothermic=True)
    p = make_rotational(prof)
    assert check_coordinates(p, p.grid(12))["curvature_line"]


def test_closed_form_curvatures():
    v = np.linspace(-1, 1, 9)
    a = 1.7
    cyl = profile_from_functions(lambda V: a + 0 * V, lambda V: a * V, domain=(-1, 1))
    k1, k2 = rotational_curvatures(cyl, v)
    np.testing.assert_allclose(k1, 1 / a, atol=1e-14)
    np.testing.assert_allclose(k2, 0.0, atol=1e-14)
    cat = profile_from_functions(lambda V: jets.cosh(V), lambda V: V, domain=(-1, 1))
    k1, k2 = rotational_curvatures(cat, v)
    np.testing.assert_allclose(k1, 1 / np.cosh(v) ** 2, atol=1e-14)
    np.testing.assert_allclose(k2, -1 / np.cosh(v) ** 2, atol=1e-14)


@pytest.mark.parametrize("kappa", [0, 1, -1])
@pytest.mark.parametrize("seed", range(5))
def test_closed_form_matches_pipeline(seed, kappa):
    prof = spline_profile(seed=seed, kappa=kappa)
    p = make_rotational(prof)
    U, V = p.grid(12).interior().points()
    c = curvature_data(p, U, V)
    k1, k2 = rotational_curvatures(prof, V, p.sf)
    np.testing.assert_allclose(c.k1, k1, atol=1e-10)
    np.testing.assert_allclose(c.k2, k2, atol=1e-10)


def test_spline_profiles_are_isothermic():
    for kappa in (0, 1, -1):
        p = make_rotational(spline_profile(seed=3, kappa=kappa))
        assert check_coordinates(p, p.grid(16))["isothermic"]


def test_unknown_fixture():
    with pytest.raises(UnknownFixture):
        builtin_fixture("klein-bottle")
    with pytest.raises(KeyError):
        builtin_fixture("klein-bottle")


def test_delaunay_catenoid_limit():
    prof = delaunay_profile(0.0, 1.0, span=(-1, 1))
    v = np.linspace(-1, 1, 41)
    r, h, _ = prof.values(v)
    np.testing.assert_allclose(r, np.cosh(v), atol=1e-8)
    np.testing.assert_allclose(h, v, atol=1e-8)
    assert prof.meta["kind"] == "catenoid"


def test_delaunay_cylinder_fixed_point():
    prof = delaunay_profile(0.5, 1.0)
    r = prof.values(np.linspace(-1, 1, 21))[0]
    np.testing.assert_allclose(r, 1.0, atol=1e-12)
    assert prof.meta["kind"] == "cylinder"


@pytest.mark.parametrize("r0,kind", [(0.6, "unduloid"), (2.5, "nodoid")])
def test_delaunay_constant_mean_curvature(r0, kind):
    prof = delaunay_profile(0.5, r0)
    assert prof.meta["kind"] == kind
    p = make_rotational(prof)
    U, V = p.grid(32).points()
    c = curvature_data(p, U, V)
    assert np.std(c.H) <= 1e-8
    assert np.mean(c.H) == pytest.approx(0.5, abs=1e-8)


def test_delaunay_collapse():
    with pytest.raises(ProfileError):
        delaunay_profile(0.0, 1.0, span=(-20.0, 0.5), psi0=0.0)


def test_profile_from_samples_cylinder():
    v = np.linspace(0, 1, 30)
    prof = profile_from_samples(v, np.full_like(v, 2.0), 2.0 * v)
    p = make_rotational(prof)
    U, V = p.grid(8).interior().points()
    c = curvature_data(p, U, V)
    np.testing.assert_allclose(c.k1, 0.5, atol=1e-10)


def test_channel_constant_data_gives_cylinder():
    a = 2.0
    prof = channel_to_rotational(lambda V: a * a + 0 * V, lambda V: 0 * V, lambda V: 1 / a + 0 * V, (0, 1))
    r, h, _ = prof.values(np.array([0.0, 0.5, 1.0]))
    np.testing.assert_allclose(r, a)
    np.testing.assert_allclose(h, [0.0, 1.0, 2.0], atol=1e-12)


def test_channel_catenoid_data():
    prof = channel_to_rotational(lambda V: jets.cosh(V) ** 2, lambda V: -1 / jets.cosh(V) ** 2,
                                 lambda V: 1 / jets.cosh(V) ** 2, (-1, 1))
    v = np.linspace(-1, 1, 11)
    r, h, _ = prof.values(v)
    np.testing.assert_allclose(r, np.cosh(v), atol=1e-12)
    np.testing.assert_allclose(np.diff(h), np.diff(v), atol=1e-10)


def test_channel_rejects_codazzi_violation():
    with pytest.raises(CodazziViolation):
        channel_to_rotational(lambda V: jets.cosh(V) ** 2, lambda V: 0 * V, lambda V: 0.5 + 0 * V, (-1, 1))


def test_channel_round_trip():
    p = builtin_fixture("spline-profile", {"seed": 4})
    E, k_profile, k_rotation = channel_data(p)
    prof = channel_to_rotational(E, k_profile, k_rotation, p.domain[1])
    q = make_rotational(prof, u_domain=p.domain[0])
    U, V = p.grid(16).points()
    a = fundamental_forms(p, U, V).values()
    b = fundamental_forms(q, U, V).values()
    for key in "EFGLMN":
        np.testing.assert_allclose(b[key], a[key], atol=1e-8)
