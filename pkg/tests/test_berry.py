import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vortexpacket.berry import (
    GAUGE_LABEL, MomentumPath, ZeemanParams, berry_connection, berry_curvature, berry_phase_loop,
    loop_solid_angle, string_distance, triangle_solid_angle, zeeman_energy,
    zeeman_gradients,
)
from vortexpacket.checks import _sphere_flux, random_offstring_loop
from vortexpacket.errors import GaugeStringError, GaugeWarning, SingularityError
from vortexpacket.units import finite_difference_curl, finite_difference_gradient, make_field


def circle(theta, n=400, radius=1.0):
    """Counter-clockwise (about +z) circle at polar angle ``theta``."""
    t = 2 * np.pi * np.arange(n + 1) / n
    t[-1] = 0.0
    return radius * np.stack([np.sin(theta) * np.cos(t), np.sin(theta) * np.sin(t),
                              np.full_like(t, np.cos(theta))], axis=1)


def wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


def test_curvature_is_curl_of_connection():
    for p in ([0.3, -0.4, 0.8], [1.0, 2.0, -0.5], [-0.2, 0.1, 0.05]):
        curl = finite_difference_curl(berry_connection, np.array(p), h=1e-5)
        np.testing.assert_allclose(curl, berry_curvature(p), rtol=1e-7, atol=1e-9)


def test_flux_through_spheres():
    assert _sphere_flux([0.2, -0.1, 0.15], 1.0) == pytest.approx(-4 * np.pi, abs=1e-10)
    assert _sphere_flux([3.0, 0.0, 0.0], 1.0) == pytest.approx(0.0, abs=1e-10)


def test_singular_points():
    with pytest.raises(SingularityError):
        berry_curvature([0, 0, 0])
    with pytest.raises(GaugeStringError):
        berry_connection([0.0, 0.0, -1.0])
    assert string_distance([1.0, 0.0, 0.5]) == math.inf
    assert string_distance([3.0, 4.0, -1.0]) == 5.0


def test_triangle_octant():
    a, b, c = np.eye(3)
    assert triangle_solid_angle(a, b, c) == pytest.approx(np.pi / 2)
    assert triangle_solid_angle(a, c, b) == pytest.approx(-np.pi / 2)


def test_equatorial_loop():
    res = berry_phase_loop(MomentumPath(circle(np.pi / 2, 8)), 1)
    assert res.phase == pytest.approx(-2 * np.pi, abs=1e-12)
    assert res.method == "solid_angle" and res.gauge_label == GAUGE_LABEL


@pytest.mark.parametrize("theta", [0.3, np.pi / 3, 2.0])
def test_cone_loop_matches_cap_area(theta):
    n = 4000
    res = berry_phase_loop(MomentumPath(circle(theta, n)), 2)
    # geodesic polygon inscribed in the circle: exact area via its own formula
    cap = 2 * np.pi * (1 - np.cos(theta))
    # the solid angle is defined modulo 4 pi, the phase modulo 2 pi
    assert wrap(res.phase + 2 * cap) == pytest.approx(0.0, abs=1e-5)
    polygon = loop_solid_angle(circle(theta, n))
    assert res.phase == -2 * polygon


def test_line_integral_agrees_mod_2pi_even_around_string():
    pts = circle(2.8, 200)  # encircles the string
    res = berry_phase_loop(MomentumPath(pts), 1)
    gap = (res.line_integral - res.solid_angle + np.pi) % (2 * np.pi) - np.pi
    assert abs(gap) < 1e-8


def test_loop_through_string_uses_solid_angle():
    pts = np.array([[1, 0, -1], [0, 0, -1], [-1, 0.5, -1], [1, 0, -1]], float)
    res = berry_phase_loop(MomentumPath(pts), 1)
    assert math.isnan(res.line_integral)
    assert res.phase == pytest.approx(-loop_solid_angle(pts))


def test_open_path_warns():
    pts = circle(1.0, 20)[:10]
    with pytest.warns(GaugeWarning):
        res = berry_phase_loop(MomentumPath(pts, closed=False), 1)
    assert res.method == "line_integral"
    assert math.isnan(res.solid_angle)


def test_path_validation():
    with pytest.raises(ValueError):
        MomentumPath([[1, 0, 0], [0, 1, 0]])
    with pytest.raises(SingularityError):
        MomentumPath([[1, 0, 0], [0, 0, 0], [1, 0, 0]])
    loop = MomentumPath.loop([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert len(loop.points) == 4


@given(st.integers(0, 10_000), st.integers(-6, 6))
def test_reversal_and_l_scaling(seed, l):
    pts = random_offstring_loop(np.random.default_rng(seed), n=24)
    path = MomentumPath.loop(pts)
    fwd = berry_phase_loop(path, l).phase
    bwd = berry_phase_loop(path.reversed(), l).phase
    assert fwd == pytest.approx(-bwd, abs=1e-13)
    assert fwd == l * berry_phase_loop(path, 1).phase


@given(st.integers(0, 10_000), st.floats(0.2, 5.0))
def test_phase_independent_of_momentum_scale(seed, s):
    pts = random_offstring_loop(np.random.default_rng(seed), n=24)
    a = berry_phase_loop(MomentumPath.loop(pts), 1)
    b = berry_phase_loop(MomentumPath.loop(s * pts), 1)
    assert a.phase == pytest.approx(b.phase, abs=1e-12)
    assert a.line_integral == pytest.approx(b.line_integral, abs=1e-9)


def test_zeeman_energy_and_gradients():
    zp = ZeemanParams(2, g_factor=1.5)
    B = np.array([0.1, -0.2, 0.7])
    assert zeeman_energy(zp, [0, 0, 2], B) == pytest.approx(-1.5 * -0.5 * 2 * 0.7)

    cfg = make_field(magnetic=lambda r: np.array([0.1 * r[1], 0.2, 1.0 + 0.05 * r[0] * r[2]]), g_factor=1.5)
    r = np.array([0.3, -1.0, 2.0])
    p = np.array([0.4, 0.2, 0.9])

    def delta(rr, pp):
        from vortexpacket.units import eval_fields
        return zeeman_energy(zp, 2 * pp / np.linalg.norm(pp), eval_fields(cfg, rr)[1])

    d_dr, d_dp = zeeman_gradients(zp, r, p, cfg)
    np.testing.assert_allclose(d_dr, finite_difference_gradient(lambda x: delta(x, p), r), atol=1e-7)
    np.testing.assert_allclose(d_dp, finite_difference_gradient(lambda x: delta(r, x), p), atol=1e-8)
