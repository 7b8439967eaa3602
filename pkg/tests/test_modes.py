import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from vortexpacket.modes import (
    GridField, GridWarning, ModeSpec, eval_hg, eval_lg, grid_axes, grid_norm, mode_overlap,
    oam_expectation, phase_winding, probability_current, radial_profile_maxima, ring_peak_radius,
    sample_mode,
)


def lg_reference(l, m, w, r):
    """Textbook LG radial amplitude at the waist."""
    c = math.sqrt(2 * math.factorial(m) / (math.pi * math.factorial(m + abs(l)))) / w
    x = 2 * r**2 / w**2
    return c * (math.sqrt(2) * r / w) ** abs(l) * special.eval_genlaguerre(m, abs(l), x) * np.exp(-r**2 / w**2)


@pytest.mark.parametrize("l,m", [(0, 0), (1, 0), (-2, 1), (3, 2)])
def test_waist_profile_matches_textbook(l, m):
    spec = ModeSpec(l=l, m_radial=m, waist=2.0)
    r = np.linspace(0, 8, 50)
    np.testing.assert_allclose(np.abs(eval_lg(spec, r, 0.3)), np.abs(lg_reference(l, m, 2.0, r)), atol=1e-14)


@pytest.mark.parametrize("l,m", [(0, 0), (2, 0), (-1, 2)])
def test_radial_normalization_by_quadrature(l, m):
    spec = ModeSpec(l=l, m_radial=m, waist=1.5)
    val, _ = integrate.quad(lambda r: 2 * np.pi * r * abs(eval_lg(spec, r, 0.0, 1.0)) ** 2, 0, 40)
    assert val == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("n", [0, 1, 4, 30])
def test_hg_normalized(n):
    spec = ModeSpec(n_long=n, long_length=2.0)
    val, _ = integrate.quad(lambda z: eval_hg(spec, z) ** 2, -60, 60, limit=400)
    assert val == pytest.approx(1.0, abs=1e-9)


def test_defaults_follow_central_momentum():
    spec = ModeSpec(l=1, p_central=2.0)
    assert spec.waist == pytest.approx(5.0)
    assert spec.long_length == pytest.approx(50.0)
    assert spec.rayleigh_time == pytest.approx(12.5)
    assert spec.width(spec.rayleigh_time) == pytest.approx(5.0 * math.sqrt(2))


@pytest.mark.parametrize("kw", [dict(l=1.5), dict(m_radial=-1), dict(waist=0.0), dict(p_central=0)])
def test_invalid_modes(kw):
    with pytest.raises(ValueError):
        ModeSpec(**kw)


def test_core_zero_and_winding():
    for l in (-4, -1, 1, 3):
        spec = ModeSpec(l=l)
        assert eval_lg(spec, 0.0, 0.0) == 0
        assert phase_winding(spec, spec.waist) == pytest.approx(2 * np.pi * l, abs=1e-12)
    assert phase_winding(ModeSpec(l=0), 5.0) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("l", [-5, -2, 0, 1, 4])
def test_oam_expectation(l):
    assert oam_expectation(sample_mode(ModeSpec(l=l), 128)) == pytest.approx(l, abs=1e-6)


def test_oam_requires_normalized_grid():
    g = sample_mode(ModeSpec(l=1), 64)
    with pytest.raises(ValueError):
        oam_expectation(g.replace(values=2 * g.values))


@pytest.mark.parametrize("n", [0, 48, 100])
def test_grid_size_must_be_power_of_two(n):
    with pytest.raises(ValueError):
        GridField(np.zeros((n, n)), 1.0, n)


def test_origin_is_centre_sample():
    x, X, Y = grid_axes(64, 3.0)
    assert x[32] == 0.0 and X[32, 0] == 0.0 and Y[0, 32] == 0.0


def test_small_extent_warns_and_flags():
    spec = ModeSpec(l=2)
    with pytest.warns(GridWarning):
        g = sample_mode(spec, 64, extent=spec.waist)
    assert "extent_too_small" in g.flags


@pytest.mark.parametrize("l", range(1, 6))
def test_ring_radius_scaling(l):
    spec = ModeSpec(l=l)
    assert ring_peak_radius(spec) == pytest.approx(spec.waist * math.sqrt(l / 2), rel=1e-6)


@pytest.mark.parametrize("l", [0, 1, 3])
@pytest.mark.parametrize("m", [0, 1, 2])
def test_ring_count(l, m):
    assert len(radial_profile_maxima(ModeSpec(l=l, m_radial=m))) == m + 1


def test_overlap_orthonormal():
    a = sample_mode(ModeSpec(l=1), 128, extent=80)
    b = sample_mode(ModeSpec(l=-1), 128, extent=80)
    c = sample_mode(ModeSpec(l=1, m_radial=1), 128, extent=80)
    assert abs(mode_overlap(a, a)) == pytest.approx(1, abs=1e-12)
    assert abs(mode_overlap(a, b)) < 1e-12
    assert abs(mode_overlap(a, c)) < 1e-12
    with pytest.raises(ValueError):
        mode_overlap(a, sample_mode(ModeSpec(l=1), 128, extent=70))


def test_current_azimuthal_and_vortex_approximation():
    spec = ModeSpec(l=2)
    g = sample_mode(spec, 128)
    cur = probability_current(spec, g)
    _, X, Y = grid_axes(g.grid_n, g.extent)
    jphi = X * cur.exact[1] - Y * cur.exact[0]
    assert np.all(jphi >= -1e-18)
    # at the waist the radial current vanishes and the exact transverse current is hbar l rho grad(phi)/m
    np.testing.assert_allclose(cur.exact[:2], cur.approx[:2], atol=1e-14)
    assert np.all(cur.approx[:, g.grid_n // 2, g.grid_n // 2] == 0)


def test_current_zero_azimuthal_for_l0():
    spec = ModeSpec(l=0)
    cur = probability_current(spec, sample_mode(spec, 64))
    assert np.abs(cur.exact[:2]).max() < 1e-15


@given(st.integers(-6, 6), st.integers(0, 3), st.floats(0.5, 4.0), st.floats(-3, 3))
def test_density_independent_of_sign_of_l(l, m, w, tau):
    a = ModeSpec(l=l, m_radial=m, waist=w)
    b = a.with_(l=-l)
    r = np.linspace(0, 5 * w, 20)
    np.testing.assert_allclose(np.abs(eval_lg(a, r, 0.4, tau)), np.abs(eval_lg(b, r, 0.4, tau)), atol=1e-15)


@given(st.integers(-4, 4), st.floats(0.0, 2.0))
def test_norm_conserved_along_tau(l, frac):
    spec = ModeSpec(l=l, waist=1.0)
    tau = frac * spec.rayleigh_time
    val, _ = integrate.quad(lambda r: 2 * np.pi * r * abs(eval_lg(spec, r, 0.0, tau)) ** 2, 0, 60)
    assert val == pytest.approx(1.0, abs=1e-9)


def test_grid_norm_close_to_one():
    assert grid_norm(sample_mode(ModeSpec(l=3, m_radial=1), 256)) == pytest.approx(1, abs=1e-10)
