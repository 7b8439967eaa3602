import numpy as np
import pytest
from hypothesis import given, strategies as st

from vortexpacket.modes import ModeSpec, grid_axes, grid_norm, mode_overlap, rms_radius, sample_mode
from vortexpacket.paraxial import LeakageWarning, boundary_fraction, make_plan, measure_centroid_and_oam, propagate


def _extent(spec, tau):
    return 8.0 * float(spec.width(tau)) + spec.order * spec.waist


@pytest.mark.parametrize("l,m", [(0, 0), (1, 0), (-2, 1), (3, 1)])
def test_matches_analytic_evolution(l, m):
    spec = ModeSpec(l=l, m_radial=m)
    tau = 0.7 * spec.rayleigh_time
    ext = _extent(spec, tau)
    out = propagate(sample_mode(spec, 256, extent=ext), tau)
    ref = sample_mode(spec, 256, extent=ext, tau=tau)
    assert abs(mode_overlap(ref, out)) > 1 - 1e-10
    assert out.tau == tau


def test_width_grows_by_sqrt2_at_rayleigh_time():
    spec = ModeSpec(l=0)
    ext = _extent(spec, spec.rayleigh_time)
    g0 = sample_mode(spec, 256, extent=ext)
    g1 = propagate(g0, spec.rayleigh_time)
    assert rms_radius(g1) / rms_radius(g0) == pytest.approx(np.sqrt(2), rel=1e-8)


@given(st.floats(-60, 60), st.integers(1, 4))
def test_unitary(tau, steps):
    g = sample_mode(ModeSpec(l=1), 64, extent=100)
    out = propagate(g, tau / steps, steps)
    assert grid_norm(out) == pytest.approx(grid_norm(g), abs=1e-12)


def test_forward_then_back_is_identity():
    g = sample_mode(ModeSpec(l=2), 128)
    back = propagate(propagate(g, 30.0), -30.0)
    np.testing.assert_allclose(back.values, g.values, atol=1e-14)


def test_steps_compose():
    g = sample_mode(ModeSpec(l=1), 64, extent=100)
    np.testing.assert_allclose(propagate(g, 10.0, 3).values, propagate(g, 30.0).values, atol=1e-13)


def test_zero_step_is_noop():
    g = sample_mode(ModeSpec(l=1), 64)
    assert propagate(g, 0.0) is g


def test_plan_mismatch_rejected():
    g = sample_mode(ModeSpec(l=1), 64)
    with pytest.raises(ValueError):
        propagate(g, 1.0, plan=make_plan(128, g.extent, 1.0))
    with pytest.raises(ValueError):
        propagate(g, 1.0, steps=-1)


def test_boundary_leakage_warns():
    spec = ModeSpec(l=1)
    g = sample_mode(spec, 64, extent=6 * spec.waist)
    with pytest.warns(LeakageWarning):
        out = propagate(g, 3 * spec.rayleigh_time)
    assert "boundary_leakage" in out.flags
    assert boundary_fraction(out) > 1e-3


def test_centroid_and_oam_conserved():
    spec = ModeSpec(l=-3)
    g = sample_mode(spec, 128, extent=_extent(spec, 20.0), center=(4.0, -2.0))
    c0, l0 = measure_centroid_and_oam(g)
    c1, l1 = measure_centroid_and_oam(propagate(g, 20.0))
    np.testing.assert_allclose(c0, [4.0, -2.0], atol=1e-8)
    np.testing.assert_allclose(c1, c0, atol=1e-8)
    # about a displaced origin <L_z> picks up the centroid's orbital part, which is zero at rest
    assert l1 == pytest.approx(l0, abs=1e-8)


def test_plane_wave_phase_oracle():
    # a single Fourier mode picks up exactly exp(-i k^2 tau / 2)
    n, ext = 64, 10.0
    _, X, _ = grid_axes(n, ext)
    k = 2 * np.pi * 3 / (2 * ext)
    from vortexpacket.modes import GridField
    g = GridField(np.exp(1j * k * X) / (2 * ext), ext, n)
    with pytest.warns(LeakageWarning):  # a plane wave fills the box
        out = propagate(g, 0.7)
    np.testing.assert_allclose(out.values, g.values * np.exp(-0.5j * k**2 * 0.7), atol=1e-14)
