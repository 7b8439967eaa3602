"""Acceptance checks shared by ``vortexpacket selftest`` and the test suite.

Each check runs one criterion at its stated tolerance and
returns a :class:`CheckResult`; nothing here raises on a failed criterion.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import roots_legendre

from .berry import (
    MomentumPath, ZeemanParams, berry_curvature, berry_phase_loop, connection_line_integral,
    loop_solid_angle, string_distance,
)
from .dynamics import IntegratorConfig, PacketState, integrate, rhs_solve
from .errors import ModelValidityWarning
from .modes import (
    ModeSpec, eval_lg, grid_norm, mode_overlap, oam_expectation, phase_winding,
    radial_profile_maxima, sample_mode,
)
from .paraxial import propagate
from .scenarios import run_fig2, run_helicity_watch, run_magnetic_drift
from .symplectic import build_frame, closed_form_brackets, hamiltonian_flow, hamiltonian_gradient
from .units import DIMENSIONLESS, make_field, make_uniform_E

__all__ = ["CheckResult", "CHECKS", "run_check", "run_all", "relative_energy_error", "first_modes", "plain_lorentz_rk4"]


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name}: {self.detail} ({self.seconds:.2f} s)"


def relative_energy_error(traj) -> float:
    """``max |H(t) - H(0)| / |H(0)|`` over the trajectory."""
    H = traj.energy
    return float(np.max(np.abs(H - H[0])) / abs(H[0]))


def _timed(number, name, fn):
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ModelValidityWarning)
        passed, detail = fn()
    return CheckResult(number, name, bool(passed), detail, time.perf_counter() - t0)


# 1 -------------------------------------------------------------------------

def _hall_shift():
    E0, p0 = 0.02, 1.0
    t0 = time.perf_counter()
    res = run_fig2(tuple(range(-3, 4)), E0=E0, p0=p0)
    elapsed = time.perf_counter() - t0
    worst = max(abs(shift / asym - 1.0) for l, shift, asym, _ in res.table if l != 0)
    energy = max(relative_energy_error(tr) for tr in res.trajectories.values())
    ok = worst < 1e-3 and elapsed < 5.0 and energy < 1e-8
    return ok, f"max |shift/(hbar l/p0) - 1| = {worst:.2e} (< 1e-3), energy {energy:.1e}, run {elapsed:.2f} s (< 5 s)"


# 2 -------------------------------------------------------------------------

def _magnetic_drift():
    t0 = time.perf_counter()
    worst, zero_g2, energy = 0.0, 0.0, 0.0
    for l in (1, 2, 5):
        for row in run_magnetic_drift((0.0, 1.0, 2.0), l=l, periods=10.0):
            energy = max(energy, relative_energy_error(row.trajectory))
            if row.g == 2.0:
                zero_g2 = max(zero_g2, abs(row.measured))
            else:
                worst = max(worst, abs(row.measured / row.predicted - 1.0))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-4 and zero_g2 < 1e-8 and elapsed < 10.0 and energy < 1e-8
    return ok, (f"max rel drift error {worst:.2e} (< 1e-4), |drift(g=2)| = {zero_g2:.1e}, "
                f"energy {energy:.1e}, run {elapsed:.2f} s (< 10 s)")


# 3 -------------------------------------------------------------------------

def _helicity():
    g2, g1 = run_helicity_watch((2.0, 1.0), l=1, periods=10.0)
    period = 2 * math.pi
    free_dev = 0.0
    for g in (0.0, 1.0, 2.0, 3.0):
        cfg = make_uniform_E([0.0, 0.05, 0.0], g_factor=g)
        st = PacketState.initial([0, 0, 0], [0.8, 0.0, 0.6], 2)
        tr = integrate(st, cfg, ZeemanParams(2, g), IntegratorConfig(
            method="dop853", rtol=1e-12, atol=1e-15, t_final=10 * period, oam_model="precessing"))
        free_dev = max(free_dev, float(np.abs(tr.helicity - 2).max()))
    fires = g1.warned and g1.warn_time <= period
    ok = g2.max_deviation < 1e-9 and free_dev < 1e-9 and fires
    return ok, (f"g=2 dev {g2.max_deviation:.1e}, B=0 dev {free_dev:.1e} (< 1e-9), "
                f"g=1 warning at t = {g1.warn_time:.3g} (period {period:.3g})")


# 4 -------------------------------------------------------------------------

def _sphere_flux(center, radius, n_theta=96, n_phi=192):
    u, wu = roots_legendre(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    U, P = np.meshgrid(u, phi, indexing="ij")
    s = np.sqrt(1 - U**2)
    n = np.stack([s * np.cos(P), s * np.sin(P), U], axis=-1)
    pts = np.asarray(center) + radius * n
    curv = berry_curvature(pts)
    integrand = np.sum(curv * n, axis=-1) * radius**2
    return float(np.sum(wu[:, None] * integrand) * 2 * np.pi / n_phi)


def random_offstring_loop(rng, n=40):
    """Closed loop of ``n`` points on a random small circle, kept clear of the
    ``-z`` axis."""
    while True:
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        half = rng.uniform(0.1, 1.2)
        a = np.cross(axis, [1.0, 0.0, 0.0])
        if np.linalg.norm(a) < 0.1:
            a = np.cross(axis, [0.0, 1.0, 0.0])
        a /= np.linalg.norm(a)
        b = np.cross(axis, a)
        t = 2 * np.pi * np.arange(n) / n
        dirs = np.cos(half) * axis + np.sin(half) * (np.cos(t)[:, None] * a + np.sin(t)[:, None] * b)
        pts = dirs * rng.uniform(0.5, 2.0, size=(n, 1))
        if min(string_distance(p) / np.linalg.norm(p) for p in pts) > 0.05:
            return pts


def _monopole():
    flux = _sphere_flux([0.2, -0.1, 0.15], 1.0)
    rng = np.random.default_rng(2024)
    worst = 0.0
    scale_err = 0.0
    for _ in range(50):
        pts = random_offstring_loop(rng)
        closed = np.vstack([pts, pts[:1]])
        li = connection_line_integral(closed)
        sa = loop_solid_angle(closed)
        # oint A.dp = -solid angle
        d = (li + sa + np.pi) % (2 * np.pi) - np.pi
        worst = max(worst, abs(d))
        path = MomentumPath(closed)
        base = berry_phase_loop(path, 1).phase
        for l in (-3, 2, 5):
            scale_err = max(scale_err, abs(berry_phase_loop(path, l).phase - l * base))
    flux_err = abs(flux + 4 * np.pi)
    ok = flux_err < 1e-6 and worst < 1e-8 and scale_err == 0.0
    return ok, (f"|flux + 4 pi| = {flux_err:.1e} (< 1e-6), line vs solid angle {worst:.1e} (< 1e-8), "
                f"l-scaling error {scale_err:.1e}")


# 5 -------------------------------------------------------------------------

def _random_uniform_field(rng):
    E = rng.normal(size=3) * 0.3
    B = rng.normal(size=3) * 0.7
    return make_field(
        electric=lambda r: E.copy(),
        magnetic=lambda r: B.copy(),
        scalar_potential=lambda r: -float(E @ np.asarray(r)),
        vector_potential=lambda r: 0.5 * np.cross(B, np.asarray(r)),
        gauge_label="symmetric",
        g_factor=float(rng.uniform(0.0, 3.0)),
    )


def _brackets():
    rng = np.random.default_rng(7)
    worst_cf = worst_det = worst_flow = 0.0
    count = 0
    while count < 1000:
        cfg = _random_uniform_field(rng)
        r = rng.normal(size=3)
        p = rng.normal(size=3)
        p *= rng.uniform(0.3, 3.0) / np.linalg.norm(p)
        l = int(rng.choice([-5, -4, -3, -2, -1, 1, 2, 3, 4, 5]))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            frame = build_frame(r, p, l, cfg)
        if not frame.admissible:
            continue
        count += 1
        ref = closed_form_brackets(frame.B, frame.curvature, l, cfg.units)
        worst_cf = max(worst_cf, float(np.abs(frame.brackets - ref).max() / max(1.0, np.abs(ref).max())))
        det = np.linalg.det(frame.omega)
        worst_det = max(worst_det, abs(frame.D - math.sqrt(det)))
        zp = ZeemanParams(l, cfg.g_factor)
        flow = hamiltonian_flow(frame, hamiltonian_gradient(r, p, l, cfg, zp))
        rdot, pdot = rhs_solve(PacketState.initial(r, p, l), cfg, zp)
        scale = max(1.0, float(np.abs(flow).max()))
        worst_flow = max(worst_flow, float(np.abs(flow - np.concatenate([rdot, pdot])).max()) / scale)
    ok = worst_cf < 1e-12 and worst_det < 1e-10 and worst_flow < 1e-10
    return ok, (f"closed forms {worst_cf:.1e} (< 1e-12), |D - sqrt det| {worst_det:.1e} (< 1e-10), "
                f"flow vs rhs {worst_flow:.1e} (< 1e-10) over {count} states")


# 6 -------------------------------------------------------------------------

def first_modes(count=12):
    """``(l, m)`` pairs ordered by ``2m + |l|``, then ``l``, then ``m``."""
    out = []
    order = 0
    while len(out) < count:
        level = [(l, (order - abs(l)) // 2) for l in range(-order, order + 1) if (order - abs(l)) % 2 == 0]
        out.extend(sorted(level))
        order += 1
    return out[:count]


def _modes():
    t0 = time.perf_counter()
    n = 256
    lz = max(abs(oam_expectation(sample_mode(ModeSpec(l=l), n)) - l) for l in range(-5, 6))
    pairs = first_modes(12)
    extent = 8.5 * ModeSpec(0).waist
    grids = [sample_mode(ModeSpec(l=l, m_radial=m), n, extent=extent) for l, m in pairs]
    gram = np.array([[mode_overlap(a, b) for b in grids] for a in grids])
    gram_err = float(np.abs(gram - np.eye(len(grids))).max())
    rings_ok = all(len(radial_profile_maxima(ModeSpec(l=l, m_radial=m))) == m + 1
                   for l in range(0, 4) for m in range(0, 3))
    core = max(abs(complex(eval_lg(ModeSpec(l=l), 0.0, 0.0))) for l in (-3, -1, 1, 2, 5))
    wind = max(abs(phase_winding(ModeSpec(l=l), ModeSpec(l=l).waist) - 2 * np.pi * l) for l in range(-5, 6))
    elapsed = time.perf_counter() - t0
    ok = lz < 1e-6 and gram_err < 1e-4 and rings_ok and core == 0.0 and wind < 1e-12 and elapsed < 20.0
    return ok, (f"<Lz> err {lz:.1e} (< 1e-6), Gram err {gram_err:.1e} (< 1e-4), rings m+1 {rings_ok}, "
                f"core |u(0)| {core:.1e}, winding err {wind:.1e}, run {elapsed:.2f} s (< 20 s)")


# 7 -------------------------------------------------------------------------

def _oracle():
    worst_ov = worst_norm = worst_lz = 0.0
    for l in range(-3, 4):
        for m in (0, 1):
            spec = ModeSpec(l=l, m_radial=m)
            tau = 0.7 * spec.rayleigh_time
            extent = 8.0 * float(spec.width(tau)) + spec.order * spec.waist
            g0 = sample_mode(spec, 256, extent=extent)
            g1 = propagate(g0, tau)
            ref = sample_mode(spec, 256, extent=extent, tau=tau)
            worst_ov = max(worst_ov, 1.0 - abs(mode_overlap(ref, g1)))
            worst_norm = max(worst_norm, abs(grid_norm(g1) - grid_norm(g0)))
            worst_lz = max(worst_lz, abs(oam_expectation(g1) - oam_expectation(g0)))
    ok = worst_ov < 1e-5 and worst_norm < 1e-12 and worst_lz < 1e-6
    return ok, f"1 - |overlap| {worst_ov:.1e} (< 1e-5), norm drift {worst_norm:.1e}, <Lz> drift {worst_lz:.1e}"


# 8 -------------------------------------------------------------------------

def plain_lorentz_rk4(r0, p0, E, B, h, n, units=DIMENSIONLESS):
    """Textbook RK4 for ``dr/dt = p/m``, ``dp/dt = e (E + p/m x B)``."""
    e, m = units.charge, units.mass

    def f(y):
        v = y[3:] / m
        return np.concatenate([v, e * (E + np.cross(v, B))])

    y = np.concatenate([r0, p0]).astype(float)
    out = [y.copy()]
    for _ in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(y.copy())
    return np.array(out)


def _reduction():
    E = np.array([0.01, 0.02, 0.0])
    B = np.array([0.0, 0.3, 1.0])
    cfg = make_field(electric=lambda r: E.copy(), magnetic=lambda r: B.copy(),
                     scalar_potential=lambda r: -float(E @ np.asarray(r)),
                     vector_potential=lambda r: 0.5 * np.cross(B, np.asarray(r)), gauge_label="symmetric")
    r0, p0 = np.zeros(3), np.array([0.6, 0.0, 0.8])
    st = PacketState.initial(r0, p0, 0)
    h, n = 0.01, 2000
    tr = integrate(st, cfg, ZeemanParams(0), IntegratorConfig(method="rk4", step=h, t_final=h * n))
    plain = plain_lorentz_rk4(r0, p0, E, B, h, n)
    same_step = float(np.abs(tr.data[:, 1:7] - plain).max())

    tr_ad = integrate(st, cfg, ZeemanParams(0), IntegratorConfig(method="rk45", rtol=1e-10, atol=1e-12, t_final=20.0))
    e = DIMENSIONLESS.charge
    sol = solve_ivp(lambda t, y: np.concatenate([y[3:], e * (E + np.cross(y[3:], B))]), (0, 20.0),
                    np.concatenate([r0, p0]), method="DOP853", rtol=1e-13, atol=1e-14)
    adaptive = float(np.abs(tr_ad.data[-1, 1:7] - sol.y[:, -1]).max())

    # observed order on the uniform-E Hall scenario, l = 1
    cfgE = make_uniform_E([0.0, 0.02, 0.0])
    stE = PacketState.initial([0, 0, 0], [0, 0, 1.0], 1)
    T = 100.0
    ref = integrate(stE, cfgE, ZeemanParams(1), IntegratorConfig(method="dop853", rtol=1e-12, atol=1e-15, t_final=T))
    errs = []
    for hh in (10.0, 5.0, 2.5):
        trh = integrate(stE, cfgE, ZeemanParams(1), IntegratorConfig(method="rk4", step=hh, t_final=T))
        errs.append(float(np.linalg.norm(trh.r[-1] - ref.r[-1])))
    orders = [math.log2(errs[k] / errs[k + 1]) for k in range(len(errs) - 1)]
    order = min(orders)

    energy = max(relative_energy_error(t) for t in (tr, tr_ad, ref))
    ok = same_step < 1e-10 and adaptive < 1e-7 and order >= 3.8 and energy < 1e-8
    return ok, (f"l=0 vs plain RK4 {same_step:.1e}, vs plain adaptive {adaptive:.1e}, "
                f"RK4 order {order:.2f} (>= 3.8), energy {energy:.1e} (< 1e-8)")


CHECKS = (
    (1, "transverse OAM Hall shift", _hall_shift),
    (2, "magnetic drift law", _magnetic_drift),
    (3, "helicity conservation", _helicity),
    (4, "monopole geometry", _monopole),
    (5, "bracket algebra", _brackets),
    (6, "mode structure", _modes),
    (7, "paraxial oracle agreement", _oracle),
    (8, "reduction and convergence", _reduction),
)


def run_check(number: int) -> CheckResult:
    for k, name, fn in CHECKS:
        if k == number:
            return _timed(k, name, fn)
    raise KeyError(number)


def run_all(numbers=None):
    return [run_check(k) for k, _, _ in CHECKS if numbers is None or k in numbers]
