"""Canned experiments: density/current maps, the Hall fan, magnetic drift,
helicity tracking and a closed Berry loop, plus the file-writing harness.
"""
from __future__ import annotations

import hashlib
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import svg
from .berry import MomentumPath, ZeemanParams, berry_phase_loop
from .config import RunConfig, ScenarioBlock, serialize_config
from .dynamics import IntegratorConfig, PacketState, Trajectory, integrate, rhs_solve
from .errors import ModelValidityWarning
from .fileio import write_grid_csv, write_table_csv, write_trajectory_csv
from .modes import ModeSpec, grid_axes, probability_current, radial_profile_maxima, ring_peak_radius, sample_mode
from .units import DIMENSIONLESS, UnitSystem, make_uniform_B, make_uniform_E

__all__ = [
    "ScenarioSpec",
    "SCENARIO_KEYS",
    "worker_count",
    "run_fig1",
    "run_fig2",
    "run_magnetic_drift",
    "run_helicity_watch",
    "run_berry_loop",
    "run_scenario",
    "current_arrows",
]

SCENARIO_KEYS = {
    "fig1_density": ("l_values", "m_radial", "grid_n"),
    "fig2_hall_fan": ("l_values", "E0", "p0", "t_final"),
    "magnetic_drift": ("g_values", "l", "B0", "p0", "periods"),
    "helicity_watch": ("g_values", "l", "B0", "p0", "periods", "tilt"),
    "berry_loop": ("l", "B0", "p0", "tilt"),
}


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    parameters: dict = field(default_factory=dict)
    output_dir: str = "."

    def __post_init__(self):
        if self.kind not in SCENARIO_KEYS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        allowed = SCENARIO_KEYS[self.kind]
        extra = sorted(set(self.parameters) - set(allowed))
        if extra:
            raise ValueError(f"unknown parameter(s) for {self.kind}: {', '.join(extra)}")

    @classmethod
    def from_block(cls, block: ScenarioBlock, output_dir=".") -> "ScenarioSpec":
        return cls(block.kind, {k: getattr(block, k) for k in SCENARIO_KEYS[block.kind]}, str(output_dir))


def worker_count() -> int:
    env = os.environ.get("VORTEXPACKET_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _map(fn, items):
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- density and current maps ----------------------------------------------

@dataclass
class Fig1Entry:
    l: int
    spec: ModeSpec
    grid: object
    current: object
    ring_radius: float
    predicted_radius: float
    rings: int
    mean_azimuthal_current: float


def run_fig1(l_values=(0, 1, 2, 3), m_radial=0, grid_n=128, units: UnitSystem = DIMENSIONLESS,
             p_central=1.0, waist=None):
    """Density maps and probability currents of LG modes at ``tau = 0``.

    ``predicted_radius`` is ``w0 sqrt(|l|/2)``, the innermost-ring radius of
    an ``m = 0`` mode.
    """

    def one(l):
        spec = ModeSpec(l=l, m_radial=m_radial, waist=waist, p_central=p_central, units=units)
        grid = sample_mode(spec, grid_n)
        cur = probability_current(spec, grid)
        _, X, Y = grid_axes(grid_n, grid.extent)
        r = np.hypot(X, Y)
        with np.errstate(invalid="ignore", divide="ignore"):
            j_phi = np.where(r > 0, (X * cur.exact[1] - Y * cur.exact[0]) / r, 0.0)
        mean_jphi = float(np.sum(j_phi * cur.density) / np.sum(cur.density))
        return Fig1Entry(
            l, spec, grid, cur,
            ring_peak_radius(spec),
            spec.waist * math.sqrt(abs(l) / 2.0),
            len(radial_profile_maxima(spec)),
            mean_jphi,
        )

    return _map(one, l_values)


# -- OAM Hall fan in a uniform electric field ------------------------------

@dataclass
class Fig2Result:
    trajectories: dict
    table: list  # rows (l, shift, asymptotic, finite_time)
    E0: float
    p0: float
    t_final: float


def hall_shift_prediction(l, p0, a_t, units: UnitSystem = DIMENSIONLESS):
    """Transverse shift ``sign(e) hbar l/p0 * a t / sqrt(p0^2 + a^2 t^2)``.

    ``a_t = |e| E t``; for ``E = E e_y`` and ``p0 = p0 e_z`` the shift is
    along ``x``.
    """
    sgn = math.copysign(1.0, units.charge)
    return sgn * units.hbar * l / p0 * a_t / math.sqrt(p0**2 + a_t**2)


def run_fig2(l_values=(-3, -2, -1, 0, 1, 2, 3), E0=0.02, p0=1.0, t_final=None,
             units: UnitSystem = DIMENSIONLESS, method="dop853", rtol=1e-11):
    """Center trajectories in ``E = E0 e_y`` from ``r0 = 0``, ``p0 e_z``.

    ``t_final`` defaults to ``100 p0 / (|e| E0)``.
    """
    if not p0 > 0:
        raise ValueError("p0 must be positive")
    t_final = 100.0 * p0 / (abs(units.charge) * E0) if t_final is None else t_final
    cfg = make_uniform_E([0.0, E0, 0.0], units=units)
    icfg = IntegratorConfig(method=method, rtol=rtol, atol=1e-14, t_final=t_final)

    def one(l):
        st = PacketState.initial([0, 0, 0], [0, 0, p0], l)
        return integrate(st, cfg, ZeemanParams(l, cfg.g_factor, units), icfg)

    trajs = dict(zip(l_values, _map(one, l_values)))
    base = trajs[0] if 0 in trajs else one(0)
    a_t = abs(units.charge) * E0 * t_final
    table = []
    for l in l_values:
        shift = float(trajs[l].r[-1, 0] - base.r[-1, 0])
        asym = math.copysign(1.0, units.charge) * units.hbar * l / p0
        table.append((l, shift, asym, hall_shift_prediction(l, p0, a_t, units)))
    return Fig2Result(trajs, table, E0, p0, t_final)


# -- magnetic drift ----------------------------------------------------------

@dataclass
class DriftRow:
    g: float
    l: int
    measured: float
    predicted: float
    trajectory: Trajectory


def drift_prediction(g, l, B0, p0, units: UnitSystem = DIMENSIONLESS):
    """``e hbar l (1 - g/2) B0 / (m p0)``."""
    return units.charge * units.hbar * l * (1.0 - g / 2.0) * B0 / (units.mass * p0)


def run_magnetic_drift(g_values=(0.0, 1.0, 2.0), l=1, B0=1.0, p0=1.0, periods=20.0,
                       units: UnitSystem = DIMENSIONLESS, method="dop853", rtol=1e-10):
    """Mean velocity along ``B = B0 e_z`` for ``p0 e_x``, per g."""
    if not B0 > 0:
        raise ValueError("B0 must be positive")
    period = 2 * math.pi * units.mass / (abs(units.charge) * B0)
    icfg = IntegratorConfig(method=method, rtol=rtol, atol=1e-14, t_final=periods * period)

    def one(g):
        cfg = make_uniform_B([0.0, 0.0, B0], g_factor=g, units=units)
        st = PacketState.initial([0, 0, 0], [p0, 0, 0], l)
        tr = integrate(st, cfg, ZeemanParams(l, g, units), icfg)
        measured = float((tr.r[-1, 2] - tr.r[0, 2]) / (tr.t[-1] - tr.t[0]))
        return DriftRow(g, l, measured, drift_prediction(g, l, B0, p0, units), tr)

    return _map(one, g_values)


# -- helicity watch ----------------------------------------------------------

@dataclass
class HelicityRow:
    g: float
    l: int
    max_deviation: float
    warned: bool
    warn_time: float
    trajectory: Trajectory


def run_helicity_watch(g_values=(2.0, 1.0), l=1, B0=1.0, p0=1.0, periods=10.0, tilt=0.3,
                       units: UnitSystem = DIMENSIONLESS, method="dop853", rtol=1e-12):
    """Precessing-OAM runs in ``B = B0 e_z``; ``tilt`` lifts ``p0`` out of the
    plane normal to B (radians)."""
    period = 2 * math.pi * units.mass / (abs(units.charge) * B0) if B0 else 1.0
    icfg = IntegratorConfig(method=method, rtol=rtol, atol=1e-15, t_final=periods * period,
                            oam_model="precessing")
    p_init = p0 * np.array([math.cos(tilt), 0.0, math.sin(tilt)])

    def one(g):
        cfg = make_uniform_B([0.0, 0.0, B0], g_factor=g, units=units)
        st = PacketState.initial([0, 0, 0], p_init, l)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ModelValidityWarning)
            tr = integrate(st, cfg, ZeemanParams(l, g, units), icfg)
        warn_t = next((ev[1] for ev in tr.events if ev[0] == "model_validity"), math.nan)
        return HelicityRow(g, l, float(np.abs(tr.helicity - l).max()), tr.warned, float(warn_t), tr)

    return _map(one, g_values)


# -- closed Berry loop -------------------------------------------------------

@dataclass
class BerryLoopResult:
    l: int
    theta_berry: float
    solid_angle_phase: float
    line_integral_phase: float
    cone_phase: float
    trajectory: Trajectory


def run_berry_loop(l=1, B0=1.0, p0=1.0, tilt=0.3, units: UnitSystem = DIMENSIONLESS, steps=2000):
    """One full cyclotron turn of the momentum around ``B = B0 e_z``.

    ``p`` starts at angle ``pi/2 - tilt`` from B and sweeps a cone, whose
    solid angle ``2 pi (1 - cos alpha)`` gives the reference phase.  The
    integrated Berry phase is compared with it and with
    :func:`berry_phase_loop` on the sampled momenta.
    """
    cfg = make_uniform_B([0.0, 0.0, B0], units=units)
    zp = ZeemanParams(l, cfg.g_factor, units)
    p_init = p0 * np.array([math.cos(tilt), 0.0, math.sin(tilt)])
    st = PacketState.initial([0, 0, 0], p_init, l)
    _, pdot = rhs_solve(st, cfg, zp)
    p_perp = math.hypot(p_init[0], p_init[1])
    omega = float(np.linalg.norm(pdot)) / p_perp
    period = 2 * math.pi / omega
    icfg = IntegratorConfig(method="rk4", step=period / steps, t_final=period)
    tr = integrate(st, cfg, zp, icfg)
    pts = tr.p.copy()
    pts[-1] = pts[0]
    loop = berry_phase_loop(MomentumPath(pts), l)
    alpha = math.acos(p_init[2] / p0)
    # e < 0 rotates p counter-clockwise about B
    orient = -math.copysign(1.0, units.charge)
    cone = -l * orient * 2 * math.pi * (1 - math.cos(alpha))
    return BerryLoopResult(l, float(tr.theta[-1, 2] - tr.theta[0, 2]), loop.solid_angle,
                           loop.line_integral, cone, tr)


# -- harness -----------------------------------------------------------------

def _version():
    from . import __version__
    return __version__


def _write_manifest(out: Path, cfg_text: str, kind: str, gauge_labels, files):
    digest = hashlib.sha256(cfg_text.encode("utf-8")).hexdigest()
    lines = [
        f"tool = vortexpacket {_version()}",
        f"kind = {kind}",
        f"config_sha256 = {digest}",
        f"gauge_labels = {', '.join(sorted(set(gauge_labels)))}",
        "files = " + ", ".join(sorted(files)),
    ]
    (out / "manifest").write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_scenario(cfg: RunConfig, out_dir, kind=None) -> list:
    """Run the scenario described by ``cfg.scenario`` and write its outputs.

    Returns the list of written file names (manifest excluded).
    """
    from dataclasses import replace

    block = cfg.scenario if kind is None else replace(cfg.scenario, kind=kind)
    spec = ScenarioSpec.from_block(block, out_dir)
    prm = spec.parameters
    units = cfg.unit_system()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files, gauges = [], []

    def tname(name):
        files.append(name)
        return out / name

    if spec.kind == "fig1_density":
        entries = run_fig1(prm["l_values"], prm["m_radial"], prm["grid_n"], units)
        rows = []
        for e in entries:
            tag = f"l{e.l:+d}".replace("+", "p").replace("-", "m")
            write_grid_csv(e.grid, tname(f"fig1_{tag}.csv"), e.current)
            arrows = current_arrows(e.grid, e.current)
            svg.save(svg.heatmap(e.current.density, e.grid.extent, f"density, l = {e.l}", arrows),
                     tname(f"fig1_{tag}.svg"))
            rows.append((str(e.l), e.ring_radius, e.predicted_radius, str(e.rings), e.mean_azimuthal_current))
        write_table_csv(tname("fig1_rings.csv"), ("l", "ring_radius", "predicted_radius", "rings", "mean_j_phi"), rows)
        gauges.append("n/a")
    elif spec.kind == "fig2_hall_fan":
        res = run_fig2(prm["l_values"], prm["E0"], prm["p0"], prm["t_final"], units)
        for l, tr in res.trajectories.items():
            write_trajectory_csv(tr, tname(f"fig2_l{l:+d}.csv".replace("+", "p").replace("-", "m")))
            gauges.append(tr.gauge_label)
        write_table_csv(tname("fig2_shift.csv"), ("l", "shift_x", "asymptotic", "finite_time"),
                        [(str(r[0]),) + r[1:] for r in res.table])
        series = [(f"l={l}", tr.r[:, 2], tr.r[:, 0]) for l, tr in res.trajectories.items()]
        svg.save(svg.line_plot(series, "OAM Hall fan", "z", "x"), tname("fig2_fan.svg"))
    elif spec.kind == "magnetic_drift":
        rows = run_magnetic_drift(prm["g_values"], prm["l"], prm["B0"], prm["p0"], prm["periods"], units)
        write_table_csv(tname("drift.csv"), ("g", "l", "measured", "predicted"),
                        [(r.g, str(r.l), r.measured, r.predicted) for r in rows])
        for r in rows:
            write_trajectory_csv(r.trajectory, tname(f"drift_g{r.g:g}.csv"))
            gauges.append(r.trajectory.gauge_label)
        series = [(f"g={r.g:g}", r.trajectory.t, r.trajectory.r[:, 2]) for r in rows]
        svg.save(svg.line_plot(series, "drift along B", "t", "z"), tname("drift.svg"))
    elif spec.kind == "helicity_watch":
        rows = run_helicity_watch(prm["g_values"], prm["l"], prm["B0"], prm["p0"], prm["periods"], prm["tilt"], units)
        write_table_csv(tname("helicity.csv"), ("g", "l", "max_deviation", "warned", "warn_time"),
                        [(r.g, str(r.l), r.max_deviation, str(r.warned).lower(), r.warn_time) for r in rows])
        for r in rows:
            write_trajectory_csv(r.trajectory, tname(f"helicity_g{r.g:g}.csv"))
            gauges.append(r.trajectory.gauge_label)
        series = [(f"g={r.g:g}", r.trajectory.t, r.trajectory.helicity) for r in rows]
        svg.save(svg.line_plot(series, "helicity l.p/|p|", "t", "helicity"), tname("helicity.svg"))
    elif spec.kind == "berry_loop":
        res = run_berry_loop(prm["l"], prm["B0"], prm["p0"], prm["tilt"], units)
        write_table_csv(tname("berry_loop.csv"),
                        ("l", "theta_berry", "solid_angle_phase", "line_integral_phase", "cone_phase"),
                        [(str(res.l), res.theta_berry, res.solid_angle_phase, res.line_integral_phase, res.cone_phase)])
        write_trajectory_csv(res.trajectory, tname("berry_loop_trajectory.csv"))
        gauges.append(res.trajectory.gauge_label)
        tr = res.trajectory
        svg.save(svg.line_plot([("p_y vs p_x", tr.p[:, 0], tr.p[:, 1])], "momentum loop", "p_x", "p_y"),
                 tname("berry_loop.svg"))
    _write_manifest(out, serialize_config(cfg), spec.kind, gauges, files)
    return files


def current_arrows(grid, current, count=16, span=None):
    """Quiver data ``(x, y, dx, dy)`` for the transverse current.

    Arrows sit on a ``count x count`` lattice over ``[-span, span]^2``
    (default: the region holding 99.9% of the density) and are scaled so
    the longest is 8% of ``span``; weak ones are dropped.
    """
    x, X, Y = grid_axes(grid.grid_n, grid.extent)
    jx, jy = current.exact[0], current.exact[1]
    if span is None:
        rho = current.density
        r = np.hypot(X, Y).ravel()
        order = np.argsort(r)
        cum = np.cumsum(rho.ravel()[order])
        span = float(r[order][np.searchsorted(cum, 0.999 * cum[-1])])
    pick = np.linspace(-span, span, count)
    idx = np.clip(np.round((pick + grid.extent) / grid.dx).astype(int), 0, grid.grid_n - 1)
    jmax = float(np.hypot(jx, jy).max()) or 1.0
    scale = 0.08 * span / jmax
    arrows = []
    for a in idx:
        for b in idx:
            if math.hypot(jx[a, b], jy[a, b]) < 0.05 * jmax:
                continue
            arrows.append((x[a], x[b], jx[a, b] * scale, jy[a, b] * scale))
    return arrows
