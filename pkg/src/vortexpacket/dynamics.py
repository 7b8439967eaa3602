"""Semiclassical equations of motion of the wave-packet center.

The coupled implicit pair

    p_dot = e E - dDelta/dr + e r_dot x B
    r_dot = p/m + dDelta/dp - hbar l p_dot x Bc,      Bc = -p/|p|^3

is solved exactly at every evaluation.  Substituting the first line into
the second gives ``M r_dot = V0 - hbar l F0 x Bc`` with
``M = D I + hbar l e B Bc^T`` and ``D = 1 - e hbar l B.Bc``; since
``D + hbar l e Bc.B = 1`` the inverse is ``(x - hbar l e B (Bc.x)) / D``.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import integrate as _sp_integrate

from .berry import (
    P_MIN,
    ZeemanParams,
    berry_connection,
    berry_curvature,
    string_distance,
)
from .errors import DegeneracyError, ModelValidityWarning, SingularityError
from .units import FieldConfig, eval_fields

__all__ = [
    "PacketState",
    "IntegratorConfig",
    "Trajectory",
    "TrajectoryAborted",
    "CSV_COLUMNS",
    "D_MIN",
    "rhs_solve",
    "density_factor",
    "hamiltonian",
    "precess_oam",
    "phase_rates",
    "helicity",
    "default_step",
    "integrate",
]

logger = logging.getLogger(__name__)

D_MIN = 1e-6
NORTH = np.array([0.0, 0.0, 1.0])

CSV_COLUMNS = (
    "t", "r_x", "r_y", "r_z", "p_x", "p_y", "p_z", "l_x", "l_y", "l_z",
    "helicity", "theta_dyn", "theta_dirac", "theta_berry", "energy", "D",
)


@dataclass(frozen=True)
class PacketState:
    r: np.ndarray
    p: np.ndarray
    l_vec: np.ndarray
    theta_dyn: float = 0.0
    theta_dirac: float = 0.0
    theta_berry: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        for name in ("r", "p", "l_vec"):
            v = np.array(getattr(self, name), dtype=float).reshape(3)
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        if not np.linalg.norm(self.p) > P_MIN:
            raise SingularityError("initial momentum is at the monopole")

    @classmethod
    def initial(cls, r0, p0, l: int, **kw) -> "PacketState":
        """State with the OAM aligned to the momentum, ``l_vec = l p/|p|``."""
        p0 = np.asarray(p0, dtype=float)
        pn = np.linalg.norm(p0)
        if not pn > P_MIN:
            raise SingularityError("initial momentum is at the monopole")
        return cls(r0, p0, l * p0 / pn, **kw)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.r, self.p, self.l_vec,
                               [self.theta_dyn, self.theta_dirac, self.theta_berry]])

    @classmethod
    def from_vector(cls, y, t) -> "PacketState":
        return cls(y[0:3], y[3:6], y[6:9], float(y[9]), float(y[10]), float(y[11]), float(t))


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk45"
    step: Optional[float] = None
    rtol: float = 1e-10
    atol: float = 1e-12
    oam_model: str = "slaved"
    t_final: float = 10.0
    output_stride: int = 1
    solve: str = "exact"
    warn_angle: float = 1e-3
    string_tol: float = 0.1
    max_steps: int = 10_000_000

    def __post_init__(self):
        if self.method not in ("rk4", "rk45", "dop853"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.oam_model not in ("slaved", "precessing"):
            raise ValueError(f"unknown oam_model {self.oam_model!r}")
        if self.solve not in ("exact", "first_order"):
            raise ValueError(f"unknown solve mode {self.solve!r}")
        if not 1e-12 <= self.rtol <= 1e-3:
            raise ValueError("rtol must lie in [1e-12, 1e-3]")
        if not self.atol > 0:
            raise ValueError("atol must be positive")
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")
        if not self.t_final >= 0:
            raise ValueError("t_final must be non-negative")
        if int(self.output_stride) < 1:
            raise ValueError("output_stride must be >= 1")


class TrajectoryAborted(RuntimeError):
    """Integration stopped at a singular or degenerate point.

    ``trajectory`` holds everything recorded up to the failure.
    """

    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass
class Trajectory:
    """Sampled trajectory; one row per output point in :attr:`data`."""

    data: np.ndarray
    gauge_label: str = ""
    events: list = field(default_factory=list)
    berry_incremental_steps: int = 0

    @property
    def t(self):
        return self.data[:, 0]

    @property
    def r(self):
        return self.data[:, 1:4]

    @property
    def p(self):
        return self.data[:, 4:7]

    @property
    def l_vec(self):
        return self.data[:, 7:10]

    @property
    def helicity(self):
        return self.data[:, 10]

    @property
    def theta(self):
        return self.data[:, 11:14]

    @property
    def energy(self):
        return self.data[:, 14]

    @property
    def D(self):
        return self.data[:, 15]

    @property
    def warned(self) -> bool:
        return any(kind == "model_validity" for kind, *_ in self.events)

    def __len__(self):
        return len(self.data)

    def state(self, i) -> PacketState:
        row = self.data[i]
        return PacketState(row[1:4], row[4:7], row[7:10], row[11], row[12], row[13], row[0])

    @property
    def states(self):
        return [self.state(i) for i in range(len(self))]


def _cross(a, b):
    return np.array([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])


def density_factor(p, l, B, cfg: FieldConfig) -> float:
    """``D = 1 - e hbar l B . Bc(p)``."""
    if l == 0:
        return 1.0
    u = cfg.units
    return 1.0 - u.charge * u.hbar * l * float(np.dot(B, berry_curvature(p)))


def _slaved_zeeman(zp, p, pn, B, jac):
    phat = p / pn
    k = -zp.g_factor * zp.mu_B * zp.l_strength
    return k * float(phat @ B), k * (jac.T @ phat), (k / pn) * (B - (phat @ B) * phat)


def _solve(r, p, cfg, zp, solve="exact", fields=None):
    """Return ``(r_dot, p_dot, E, B, D, Delta)`` at ``(r, p)``."""
    pn = math.sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])
    if not pn > P_MIN:
        raise SingularityError(f"|p| = {pn:.3g} reached the monopole")
    u = cfg.units
    e, hbar, mass = u.charge, u.hbar, u.mass
    E, B, jac = fields if fields is not None else eval_fields(cfg, r)
    l = zp.l_strength
    if l != 0:
        delta, ddr, ddp = _slaved_zeeman(zp, p, pn, B, jac)
    else:
        delta, ddr, ddp = 0.0, np.zeros(3), np.zeros(3)
    F0 = e * E - ddr
    V0 = p / mass + ddp
    if l == 0:
        v = V0
        return v, F0 + e * _cross(v, B), E, B, 1.0, delta
    hl = hbar * l
    curv = -p / pn**3
    D = 1.0 - e * hl * float(B @ curv)
    if abs(D) <= D_MIN:
        raise DegeneracyError(f"phase-space factor D = {D:.3g} is degenerate")
    rhs = V0 - hl * _cross(F0, curv)
    if solve == "exact":
        v = (rhs - hl * e * B * float(curv @ rhs)) / D
    else:
        # first order in hbar: the Berry term uses the zeroth-order force
        pdot0 = F0 + e * _cross(V0, B)
        v = V0 - hl * _cross(pdot0, curv)
    return v, F0 + e * _cross(v, B), E, B, D, delta


def rhs_solve(state: PacketState, cfg: FieldConfig, zp: ZeemanParams, solve="exact"):
    """Velocity and force ``(r_dot, p_dot)`` at ``state``.

    Raises :class:`DegeneracyError` when ``|D| <= 1e-6`` and
    :class:`SingularityError` near ``p = 0``.
    """
    v, pdot, *_ = _solve(state.r, state.p, cfg, zp, solve)
    return v, pdot


def hamiltonian(r, p, cfg: FieldConfig, zp: ZeemanParams) -> float:
    """``H = p^2/2m + e Phi + Delta`` with the OAM slaved to ``l p/|p|``."""
    p = np.asarray(p, dtype=float)
    pn = float(np.linalg.norm(p))
    u = cfg.units
    _, B, _ = eval_fields(cfg, r)
    delta = -zp.g_factor * zp.mu_B * zp.l_strength * float(p @ B) / pn
    return float(p @ p) / (2 * u.mass) + u.charge * float(cfg.scalar_potential(np.asarray(r, float))) + delta


def precess_oam(state: PacketState, cfg: FieldConfig):
    """Precession rate of the intrinsic OAM.

    ``l_dot = -((g/2)(e/m) B + e E x p / p^2) x l``.  At ``g = 2`` this is
    the precession compatible with the center dynamics, which keeps the
    helicity ``l.p/|p|`` constant; at other ``g`` the magnetic term is the
    Larmor rate of the moment ``g mu_B l``.
    """
    p = state.p
    pn2 = float(p @ p)
    if not math.sqrt(pn2) > P_MIN:
        raise SingularityError("precession undefined at p = 0")
    u = cfg.units
    E, B, _ = eval_fields(cfg, state.r)
    omega = 0.5 * cfg.g_factor * (u.charge / u.mass) * B + u.charge * _cross(E, p) / pn2
    return -_cross(omega, state.l_vec)


def phase_rates(state: PacketState, r_dot, p_dot, cfg: FieldConfig, zp: ZeemanParams):
    """Rates of the dynamical, Dirac and Berry phases.

    The Berry rate uses the south-string gauge and is ``nan`` on the
    string; :func:`integrate` then switches to incremental solid angles.
    """
    u = cfg.units
    r = np.asarray(state.r, float)
    H = hamiltonian(r, state.p, cfg, zp)
    d_dyn = (float(state.p @ r_dot) - H) / u.hbar
    d_dirac = u.charge * float(np.asarray(cfg.vector_potential(r)) @ r_dot) / u.hbar
    if zp.l_strength == 0:
        d_berry = 0.0
    elif string_distance(state.p) <= P_MIN:
        d_berry = math.nan
    else:
        d_berry = zp.l_strength * float(berry_connection(state.p) @ p_dot)
    return d_dyn, d_dirac, d_berry


def helicity(state: PacketState) -> float:
    pn = float(np.linalg.norm(state.p))
    if not pn > P_MIN:
        raise SingularityError("helicity undefined at p = 0")
    return float(state.l_vec @ state.p) / pn


def default_step(state: PacketState, cfg: FieldConfig) -> float:
    """1/200 of the shorter of the cyclotron period and ``|p0| / |e E|``."""
    u = cfg.units
    E, B, _ = eval_fields(cfg, state.r)
    scales = []
    bn = float(np.linalg.norm(B))
    en = float(np.linalg.norm(E))
    if bn > 0:
        scales.append(2 * math.pi * u.mass / (abs(u.charge) * bn))
    if en > 0:
        scales.append(float(np.linalg.norm(state.p)) / (abs(u.charge) * en))
    if not scales:
        scales.append(u.mass * max(1.0, float(np.linalg.norm(state.r))) / float(np.linalg.norm(state.p)))
    return min(scales) / 200.0


class _System:
    """Right-hand side of the full ODE state ``(r, p, l_vec, thetas)``."""

    def __init__(self, cfg, zp, icfg):
        self.cfg, self.zp, self.icfg = cfg, zp, icfg
        u = cfg.units
        self.e, self.hbar, self.mass = u.charge, u.hbar, u.mass
        self.precessing = icfg.oam_model == "precessing"
        self.uniform = eval_fields(cfg, np.zeros(3)) if cfg.is_uniform else None

    def near_string(self, p) -> bool:
        return self.zp.l_strength != 0 and string_distance(p) < self.icfg.string_tol * float(np.linalg.norm(p))

    def __call__(self, t, y):
        r, p, lv = y[0:3], y[3:6], y[6:9]
        cfg, zp = self.cfg, self.zp
        v, pdot, E, B, D, delta = _solve(r, p, cfg, zp, self.icfg.solve, self.uniform)
        out = np.empty(12)
        out[0:3] = v
        out[3:6] = pdot
        if self.precessing:
            pn2 = float(p @ p)
            omega = 0.5 * cfg.g_factor * (self.e / self.mass) * B + self.e * _cross(E, p) / pn2
            out[6:9] = -_cross(omega, lv)
        else:
            out[6:9] = 0.0
        if self.uniform is not None:
            phi = -float(E @ r)
            A = 0.5 * _cross(B, r)
        else:
            phi = float(cfg.scalar_potential(r))
            A = np.asarray(cfg.vector_potential(r), dtype=float)
        H = float(p @ p) / (2 * self.mass) + self.e * phi + delta
        out[9] = (float(p @ v) - H) / self.hbar
        out[10] = self.e * float(A @ v) / self.hbar
        l = zp.l_strength
        if l == 0 or self.near_string(p):
            out[11] = 0.0
        else:
            pn = math.sqrt(float(p @ p))
            out[11] = l * (p[1] * pdot[0] - p[0] * pdot[1]) / (pn * (pn + p[2]))
        return out

    def diagnostics(self, t, y):
        r, p, lv = y[0:3], y[3:6], y[6:9]
        pn = float(np.linalg.norm(p))
        _, B, _ = eval_fields(self.cfg, r)
        D = density_factor(p, self.zp.l_strength, B, self.cfg)
        H = hamiltonian(r, p, self.cfg, self.zp)
        return np.concatenate([[t], y[0:9], [float(lv @ p) / pn], y[9:12], [H, D]])


def _arc_solid_angle(pa, pb, da, db, h, pieces=16):
    """Solid angle swept from the north pole by the cubic Hermite arc between
    momenta ``pa`` and ``pb`` with end derivatives ``da``, ``db``."""
    s = np.linspace(0.0, 1.0, pieces + 1)[:, None]
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    pts = h00 * pa + h10 * h * da + h01 * pb + h11 * h * db
    u = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    a, b = u[:-1], u[1:]
    num = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    # 1 + N.a + a.b + b.N == (a + N).(b + N); this form keeps its accuracy
    # when a and b sit next to the south pole
    an, bn = a + NORTH, b + NORTH
    den = np.einsum("ij,ij->i", an, bn)
    return float(np.sum(2.0 * np.arctan2(num, den)))


def _misalignment(lv, p, l):
    ln = float(np.linalg.norm(lv))
    if l == 0 or ln == 0:
        return 0.0
    target = math.copysign(1.0, l) * p / float(np.linalg.norm(p))
    c = float(np.clip(lv @ target / ln, -1.0, 1.0))
    return math.acos(c)


def _rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(state0: PacketState, cfg: FieldConfig, zp: ZeemanParams,
              icfg: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """Integrate the center motion, OAM and accumulated phases to ``t_final``.

    Fixed-step RK4 (``method="rk4"``) or adaptive Dormand-Prince
    (``"rk45"``/``"dop853"``).  In the slaved model ``l_vec`` is reset to
    ``l p/|p|`` after every step.  In the precessing model a
    :class:`ModelValidityWarning` is emitted once when ``g != 2``, ``B != 0``
    and the OAM leaves the momentum direction by more than ``warn_angle``.
    """
    sysf = _System(cfg, zp, icfg)
    l = zp.l_strength
    slaved = icfg.oam_model == "slaved"
    y = state0.as_vector()
    if slaved:
        y[6:9] = l * y[3:6] / np.linalg.norm(y[3:6])
    t = float(state0.t)
    t_end = t + icfg.t_final
    rows = [sysf.diagnostics(t, y)]
    traj = Trajectory(np.empty((0, len(CSV_COLUMNS))), gauge_label=f"{cfg.gauge_label}+berry:south-string")
    check_validity = (not slaved) and cfg.g_factor != 2 and cfg.has_magnetic(state0.r)
    warned = False

    def finish():
        traj.data = np.array(rows)
        return traj

    def post_step(t_old, t_new, y_old, y_new):
        nonlocal warned
        if l != 0 and (sysf.near_string(y_old[3:6]) or sysf.near_string(y_new[3:6])):
            # the south-string connection vanishes along meridians, so its
            # integral over an arc equals minus the solid angle fanned from N
            da = sysf(t_old, y_old)[3:6]
            db = sysf(t_new, y_new)[3:6]
            y_new[11] = y_old[11] - l * _arc_solid_angle(y_old[3:6], y_new[3:6], da, db, t_new - t_old)
            traj.berry_incremental_steps += 1
        if slaved:
            y_new[6:9] = l * y_new[3:6] / np.linalg.norm(y_new[3:6])
        elif check_validity and not warned:
            angle = _misalignment(y_new[6:9], y_new[3:6], l)
            if angle > icfg.warn_angle:
                warned = True
                traj.events.append(("model_validity", t_new, angle))
                warnings.warn(
                    f"OAM misaligned with momentum by {angle:.3g} rad at t = {t_new:.6g} "
                    f"(g = {cfg.g_factor}, B != 0): slaved-OAM assumption broken",
                    ModelValidityWarning,
                    stacklevel=3,
                )
        return y_new

    stride = int(icfg.output_stride)
    nstep = 0
    try:
        if icfg.t_final == 0:
            return finish()
        if icfg.method == "rk4":
            h0 = icfg.step or default_step(state0, cfg)
            n = max(1, int(math.ceil(icfg.t_final / h0 - 1e-9)))
            h = icfg.t_final / n
            for k in range(n):
                y_new = post_step(t, t + h, y, _rk4_step(sysf, t, y, h))
                t = float(state0.t) + (k + 1) * h
                y = y_new
                nstep += 1
                if nstep % stride == 0 or k == n - 1:
                    rows.append(sysf.diagnostics(t, y))
        else:
            cls = _sp_integrate.RK45 if icfg.method == "rk45" else _sp_integrate.DOP853
            kw = {"first_step": icfg.step} if icfg.step else {}
            solver = cls(sysf, t, y, t_end, rtol=icfg.rtol, atol=icfg.atol, **kw)
            while solver.status == "running":
                y_old = solver.y.copy()
                t_old = solver.t
                msg = solver.step()
                if solver.status == "failed":
                    raise RuntimeError(f"integrator failed: {msg}")
                solver.y = post_step(t_old, solver.t, y_old, solver.y.copy())
                nstep += 1
                if nstep > icfg.max_steps:
                    raise RuntimeError("max_steps exceeded")
                if nstep % stride == 0 or solver.status == "finished":
                    rows.append(sysf.diagnostics(solver.t, solver.y))
    except (SingularityError, DegeneracyError) as exc:
        raise TrajectoryAborted(str(exc), finish()) from exc
    return finish()


def with_l(state: PacketState, l: int) -> PacketState:
    """Copy of ``state`` with the OAM re-aligned for vortex strength ``l``."""
    return replace(state, l_vec=l * state.p / np.linalg.norm(state.p))
