"""Momentum-space monopole geometry and the Zeeman energy of the intrinsic OAM.

The Berry curvature of the unit-charge mode is ``-p/|p|^3``; a mode with
vortex strength ``l`` carries ``l`` times that.  The connection is fixed in
the gauge whose Dirac string runs along the negative ``p_z`` axis::

    A(p) = -(1 - cos theta)/(p sin theta) e_phi = (p_y, -p_x, 0) / (p (p + p_z))
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GaugeStringError, GaugeWarning, SingularityError
from .units import DIMENSIONLESS, FieldConfig, UnitSystem, eval_fields

__all__ = [
    "P_MIN",
    "GAUGE_LABEL",
    "MomentumPath",
    "ZeemanParams",
    "BerryPhase",
    "berry_curvature",
    "berry_connection",
    "string_distance",
    "triangle_solid_angle",
    "loop_solid_angle",
    "connection_line_integral",
    "berry_phase_loop",
    "zeeman_energy",
    "zeeman_gradients",
]

P_MIN = 1e-9
GAUGE_LABEL = "monopole-south-string"

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _norm(p, p_min=P_MIN):
    p = np.asarray(p, dtype=float)
    pn = float(np.linalg.norm(p))
    if not pn > p_min:
        raise SingularityError(f"|p| = {pn:.3g} is at the monopole (p_min = {p_min:g})")
    return p, pn


def berry_curvature(p, p_min=P_MIN):
    """Monopole curvature ``-p/|p|^3`` of the unit-charge mode.

    Vectorized over leading axes; the last axis holds the components.
    """
    p = np.asarray(p, dtype=float)
    pn = np.linalg.norm(p, axis=-1, keepdims=True)
    if not np.all(pn > p_min):
        raise SingularityError(f"|p| = {float(pn.min()):.3g} is at the monopole (p_min = {p_min:g})")
    return -p / pn**3


def string_distance(p) -> float:
    """Distance of ``p`` from the Dirac string (inf on the upper half-space)."""
    p = np.asarray(p, dtype=float)
    if p[2] > 0:
        return math.inf
    return float(math.hypot(p[0], p[1]))


def berry_connection(p, p_min=P_MIN):
    """Berry connection of the unit-charge mode in the south-string gauge."""
    p, pn = _norm(p, p_min)
    if string_distance(p) < p_min:
        raise GaugeStringError(
            "p lies on the Dirac string of the fixed gauge; use the solid-angle "
            "(loop) Berry phase instead"
        )
    return np.array([p[1], -p[0], 0.0]) / (pn * (pn + p[2]))


@dataclass(frozen=True)
class MomentumPath:
    points: np.ndarray
    closed: bool = True
    p_min: float = P_MIN

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 2:
            raise ValueError("a momentum path needs at least two 3-vectors")
        norms = np.linalg.norm(pts, axis=1)
        if np.any(norms <= self.p_min):
            raise SingularityError("momentum path touches the monopole at p = 0")
        if self.closed and not np.allclose(pts[0], pts[-1], rtol=0, atol=1e-12 * norms.max()):
            raise ValueError("closed path must end at its first point")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def loop(cls, points, **kw) -> "MomentumPath":
        """Close ``points`` by appending the first one."""
        pts = np.asarray(points, dtype=float)
        return cls(np.vstack([pts, pts[:1]]), closed=True, **kw)

    def reversed(self) -> "MomentumPath":
        return MomentumPath(self.points[::-1], self.closed, self.p_min)


class BerryPhase(NamedTuple):
    phase: float
    line_integral: float
    solid_angle: float
    method: str
    gauge_label: str


def triangle_solid_angle(a, b, c):
    """Signed solid angle of the geodesic triangle through unit vectors a, b, c.

    Vectorized over leading axes.
    """
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = 1.0 + np.einsum("...i,...i->...", a, b) + np.einsum("...i,...i->...", b, c) + np.einsum("...i,...i->...", c, a)
    return 2.0 * np.arctan2(num, den)


def _reference_direction(unit_pts):
    mean = unit_pts.mean(axis=0)
    mn = np.linalg.norm(mean)
    if mn > 0.1:
        return mean / mn
    # balanced loop: use whichever pole the path keeps away from
    for ref in (np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0]), np.array([1.0, 0.0, 0.0])):
        if np.min(unit_pts @ ref) > -1.0 + 1e-6:
            return ref
    return np.array([0.0, 1.0, 0.0])


def loop_solid_angle(points) -> float:
    """Solid angle of the closed geodesic polygon traced by ``p/|p|``.

    Sum of signed spherical triangles fanned from a reference direction;
    defined modulo 4 pi, positive for counter-clockwise loops seen from
    outside.
    """
    pts = np.asarray(points, dtype=float)
    u = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    ref = _reference_direction(u[:-1])
    a, b = u[:-1], u[1:]
    return float(np.sum(triangle_solid_angle(np.broadcast_to(ref, a.shape), a, b)))


def _segment_string_clearance(a, b):
    """Minimum distance from the chord a->b to the origin or the negative p_z axis."""
    d = b - a
    dd = d[0] ** 2 + d[1] ** 2
    cands = [0.0, 1.0]
    if dd > 0:
        cands.append(-(a[0] * d[0] + a[1] * d[1]) / dd)
    if d[2] != 0:
        cands.append(-a[2] / d[2])
    full = float(d @ d)
    if full > 0:
        cands.append(-float(a @ d) / full)
    best = math.inf
    for t in cands:
        q = a + min(max(t, 0.0), 1.0) * d
        best = min(best, string_distance(q), float(np.linalg.norm(q)))
    return best


def _chord_integral(a, b, depth=0):
    length = float(np.linalg.norm(b - a))
    if length == 0.0:
        return 0.0
    clearance = _segment_string_clearance(a, b)
    if clearance < P_MIN:
        raise GaugeStringError("path crosses the Dirac string or the monopole")
    if length > clearance and depth < 40:
        mid = 0.5 * (a + b)
        return _chord_integral(a, mid, depth + 1) + _chord_integral(mid, b, depth + 1)
    s = 0.5 * (_GL_NODES + 1.0)
    q = a[None, :] + s[:, None] * (b - a)[None, :]
    qn = np.linalg.norm(q, axis=1)
    conn = np.stack([q[:, 1], -q[:, 0], np.zeros(len(q))], axis=1) / (qn * (qn + q[:, 2]))[:, None]
    return float(0.5 * np.sum(_GL_WEIGHTS * (conn @ (b - a))))


def connection_line_integral(points) -> float:
    """``sum over chords of int A . dp`` by Gauss-Legendre quadrature.

    Chords are subdivided until each piece is shorter than its distance to
    the Dirac string.
    """
    pts = np.asarray(points, dtype=float)
    return float(sum(_chord_integral(pts[k], pts[k + 1]) for k in range(len(pts) - 1)))


def _wrap(x):
    return (x + math.pi) % (2.0 * math.pi) - math.pi


def berry_phase_loop(path: MomentumPath, l: int) -> BerryPhase:
    """Berry phase ``l * oint A . dp`` of a momentum-space loop.

    Computed both as a connection line integral and as ``-l * solid angle``;
    the solid-angle value is returned as ``phase`` whenever the path is
    closed.  Near the Dirac string only the solid angle is used.  Open paths
    give the gauge-dependent line integral and a :class:`GaugeWarning`.
    """
    if l == 0:
        return BerryPhase(0.0, 0.0, 0.0, "trivial", GAUGE_LABEL)
    try:
        line = l * connection_line_integral(path.points)
    except GaugeStringError:
        if not path.closed:
            raise
        line = math.nan
    if not path.closed:
        warnings.warn("Berry phase of an open path depends on the gauge", GaugeWarning, stacklevel=2)
        return BerryPhase(line, line, math.nan, "line_integral", GAUGE_LABEL)
    solid = -l * loop_solid_angle(path.points)
    if math.isnan(line):
        return BerryPhase(solid, line, solid, "solid_angle", GAUGE_LABEL)
    gap = abs(_wrap(line - solid))
    if gap > 1e-8:
        warnings.warn(f"line-integral and solid-angle Berry phases differ by {gap:.3g} rad", RuntimeWarning, stacklevel=2)
    return BerryPhase(solid, line, solid, "solid_angle", GAUGE_LABEL)


@dataclass(frozen=True)
class ZeemanParams:
    l_strength: int
    g_factor: float = 1.0
    units: UnitSystem = DIMENSIONLESS

    @property
    def mu_B(self) -> float:
        return self.units.mu_B

    @classmethod
    def from_field(cls, cfg: FieldConfig, l: int) -> "ZeemanParams":
        return cls(int(l), cfg.g_factor, cfg.units)


def zeeman_energy(zp: ZeemanParams, l_vec, B) -> float:
    """``Delta = -g mu_B l . B``."""
    return -zp.g_factor * zp.mu_B * float(np.dot(l_vec, B))


def zeeman_gradients(zp: ZeemanParams, r, p, cfg: FieldConfig, p_min=P_MIN):
    """Gradients of ``Delta`` with the OAM slaved to ``l * p/|p|``.

    Returns ``(dDelta/dr, dDelta/dp)``.
    """
    p, pn = _norm(p, p_min)
    phat = p / pn
    _, B, jac = eval_fields(cfg, r)
    k = -zp.g_factor * zp.mu_B * zp.l_strength
    d_dr = k * (jac.T @ phat)
    d_dp = (k / pn) * (B - (phat @ B) * phat)
    return d_dr, d_dp
