"""Deformed symplectic structure and noncanonical Poisson brackets.

Phase-space coordinates are ordered ``X = (r_x, r_y, r_z, p_x, p_y, p_z)``.
The two-form matrix is::

    omega = [[ e eps.B      , -I              ],
             [ I            , hbar l eps.Bc   ]]

with ``(eps.V)_ij = eps_ijk V_k``.  The equations of motion read
``omega X_dot = grad H`` and the bracket table is ``omega^-1``, which gives
``{r_i, p_j} = delta_ij`` in the canonical limit.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .berry import P_MIN, ZeemanParams, berry_curvature, zeeman_gradients
from .errors import DegeneracyError
from .units import FieldConfig, eval_fields

__all__ = [
    "SymplecticFrame",
    "COORD_NAMES",
    "levi_civita_matrix",
    "build_frame",
    "closed_form_brackets",
    "hamiltonian_gradient",
    "hamiltonian_flow",
    "bracket",
    "jacobi_residual",
]

COORD_NAMES = ("r_x", "r_y", "r_z", "p_x", "p_y", "p_z")
D_MIN = 1e-6


def levi_civita_matrix(v):
    """Matrix ``M_ij = eps_ijk v_k``."""
    v = np.asarray(v, dtype=float)
    return np.array([
        [0.0, v[2], -v[1]],
        [-v[2], 0.0, v[0]],
        [v[1], -v[0], 0.0],
    ])


@dataclass(frozen=True)
class SymplecticFrame:
    omega: np.ndarray
    brackets: np.ndarray
    D: float
    B: np.ndarray
    curvature: np.ndarray
    l: int
    condition: float

    @property
    def admissible(self) -> bool:
        return self.D > 0


def _two_form(B, curv, l, units):
    e, hbar = units.charge, units.hbar
    eye = np.eye(3)
    return np.block([
        [e * levi_civita_matrix(B), -eye],
        [eye, hbar * l * levi_civita_matrix(curv)],
    ])


def build_frame(r, p, l: int, cfg: FieldConfig, p_min=P_MIN) -> SymplecticFrame:
    """Assemble the two-form at ``(r, p)`` and invert it.

    Raises :class:`DegeneracyError` if ``|D| <= 1e-6``.  ``D <= 0`` frames
    are returned but flagged through :attr:`SymplecticFrame.admissible`.
    """
    curv = berry_curvature(p, p_min)
    _, B, _ = eval_fields(cfg, r)
    u = cfg.units
    D = 1.0 - u.charge * u.hbar * l * float(B @ curv)
    if abs(D) <= D_MIN:
        raise DegeneracyError(f"symplectic form is degenerate (D = {D:.3g})")
    omega = _two_form(B, curv, l, u)
    brackets = np.linalg.solve(omega, np.eye(6))
    # exact antisymmetrization removes round-off asymmetry
    brackets = 0.5 * (brackets - brackets.T)
    cond = float(np.linalg.cond(omega))
    if cond > 1e8:
        warnings.warn(f"ill-conditioned symplectic form (cond = {cond:.3g})", RuntimeWarning, stacklevel=2)
    det = float(np.linalg.det(omega))
    if abs(np.sqrt(max(det, 0.0)) - abs(D)) > 1e-10 * max(1.0, abs(D)):
        warnings.warn(f"sqrt(det omega) = {np.sqrt(max(det, 0.0)):.12g} differs from |D| = {abs(D):.12g}",
                      RuntimeWarning, stacklevel=2)
    return SymplecticFrame(omega, brackets, D, B, curv, int(l), cond)


def closed_form_brackets(B, curv, l, units) -> np.ndarray:
    """Bracket table from the closed-form expressions, for comparison."""
    e, hbar = units.charge, units.hbar
    B = np.asarray(B, float)
    curv = np.asarray(curv, float)
    D = 1.0 - e * hbar * l * float(B @ curv)
    rr = hbar * l * levi_civita_matrix(curv) / D
    pp = e * levi_civita_matrix(B) / D
    rp = (np.eye(3) - e * hbar * l * np.outer(B, curv)) / D
    return np.block([[rr, rp], [-rp.T, pp]])


def hamiltonian_gradient(r, p, l: int, cfg: FieldConfig, zp: ZeemanParams | None = None):
    """``(dH/dr, dH/dp)`` for ``H = p^2/2m + e Phi + Delta`` as a 6-vector."""
    zp = zp or ZeemanParams.from_field(cfg, l)
    u = cfg.units
    E, _, _ = eval_fields(cfg, r)
    d_dr, d_dp = zeeman_gradients(zp, r, p, cfg)
    p = np.asarray(p, dtype=float)
    return np.concatenate([-u.charge * E + d_dr, p / u.mass + d_dp])


def hamiltonian_flow(frame: SymplecticFrame, grad_H) -> np.ndarray:
    """Solve ``omega X_dot = grad H`` for ``X_dot``."""
    if abs(frame.D) <= D_MIN:
        raise DegeneracyError("degenerate frame")
    return np.linalg.solve(frame.omega, np.asarray(grad_H, dtype=float))


def bracket(frame: SymplecticFrame, i: int, j: int) -> float:
    """Poisson bracket ``{X_i, X_j}``; indices follow :data:`COORD_NAMES`."""
    for k in (i, j):
        if not (isinstance(k, (int, np.integer)) and 0 <= k < 6):
            raise IndexError(f"phase-space index {k!r} out of range 0..5")
    return float(frame.brackets[i, j])


def jacobi_residual(r, p, l, cfg: FieldConfig, h=None) -> float:
    """Largest cyclic sum ``{X_a,{X_b,X_c}} + cyc`` over all index triples.

    Derivatives of the bracket table are taken with a fourth-order central
    stencil in each phase-space direction.
    """
    X0 = np.concatenate([np.asarray(r, float), np.asarray(p, float)])
    if h is None:
        h = 1e-4 * min(1.0, float(np.linalg.norm(p)))

    def table(X):
        return build_frame(X[:3], X[3:], l, cfg).brackets

    G = table(X0)
    dG = np.empty((6, 6, 6))  # dG[d] = d table / d X_d
    for d in range(6):
        step = np.zeros(6)
        step[d] = h
        dG[d] = (-table(X0 + 2 * step) + 8 * table(X0 + step)
                 - 8 * table(X0 - step) + table(X0 - 2 * step)) / (12 * h)
    # {X_a, g_bc} = sum_d G[a, d] dG[d, b, c]
    T = np.einsum("ad,dbc->abc", G, dG)
    J = T + np.transpose(T, (1, 2, 0)) + np.transpose(T, (2, 0, 1))
    return float(np.abs(J).max())
