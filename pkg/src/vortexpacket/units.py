"""Unit system and static electromagnetic field configurations.

All formulas in the package use the *signed* electron charge, so with the
default units ``charge = -1`` and the Bohr magneton ``mu_B = e*hbar/(2m)``
is negative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "UnitSystem",
    "FieldConfig",
    "DIMENSIONLESS",
    "make_free",
    "make_uniform_E",
    "make_uniform_B",
    "make_field",
    "eval_fields",
    "finite_difference_gradient",
    "finite_difference_curl",
    "finite_difference_jacobian",
]

VectorMap = Callable[[np.ndarray], np.ndarray]
ScalarMap = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0
    mass: float = 1.0
    charge: float = -1.0
    speed_of_light: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive and finite, got {val!r}")
        if not (np.isfinite(self.charge) and self.charge != 0):
            raise ValueError(f"charge must be nonzero and finite, got {self.charge!r}")
        if self.speed_of_light != 1.0:
            raise ValueError("speed_of_light is fixed to 1")

    @property
    def mu_B(self) -> float:
        """Bohr magneton e*hbar/(2m) with the signed charge."""
        return self.charge * self.hbar / (2.0 * self.mass)

    def scaled(self, hbar=1.0, mass=1.0, charge=1.0) -> "UnitSystem":
        return UnitSystem(self.hbar * hbar, self.mass * mass, self.charge * charge)


DIMENSIONLESS = UnitSystem()


def _zero_vec(r):
    return np.zeros(3)


def _zero_scalar(r):
    return 0.0


@dataclass(frozen=True)
class FieldConfig:
    """Static electromagnetic environment seen by the wave packet.

    ``kind`` is one of ``"free"``, ``"uniform_e"``, ``"uniform_b"`` or
    ``"custom"``. For the uniform presets ``vector`` holds the constant field
    and Jacobians are analytic; custom maps are differentiated numerically.
    """

    electric: VectorMap = _zero_vec
    magnetic: VectorMap = _zero_vec
    scalar_potential: ScalarMap = _zero_scalar
    vector_potential: VectorMap = _zero_vec
    gauge_label: str = "none"
    g_factor: float = 1.0
    kind: str = "free"
    vector: tuple = (0.0, 0.0, 0.0)
    units: UnitSystem = field(default=DIMENSIONLESS)

    @property
    def is_uniform(self) -> bool:
        return self.kind in ("free", "uniform_e", "uniform_b")

    def has_magnetic(self, r=None) -> bool:
        if self.kind == "uniform_b":
            return bool(np.any(np.asarray(self.vector) != 0))
        if self.kind in ("free", "uniform_e"):
            return False
        r = np.zeros(3) if r is None else r
        return bool(np.any(np.asarray(self.magnetic(np.asarray(r, float))) != 0))


def make_free(g_factor=1.0, units=DIMENSIONLESS) -> FieldConfig:
    return FieldConfig(g_factor=g_factor, kind="free", units=units)


def make_uniform_E(E_vec, g_factor=1.0, units=DIMENSIONLESS) -> FieldConfig:
    """Uniform electric field with ``Phi = -E.r`` and ``A = 0``."""
    E = np.array(E_vec, dtype=float).reshape(3)
    E.setflags(write=False)

    def electric(r):
        return E.copy()

    def scalar_potential(r):
        return -float(E @ np.asarray(r, dtype=float))

    return FieldConfig(
        electric=electric,
        scalar_potential=scalar_potential,
        gauge_label="coulomb",
        g_factor=g_factor,
        kind="uniform_e" if np.any(E != 0) else "free",
        vector=tuple(E),
        units=units,
    )


def make_uniform_B(B_vec, g_factor=1.0, units=DIMENSIONLESS) -> FieldConfig:
    """Uniform magnetic field in the symmetric gauge ``A = (B x r)/2``."""
    B = np.array(B_vec, dtype=float).reshape(3)
    B.setflags(write=False)

    def magnetic(r):
        return B.copy()

    def vector_potential(r):
        return 0.5 * np.array([
            B[1] * r[2] - B[2] * r[1],
            B[2] * r[0] - B[0] * r[2],
            B[0] * r[1] - B[1] * r[0],
        ])

    return FieldConfig(
        magnetic=magnetic,
        vector_potential=vector_potential,
        gauge_label="symmetric",
        g_factor=g_factor,
        kind="uniform_b" if np.any(B != 0) else "free",
        vector=tuple(B),
        units=units,
    )


def make_field(electric=None, magnetic=None, scalar_potential=None,
               vector_potential=None, gauge_label="user", g_factor=1.0,
               units=DIMENSIONLESS) -> FieldConfig:
    """Wrap user-supplied smooth static maps into a :class:`FieldConfig`.

    The maps are trusted to be mutually consistent; use
    :func:`finite_difference_gradient` / :func:`finite_difference_curl`
    to check them.
    """
    return FieldConfig(
        electric=electric or _zero_vec,
        magnetic=magnetic or _zero_vec,
        scalar_potential=scalar_potential or _zero_scalar,
        vector_potential=vector_potential or _zero_vec,
        gauge_label=gauge_label,
        g_factor=g_factor,
        kind="custom",
        units=units,
    )


def _check_point(r):
    r = np.asarray(r, dtype=float).reshape(3)
    if not math.isfinite(r[0] + r[1] + r[2]):
        raise ValueError(f"non-finite position {r!r}")
    return r


def finite_difference_jacobian(fn, r, h=1e-5):
    """Central-difference Jacobian ``J[j, i] = d fn_j / d r_i``."""
    r = np.asarray(r, dtype=float)
    cols = []
    for i in range(3):
        dr = np.zeros(3)
        dr[i] = h
        cols.append((np.asarray(fn(r + dr)) - np.asarray(fn(r - dr))) / (2 * h))
    return np.stack(cols, axis=1)


def finite_difference_gradient(fn, r, h=1e-5):
    r = np.asarray(r, dtype=float)
    g = np.empty(3)
    for i in range(3):
        dr = np.zeros(3)
        dr[i] = h
        g[i] = (fn(r + dr) - fn(r - dr)) / (2 * h)
    return g


def finite_difference_curl(fn, r, h=1e-5):
    J = finite_difference_jacobian(fn, r, h)
    return np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])


def eval_fields(cfg: FieldConfig, r):
    """Return ``(E, B, jacobian_B)`` at position ``r``.

    ``jacobian_B[j, i]`` is ``dB_j/dr_i``; exactly zero for the uniform
    presets, central differences otherwise.
    """
    r = _check_point(r)
    if cfg.is_uniform:
        return _uniform_E(cfg), _uniform_B(cfg), np.zeros((3, 3))
    E = np.asarray(cfg.electric(r), dtype=float).reshape(3)
    B = np.asarray(cfg.magnetic(r), dtype=float).reshape(3)
    scale = max(1.0, float(np.linalg.norm(r)))
    jac = finite_difference_jacobian(cfg.magnetic, r, h=1e-5 * scale)
    return E, B, jac


def _uniform_E(cfg):
    return np.array(cfg.vector, dtype=float) if cfg.kind == "uniform_e" else np.zeros(3)


def _uniform_B(cfg):
    return np.array(cfg.vector, dtype=float) if cfg.kind == "uniform_b" else np.zeros(3)
