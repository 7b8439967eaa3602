"""Semiclassical dynamics of electron wave packets with orbital angular momentum.

The package covers Laguerre-Gaussian mode evaluation, a spectral paraxial
propagator used as an oracle, monopole Berry geometry in momentum space,
center-of-packet equations of motion with the anomalous velocity and
Zeeman coupling, the deformed symplectic structure, and canned scenarios.
"""
__version__ = "0.1.0"

from .units import (
    DIMENSIONLESS, FieldConfig, UnitSystem, eval_fields, make_field, make_free,
    make_uniform_B, make_uniform_E,
)
from .errors import (
    DegeneracyError, GaugeStringError, GaugeWarning, ModelValidityWarning, SingularityError,
)
from .modes import (
    GridField, GridWarning, ModeSpec, eval_hg, eval_lg, eval_mode, mode_overlap,
    oam_expectation, phase_winding, probability_current, radial_profile_maxima,
    ring_peak_radius, sample_mode,
)
from .paraxial import LeakageWarning, measure_centroid_and_oam, propagate
from .berry import (
    MomentumPath, ZeemanParams, berry_connection, berry_curvature, berry_phase_loop,
    loop_solid_angle, zeeman_energy, zeeman_gradients,
)
from .dynamics import (
    IntegratorConfig, PacketState, Trajectory, TrajectoryAborted, hamiltonian, integrate,
    rhs_solve,
)
from .symplectic import bracket, build_frame, closed_form_brackets, hamiltonian_flow, jacobi_residual
from .config import ConfigError, RunConfig, parse_config, serialize_config

__all__ = [
    "__version__",
    "DIMENSIONLESS",
    "FieldConfig",
    "UnitSystem",
    "eval_fields",
    "make_field",
    "make_free",
    "make_uniform_B",
    "make_uniform_E",
    "DegeneracyError",
    "GaugeStringError",
    "GaugeWarning",
    "ModelValidityWarning",
    "SingularityError",
    "GridField",
    "GridWarning",
    "ModeSpec",
    "eval_hg",
    "eval_lg",
    "eval_mode",
    "mode_overlap",
    "oam_expectation",
    "phase_winding",
    "probability_current",
    "radial_profile_maxima",
    "ring_peak_radius",
    "sample_mode",
    "LeakageWarning",
    "measure_centroid_and_oam",
    "propagate",
    "MomentumPath",
    "ZeemanParams",
    "berry_connection",
    "berry_curvature",
    "berry_phase_loop",
    "loop_solid_angle",
    "zeeman_energy",
    "zeeman_gradients",
    "IntegratorConfig",
    "PacketState",
    "Trajectory",
    "TrajectoryAborted",
    "hamiltonian",
    "integrate",
    "rhs_solve",
    "bracket",
    "build_frame",
    "closed_form_brackets",
    "hamiltonian_flow",
    "jacobi_residual",
    "ConfigError",
    "RunConfig",
    "parse_config",
    "serialize_config",
]
