"""Exception and warning types shared across the package."""


class SingularityError(ValueError):
    """Momentum too close to the monopole at p = 0."""


class GaugeStringError(ValueError):
    """Momentum on the Dirac string of the fixed Berry gauge (negative p_z axis).

    Closed-loop phases remain available through the solid-angle method.
    """


class DegeneracyError(ValueError):
    """Phase-space density factor D too close to zero."""


class GaugeWarning(UserWarning):
    """A gauge-dependent quantity was evaluated on an open path."""


class ModelValidityWarning(UserWarning):
    """OAM no longer follows the momentum direction (g != 2 with B != 0)."""
