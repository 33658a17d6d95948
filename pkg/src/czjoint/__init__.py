"""Guaranteed joint state and parameter estimation with constrained zonotopes."""

from .czsets import ConstrainedZonotope, EmptySetError, Zonotope
from .estimators import (
    METHODS,
    DivergenceError,
    EstimatorConfig,
    EstimatorState,
    InconsistentMeasurementError,
    SetMembershipFilter,
)
from .intervals import Interval, IntervalMatrix
from .models import (
    LinearModel,
    NonlinearModel,
    Trajectory,
    UncertaintyBudget,
    example_nonlinear_system,
    random_linear_system,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "ConstrainedZonotope",
    "Zonotope",
    "EmptySetError",
    "Interval",
    "IntervalMatrix",
    "LinearModel",
    "NonlinearModel",
    "UncertaintyBudget",
    "Trajectory",
    "random_linear_system",
    "example_nonlinear_system",
    "simulate",
    "METHODS",
    "EstimatorConfig",
    "EstimatorState",
    "SetMembershipFilter",
    "InconsistentMeasurementError",
    "DivergenceError",
]
