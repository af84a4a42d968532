"""Chaos-based compressed sensing with the Henon map."""

from ._core import *  # noqa: F401,F403
from ._core import (
    DimensionMismatch,
    DivergenceError,
    EmptyMeasurement,
    InvalidArgument,
    NumericalError,
    ScalingFailure,
    SolverStall,
)

__version__ = "0.1.0"
