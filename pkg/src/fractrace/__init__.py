"""Numerical toolkit for time-fractional diffusion-wave equations."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    AccuracyError,
    DimensionError,
    DomainError,
    FractraceError,
    ParameterError,
    ResolutionWarning,
)
from .grid import SampledField, SpaceGrid, TimeGrid  # noqa: F401
