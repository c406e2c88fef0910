"""Charge-monopole phases, dynamics and their microscopic field oracles."""
from ._accel import backend_name
from .core import (NORTH_STRING, SOUTH_STRING, ParticleState, PhysicalSetup, StringConfig, StringSide,
                   make_setup, quantization_residual, wrap_angle)
from .errors import (MonopoleLabError, NumericalError, SingularityError, ToleranceError,
                     ValidationError)

__version__ = "0.1.0"

__all__ = [
    "NORTH_STRING", "SOUTH_STRING", "ParticleState", "PhysicalSetup", "StringConfig", "StringSide",
    "make_setup", "quantization_residual", "wrap_angle", "MonopoleLabError", "NumericalError",
    "SingularityError", "ToleranceError", "ValidationError", "backend_name", "__version__",
]
