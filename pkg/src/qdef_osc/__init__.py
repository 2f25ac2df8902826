"""q-deformed algebra and the position-dependent-mass oscillator, classical and quantum."""

from ._version import __version__
from .classical import DeformedPhaseState, MorseParams, OscillatorConfig, PhaseState
from .errors import (
    ConfigError, DomainError, IntegrationError, QDefError, RegimeError, SingularityError, UnboundStateError,
)
from .q_calculus import Deformation, RealFunctionHandle
from .quantum import BoundState, QuantumModel
from .series import SeriesTable
from .special import QuadratureSpec

__all__ = [
    "__version__", "Deformation", "RealFunctionHandle", "OscillatorConfig", "PhaseState",
    "DeformedPhaseState", "MorseParams", "QuantumModel", "BoundState", "SeriesTable", "QuadratureSpec",
    "QDefError", "DomainError", "RegimeError", "UnboundStateError", "SingularityError",
    "IntegrationError", "ConfigError",
]
