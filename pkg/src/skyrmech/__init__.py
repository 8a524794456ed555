"""Skyrmion-qubit / nanomechanical hybrid system simulations."""

__version__ = "0.1.0"

from skyrmech.errors import (
    ConfigError,
    EnergyInBand,
    InvalidRegimeInput,
    ModulusOutOfRange,
    NonConvergedQuadrature,
    NotExcitationConserving,
    OutOfSlab,
    PlacementCollision,
    ScenarioFailure,
    SkyrmechError,
    SqueezeDiverges,
    StepSizeUnderflow,
    TraceDrift,
    TruncationNotConverged,
)

__all__ = [
    "__version__",
    "SkyrmechError",
    "ConfigError",
    "EnergyInBand",
    "InvalidRegimeInput",
    "ModulusOutOfRange",
    "NonConvergedQuadrature",
    "NotExcitationConserving",
    "OutOfSlab",
    "PlacementCollision",
    "ScenarioFailure",
    "SqueezeDiverges",
    "StepSizeUnderflow",
    "TraceDrift",
    "TruncationNotConverged",
]
