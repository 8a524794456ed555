"""Exception hierarchy shared by all modules."""


class SkyrmechError(Exception):
    pass


class NonConvergedQuadrature(SkyrmechError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class TruncationNotConverged(SkyrmechError, ArithmeticError):
    """Charge-basis spectrum still moves when the truncation is enlarged."""


class OutOfSlab(SkyrmechError, ValueError):
    pass


class ModulusOutOfRange(SkyrmechError, ValueError):
    pass


class SqueezeDiverges(SkyrmechError, ValueError):
    """|Omega_E| >= |Delta_m|: the parametric drive is above threshold."""


class InvalidRegimeInput(SkyrmechError, ValueError):
    pass


class PlacementCollision(SkyrmechError, ValueError):
    pass


class StepSizeUnderflow(SkyrmechError, ArithmeticError):
    pass


class TraceDrift(SkyrmechError, ArithmeticError):
    pass


class NotExcitationConserving(SkyrmechError, ValueError):
    pass


class EnergyInBand(SkyrmechError, ValueError):
    """Requested bound-state energy touches a phonon band."""


class ConfigError(SkyrmechError, ValueError):
    pass


class ScenarioFailure(SkyrmechError, RuntimeError):
    pass
