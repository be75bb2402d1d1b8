"""Exception hierarchy shared by the solver, the clock and the CLI."""


class LarmorError(Exception):
    """Base class for every failure raised by the library."""


class InvalidParameter(LarmorError, ValueError):
    pass


class ThresholdEnergy(LarmorError):
    """Longitudinal momentum is degenerate (E² ≈ (m + W)²)."""


class SubRestEnergy(LarmorError):
    """Energy at or below the rest energy in a field-free region."""


class MalformedProfile(LarmorError):
    pass


class Overflow(LarmorError):
    """Evanescent growth exceeds the floating-point exponent range."""


class IntegratorFailure(LarmorError):
    pass


class ReflectionVanishes(LarmorError):
    """Transmission resonance: the reflection phase is undefined."""


class StepTooLarge(LarmorError):
    """Halving the finite-difference step changed the result too much."""


class NotEvanescent(LarmorError):
    pass


class PoleOrientation(LarmorError):
    pass


class UltraRelativisticDegeneracy(LarmorError):
    pass
