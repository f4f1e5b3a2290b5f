"""Exception types shared across the package."""


class RotPolaritonError(Exception):
    """Base class for all package-specific errors."""


class UnknownUnit(RotPolaritonError, ValueError):
    """Unit string is not one of the supported unit names."""


class NonResonantCavity(RotPolaritonError, ValueError):
    """Dressed-basis construction requires the cavity tuned to the 0-1 rotor line."""


class QuadratureNotConverged(RotPolaritonError, RuntimeError):
    """Oscillatory pulse-area quadrature failed to reach the requested tolerance."""


class NotConverged(RotPolaritonError, RuntimeError):
    """Step-halving certification of the propagator failed at the minimum step."""


class BasisMismatch(RotPolaritonError, ValueError):
    """Operator and state live in different bases."""


class WindowTooShort(RotPolaritonError, ValueError):
    """Time window is too short for the requested spectral resolution."""


class NoRevivalFound(RotPolaritonError, RuntimeError):
    """Autocorrelation never exceeds the revival threshold within the series."""


class DesignInfeasible(RotPolaritonError, RuntimeError):
    """Requested composite-pulse design has no solution in the valid regime."""


class ConfigError(RotPolaritonError, ValueError):
    """Run configuration is missing keys, has wrong types, or is inconsistent."""
