"""
Errors Module.

Exception hierarchy shared by the library. Every error knows which module
raised it so the CLI can report "module: message".
"""


class GjfrError(Exception):
    """Base class for all library errors."""
    module = "gjfr"

    def __init__(self, message: str, module: str = None):
        super().__init__(message)
        if module is not None:
            self.module = module

    def __str__(self):
        return f"{self.module}: {self.args[0]}"


class DomainError(GjfrError):
    """Special function argument outside its domain."""
    module = "specfun"


class QuadratureError(GjfrError):
    """Quadrature construction failed."""
    module = "jacobi"


class SchemeError(GjfrError):
    """Invalid correction scheme parameters or a singular construction."""
    module = "corrections"


class OperatorError(GjfrError):
    """Invalid solver operator setup."""
    module = "fr1d"


class DefectiveOperatorError(GjfrError):
    """Eigenvector matrix too ill-conditioned to diagonalise."""
    module = "vonneumann"


class RateUnavailableError(GjfrError):
    """Convergence rate undefined because an error norm underflowed."""
    module = "vonneumann"


class SpectrumError(GjfrError):
    """Spectral diagnostic could not be evaluated."""
    module = "turbulence"


class NoPeakError(SpectrumError):
    """Compensated spectrum shows no resolvable resonance."""


class NoPlateauError(SpectrumError):
    """Plateau band is too uneven to define a reference level."""


class NoCrossingError(SpectrumError):
    """Spectrum never drops below the cut-off threshold."""


class ConfigError(GjfrError):
    """Invalid run configuration."""
    module = "cli"
