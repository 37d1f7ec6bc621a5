"""Exception hierarchy shared by every module.

Domain errors are contract violations (bad parameters, unsupported regions).
Convergence errors are numerical failures on otherwise valid input.  The CLI
maps the two families to distinct exit codes.
"""


class MLQError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MLQError, ValueError):
    """Input outside the supported domain of an operation."""


class DiracSpectrumError(DomainError):
    """The spectral distribution degenerates to a Dirac delta (alpha = 1)."""


class DivergenceError(DomainError):
    """The requested value is infinite (a pole or an integrable singularity)."""


class AtomError(DomainError):
    """Pointwise evaluation of a distribution that is a point mass."""


class SeriesDomainError(DomainError):
    """Argument lies outside the bound where the power series is trusted."""


class ConvergenceError(MLQError, ArithmeticError):
    """A numerical method failed to reach the requested accuracy."""


class CancellationError(ConvergenceError):
    """Alternating series refused: partial terms dwarf the result."""


class TruncationError(ConvergenceError):
    """A truncation budget (grid window, series cap) could not be met."""


class DivergentSeriesWarning(UserWarning):
    """An asymptotic series was summed past its smallest term."""
