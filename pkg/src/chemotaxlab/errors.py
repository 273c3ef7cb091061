"""Exception types shared across the package."""


class LabError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(LabError):
    """An input value violates a documented constraint."""

    def __init__(self, key: str, reason: str):
        self.key = key
        self.reason = reason
        super().__init__(f"{key}: {reason}")


class ParseError(LabError):
    """A config file line could not be parsed."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class MissingBlock(LabError):
    """The config lacks the section required by the invoked command."""

    def __init__(self, command: str):
        self.command = command
        super().__init__(f"config has no block for command '{command}'")


class HorizonTooCoarse(LabError):
    """Horizon sample step exceeds a quarter of the shortest temporal period."""


class HorizonTooShort(LabError):
    """Horizon cannot accommodate the requested averaging window."""


class NotSpatiallyHomogeneous(LabError):
    """Operation requires coefficients independent of x."""


class NotPeriodicCoefficients(LabError):
    """Operation requires all coefficients periodic with the given period."""


class NotAutonomousCoefficients(LabError):
    """Operation requires coefficients independent of t."""


class DegenerateDenominator(LabError):
    """h(chi) vanished relative to the scale of its two products."""


class DenominatorNotPositive(LabError):
    """The denominator of the invariant-box bound is not positive."""


class HypothesisViolated(LabError):
    """A required hypothesis inequality fails; the message names it."""


class NonFiniteInput(LabError):
    """A field passed to a numerical kernel contains NaN or infinity."""


class StepRejected(LabError):
    """A trial time step violated the growth or negativity guards."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class InvalidInitial(LabError):
    """Initial field has negative entries beyond round-off tolerance."""


class OrderViolation(LabError):
    """Envelope components crossed: lower exceeded upper beyond tolerance."""


class NoConvergence(LabError):
    """Iteration cap reached before the convergence criterion was met."""

    def __init__(self, what: str, residual: float = float("nan")):
        self.what = what
        self.residual = residual
        super().__init__(f"{what} did not converge (residual {residual:g})")


class BlowUpDetected(LabError):
    """A trajectory crossed the blow-up threshold."""

    def __init__(self, t: float):
        self.t = t
        super().__init__(f"blow-up detected at t={t:g}")
