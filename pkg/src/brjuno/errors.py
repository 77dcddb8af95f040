"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the domain a routine can handle."""


class PrecisionExhausted(ArithmeticError):
    """A floating-point expansion ran out of reliable bits."""


class NoConvergence(ArithmeticError):
    """An iteration failed to settle within its budget."""


class BranchCutError(DomainError):
    """Evaluation requested on a branch cut of a multivalued function."""


class OnSlitError(DomainError):
    """Cauchy-type integral evaluated at a point of the slit [0, 1]."""


class PoleProximityError(ArithmeticError):
    """A Moebius denominator came too close to zero to trust the result."""


class BadWeights(ValueError):
    """Holder-norm weights fail the condition required by the bound."""


class TruncationUnreliable(ArithmeticError):
    """Shell sums refused to decay; the reported tail bound is not trusted."""

    def __init__(self, msg, value=None, tail_estimate=None):
        super().__init__(msg)
        self.value = value
        self.tail_estimate = tail_estimate


class InsufficientDepth(ValueError):
    """Not enough expansion terms to fit a growth exponent."""


class UnstableEstimate(ArithmeticError):
    """A fitted constant drifted too much to be quoted."""

    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


class SolvabilityViolation(ArithmeticError):
    """Mean-zero solvability of a cohomological step failed numerically."""


class SmallDivisorZero(ZeroDivisionError):
    """A denominator 2(cos(2 pi n rho) - 1) vanished exactly (rational rho)."""

    def __init__(self, order, mode=None, msg=None):
        if msg is None:
            if mode is None:
                msg = f"small divisor vanishes at order n={order}"
            else:
                msg = f"small divisor vanishes at order k={order}, mode nu={mode}"
        super().__init__(msg)
        self.order = order
        self.mode = mode
