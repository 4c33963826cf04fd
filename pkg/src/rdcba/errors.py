"""Exception hierarchy shared by all solver modules."""


class RateDistortionError(Exception):
    """Base class for every error raised by this package."""


class InstanceError(RateDistortionError, ValueError):
    """A problem instance violates its invariants."""


class NegativeProbability(InstanceError):
    pass


class NonStochastic(InstanceError):
    pass


class NegativeDistortion(InstanceError):
    pass


class ShapeMismatch(InstanceError):
    pass


class DegenerateRow(RateDistortionError):
    """A row partition sum vanished: the reproduction has no mass reachable from that row."""


class SupportViolation(RateDistortionError):
    """A conditional puts mass on a reproduction letter with zero marginal probability."""


class InfeasibleTarget(RateDistortionError):
    """Target distortion lies below the smallest attainable distortion."""


class NonPositiveRate(RateDistortionError):
    pass


class BracketFailed(RateDistortionError):
    """No sign change of the monotone function could be located."""


class RateTooHigh(BracketFailed):
    """The requested rate exceeds what any multiplier achieves under the current reproduction."""


class MaxOuterTrials(RateDistortionError):
    pass


class NoConvergenceOnSegment(RateDistortionError):
    """Fixed-slope search cannot reach a target lying on a linear segment of the curve."""

    def __init__(self, message, lam=None, distortion_low=None, distortion_high=None, trials=None):
        super().__init__(message)
        self.lam = lam
        self.distortion_low = distortion_low
        self.distortion_high = distortion_high
        self.trials = trials


class OutOfRange(RateDistortionError, ValueError):
    pass


class TooLarge(RateDistortionError):
    pass
