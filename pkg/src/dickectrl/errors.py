"""Exception types shared across the toolkit."""

from __future__ import annotations


class DickeError(Exception):
    """Base class for all toolkit errors."""


class DomainError(DickeError, ValueError):
    """A parameter or argument lies outside the physically admissible domain."""


class BelowThresholdError(DomainError):
    """An operation that needs the superradiant regime was called with g0 < g_c."""


class DegenerateFixedPointError(DomainError):
    """Linearization around a fixed point with jz = 0 (division by jz required)."""


class ParamsFileError(DickeError, ValueError):
    """Malformed parameter file; message carries the offending line number."""


class DivergenceError(DickeError):
    """Photon occupation exceeded the divergence bound during integration.

    Carries the blow-up time and the partial trajectory accumulated so far.
    """

    def __init__(self, time: float, trajectory=None):
        super().__init__(f"photon occupation diverged at t = {time:.6g} us")
        self.time = time
        self.trajectory = trajectory


class NonFiniteStateError(DickeError):
    """Integration produced NaN or Inf; carries time and partial trajectory."""

    def __init__(self, time: float, trajectory=None):
        super().__init__(f"non-finite state at t = {time:.6g} us")
        self.time = time
        self.trajectory = trajectory


class OutOfSpanError(DickeError, ValueError):
    """History was queried outside the span covered by stored nodes."""


class NoConvergenceError(DickeError):
    """Newton polishing failed to reach the residual tolerance on a root."""


class CountMismatchError(DickeError):
    """Argument-principle root count disagrees with the roots actually located."""


class InconclusiveError(DickeError):
    """A trajectory met neither the fixed-point nor the limit-cycle criterion."""
