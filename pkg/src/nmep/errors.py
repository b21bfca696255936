"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class NMEPError(Exception):
    """Base class for all errors raised by this package.

    Solver errors raised inside :func:`nmep.solvers.run` get ``step`` and
    ``time`` filled in by the driver before they propagate.
    """

    step: int | None = None
    time: float | None = None

    def annotate(self, step: int, time: float) -> "NMEPError":
        self.step = step
        self.time = time
        return self

    def __str__(self) -> str:
        msg = super().__str__()
        if self.step is not None:
            msg = f"{msg} [step {self.step}, t={self.time!r}]"
        return msg


class ZeroVector(NMEPError, ValueError):
    pass


class DimensionMismatch(NMEPError, ValueError):
    pass


class NotHermitian(NMEPError, ValueError):
    pass


class EmptyEnsemble(NMEPError, ValueError):
    pass


class InvalidEnsemble(NMEPError, ValueError):
    """Ensemble violates a precondition of the requested operation."""


class InvalidExponent(NMEPError, ValueError):
    pass


class OutOfTableRange(NMEPError, ValueError):
    pass


class OutOfRange(NMEPError, ValueError):
    pass


class NonMonotonicTimes(NMEPError, ValueError):
    pass


class StepTooLarge(NMEPError):
    """A per-step jump probability exceeded the first-order validity bound."""


class NegativeRate(NMEPError):
    """A Markovian-only solver met a negative jump rate."""

    def __init__(self, channel: int, rate: float, t: float):
        super().__init__(
            f"channel {channel} has negative rate {rate!r}; use the nmep solver"
        )
        self.channel = channel
        self.rate = rate
        self.t = t


class ReverseTargetMissing(NMEPError):
    """NMQJ needs a reverse-jump partner that is not in the ensemble."""

    def __init__(self, channel: int, source: int, t: float):
        super().__init__(
            f"no ensemble member matches the jump state of member {source} "
            f"on negative channel {channel}"
        )
        self.channel = channel
        self.source = source
        self.t = t


class CountNotConserved(NMEPError):
    pass


class GridMismatch(NMEPError, ValueError):
    pass


class ConfigError(NMEPError, ValueError):
    """Invalid run configuration; carries the offending location."""

    def __init__(self, message: str, where: str | None = None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where
