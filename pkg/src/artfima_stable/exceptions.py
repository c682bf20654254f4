"""Exception hierarchy.

Every domain failure raises a subclass of :class:`ArtfimaError`, which is
itself a ``ValueError`` so callers that only care about bad input can catch
the builtin.
"""


class ArtfimaError(ValueError):
    """Base class for all domain errors raised by this package."""


class InvalidOrderError(ArtfimaError):
    """Memory/tempering pair outside the admissible set."""


class InvalidArmaError(ArtfimaError):
    """AR or MA polynomial violates the root or degree conditions."""


class EmptyRequestError(ArtfimaError):
    """A zero-length result was requested."""


class UnsupportedError(ArtfimaError):
    """The requested combination of inputs has no defined result."""


class DegenerateSeriesError(ArtfimaError):
    """Series has zero energy, zero spread or is too short."""


class GradientError(ArtfimaError):
    """Finite-difference gradient produced non-finite values."""


class NoFeasiblePointError(ArtfimaError):
    """No optimizer start produced an admissible parameter vector."""


class StudyUnreliableError(ArtfimaError):
    """Too many Monte Carlo replicates failed."""


class TransformError(ArtfimaError):
    """A transform step in an ingest chain could not be applied."""


class ParseError(ArtfimaError):
    """Input file could not be parsed."""
