# src/utils/errors.py

"""Error kinds raised across the package. All derive from PrivGmmError."""


class PrivGmmError(Exception):
    pass


class NotPsd(PrivGmmError):
    """A matrix has an eigenvalue below the PSD clamp tolerance."""


class Singular(PrivGmmError):
    """A matrix is numerically singular for the requested operation."""


class DimensionMismatch(PrivGmmError):
    pass


class TooLarge(PrivGmmError):
    pass


class InvalidGmm(PrivGmmError):
    pass


class DegenerateWeights(PrivGmmError):
    """All masked weights were clamped to (numerically) zero."""


class EpsilonTooLarge(PrivGmmError):
    pass


class Infeasible(PrivGmmError):
    """No noise scales satisfy both the privacy and the concentration constraints."""


class ConfigInfeasible(PrivGmmError):
    """The PPE threshold exceeds 1, so the private test can never pass."""


class InsufficientData(PrivGmmError):
    pass


class LearnFailed(PrivGmmError):
    pass


class PreconditionDistance(PrivGmmError):
    pass


class SamplerStarved(PrivGmmError):
    pass


class DatasetFormatError(PrivGmmError):
    """Malformed dataset or model file; the message names the line/field."""
