"""Exception types raised by the toolkit.

Validation errors carry the offending magnitude in their message so a
failure names both the violated invariant and how badly it was violated.
"""


class QSteerError(Exception):
    """Base class for all toolkit errors."""


class NotHermitian(QSteerError):
    """Matrix differs from its conjugate transpose beyond tolerance."""


class NotUnitTrace(QSteerError):
    """Matrix trace differs from one beyond tolerance."""


class NotPositive(QSteerError):
    """Matrix has an eigenvalue below the positive-semidefinite slack."""


class OutOfRange(QSteerError):
    """Scalar parameter outside its admissible interval."""


class BadSettingCount(QSteerError):
    """Unsupported number of measurement settings for the operation."""


class QOutOfRange(QSteerError):
    """Tsallis parameter outside (0, 2] or equal to 1."""


class DegenerateMarginal(QSteerError):
    """A conditioning marginal vanishes while its joint mass does not."""


class DegenerateLocalVector(QSteerError):
    """Local Bloch vector component at unit magnitude with no finite limit."""


class SolverFailure(QSteerError):
    """SDP solver stopped without an optimality certificate."""


class NonMonotone(QSteerError):
    """Internal check tripped: a provably nondecreasing sequence decreased."""


class ConsistencyError(QSteerError):
    """Internal invariant violated; indicates a bug rather than bad input."""
