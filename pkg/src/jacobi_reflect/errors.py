"""Exception hierarchy.

Configuration problems derive from ``ValueError`` so that ordinary input
validation reads naturally; numerical refusals (band edges, pole hits,
failed cross-checks) derive from ``NumericalError`` so callers can drop a
grid point and move on.
"""


class JacobiReflectError(Exception):
    """Base class for all package errors."""


class SchemaError(JacobiReflectError, ValueError):
    """Config document violates the schema. Carries the offending field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class NonPositiveCoefficient(JacobiReflectError, ValueError):
    """An off-diagonal entry a_k is zero or negative."""

    def __init__(self, k, value):
        self.k = k
        self.value = value
        super().__init__(f"a[{k}] = {value!r} must be > 0")


class NonFiniteEntry(JacobiReflectError, ValueError):
    """A coefficient is NaN or infinite."""

    def __init__(self, k, value):
        self.k = k
        self.value = value
        super().__init__(f"coefficient at {k} is not finite: {value!r}")


class WindowTooSmall(JacobiReflectError, ValueError):
    """A finite truncation does not contain the perturbation window."""


class NumericalError(JacobiReflectError):
    """Base class for refusals raised during evaluation (not bad input)."""


class BandEdge(NumericalError):
    """Energy too close to a spectral band edge for a boundary-value evaluation."""

    def __init__(self, lam, edge, margin):
        self.lam = lam
        self.edge = edge
        self.margin = margin
        super().__init__(
            f"lambda = {lam} within margin {margin:.3g} of band edge {edge}"
        )


class PoleHit(NumericalError):
    """Stripping denominator vanished: hit an eigenvalue of a truncated block."""


class CrossCheckFailure(NumericalError):
    """Two independent expressions for the same quantity disagree."""


class NoOpenChannel(NumericalError):
    """Both channel densities vanish at the requested energy."""


class NormalizationPole(NumericalError):
    """Decaying solution vanishes at the normalization site (Jost-function zero)."""


class DegenerateBasis(NumericalError):
    """A solution and its conjugate are (numerically) linearly dependent."""


class HorizonExceeded(NumericalError):
    """Requested evolution time exceeds the boundary-contamination horizon."""
