"""Exception hierarchy shared across the toolkit.

Numerical-failure exceptions all derive from :class:`QembedError` so callers
(and the CLI) can distinguish "the math refused" from programming errors.
"""


class QembedError(Exception):
    """Base class for all toolkit errors."""


# --- linear algebra kernel ---

class NotSymmetric(QembedError):
    """Matrix expected to be symmetric is not, beyond tolerance."""


class NoConvergence(QembedError):
    """An iterative solver failed to converge."""


class NotPositiveDefinite(QembedError):
    """Matrix expected SPD has an eigenvalue at or below the floor."""


class Singular(QembedError):
    """Linear solve hit a negligible pivot."""


# --- density-matrix partitioning ---

class BadPartition(QembedError):
    """Fragment choice incompatible with the orbital space."""


class SingularCoupling(QembedError):
    """Fragment is numerically decoupled from its environment."""


class DegenerateSingularValue(QembedError):
    """Overlap singular value too close to 0 or 1 for a usable bath vector."""


class DimensionMismatch(QembedError):
    """Operands have incompatible shapes."""


# --- lattice / mean field ---

class BadPotentialLength(QembedError):
    """Potential array is neither uniform (length 1) nor per-site."""


class FermiDegeneracy(QembedError):
    """Requested filling straddles a degenerate level."""


# --- molecular integrals / SCF ---

class ParseError(QembedError):
    """Malformed integral file; carries the offending line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = "line %d: %s" % (line_no, message)
        super().__init__(message)
        self.line_no = line_no


class InconsistentHeader(QembedError):
    """Integral indices exceed the declared orbital count."""


class ScfNoConvergence(QembedError):
    """SCF loop exhausted its iteration budget."""


# --- cluster construction / exact solver ---

class NonIdempotentSource(QembedError):
    """Cluster construction requires an idempotent density matrix."""


class Overflow(QembedError):
    """Determinant space exceeds the configured cap."""


# --- embedding drivers ---

class RootBracketFailure(QembedError):
    """Occupation does not straddle the target over the search bracket."""


class PartitionNotTiling(QembedError):
    """Fragments do not tile the orbital set disjointly."""
