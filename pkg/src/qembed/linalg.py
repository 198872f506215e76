"""Dense real linear-algebra kernel used by the rest of the toolkit.

Thin contracts over LAPACK (via numpy/scipy): symmetric eigendecomposition,
pivot-checked linear solves, and the symmetric positive-definite square root.
Everything is real double precision; inputs are never mutated.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NotPositiveDefinite, NotSymmetric, Singular

SYM_RTOL = 1e-10       # relative asymmetry tolerance
PD_FLOOR = 1e-12       # relative positive-definiteness floor
SING_RTOL = 1e-12      # relative pivot threshold


def _as_matrix(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a 2-D array, got ndim=%d" % a.ndim)
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def norm_inf(a):
    """Entrywise max-abs norm (0 for empty arrays)."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def check_symmetric(a, rtol=SYM_RTOL, what="matrix"):
    """Raise NotSymmetric if ``a`` deviates from its transpose beyond rtol."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NotSymmetric("%s is not square: %s" % (what, (a.shape,)))
    dev = norm_inf(a - a.T)
    scale = max(1.0, norm_inf(a))
    if dev > rtol * scale:
        raise NotSymmetric(
            "%s asymmetry %.3e exceeds %.3e" % (what, dev, rtol * scale))
    return a


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition of a real symmetric matrix.

    eigenvalues are ascending; eigenvectors are orthonormal columns, so
    ``vectors @ diag(values) @ vectors.T`` reconstructs the input.
    """

    values: np.ndarray
    vectors: np.ndarray


def sym_eig(a):
    """Full eigendecomposition of a symmetric matrix.

    Raises NotSymmetric for asymmetric input and NoConvergence if the
    underlying QL/QR iteration fails.
    """
    a = check_symmetric(a)
    if a.shape[0] == 0:
        return SymEig(np.zeros(0), np.zeros((0, 0)))
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence("eigensolver failed: %s" % exc) from exc
    return SymEig(w, v)


def spd_sqrt(a):
    """Symmetric positive-definite square root (positive branch).

    The result Z satisfies Z @ Z == a and is itself SPD. Raises
    NotPositiveDefinite when the smallest eigenvalue is at or below the
    floor ``PD_FLOOR * max(1, |a|_inf)``.
    """
    eig = sym_eig(a)
    if eig.values.size == 0:
        return np.zeros((0, 0))
    floor = PD_FLOOR * max(1.0, norm_inf(a))
    wmin = eig.values[0]
    if wmin <= floor:
        raise NotPositiveDefinite(
            "min eigenvalue %.3e <= floor %.3e" % (wmin, floor))
    root = (eig.vectors * np.sqrt(eig.values)) @ eig.vectors.T
    return 0.5 * (root + root.T)


def solve(a, b):
    """Solve a @ x = b with an explicit singularity check on the LU pivots."""
    a = _as_matrix(a)
    b = np.asarray(b, dtype=float)
    if a.shape[0] != a.shape[1]:
        raise ValueError("coefficient matrix must be square")
    if b.shape[0] != a.shape[0]:
        raise ValueError("right-hand side has %d rows, expected %d"
                         % (b.shape[0], a.shape[0]))
    if a.shape[0] == 0:
        return np.zeros_like(b)
    import warnings

    with warnings.catch_warnings():
        # the explicit pivot check below supersedes scipy's warning
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    thresh = SING_RTOL * max(1.0, norm_inf(a))
    if np.any(pivots < thresh):
        raise Singular("pivot %.3e below threshold %.3e"
                       % (pivots.min(), thresh))
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def smallest_singular_value(a):
    """Smallest singular value of a rectangular matrix.

    Computed from the Gram matrix of the narrow side, which is all the
    rank probing the bath construction needs.
    """
    a = _as_matrix(a)
    if min(a.shape) == 0:
        return 0.0
    gram = a.T @ a if a.shape[0] >= a.shape[1] else a @ a.T
    gram = 0.5 * (gram + gram.T)
    w = np.linalg.eigvalsh(gram)
    return float(np.sqrt(max(w[0], 0.0)))
