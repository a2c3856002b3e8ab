"""Dense symmetric-matrix decompositions used throughout the sampler.

All routines operate on small dense matrices (tens of rows, not thousands)
and favour explicit error signalling over silent regularization: an invalid
covariance draw must surface as :class:`NotPositiveDefinite` so the caller
can retry or abort with context.
"""

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import cholesky as _lapack_cholesky, LinAlgError

from .errors import NotPositiveDefinite, NoConvergence

# Pivot tolerance for declaring a matrix non-PD, relative to its largest
# diagonal entry. Scale-invariant and strict enough for dimensions <= a few
# hundred.
PD_TOL = 1e-12


def symmetrize(a: NDArray) -> NDArray:
    """Return the symmetric part (A + A.T) / 2."""
    return 0.5 * (a + a.T)


def cholesky(a: NDArray) -> NDArray:
    """Lower Cholesky factor of a symmetric positive definite matrix.

    Parameters
    ----------
    a : ndarray, shape (J, J)
        Symmetric matrix.

    Returns
    -------
    L : ndarray, shape (J, J)
        Lower-triangular factor with ``L @ L.T == a``.

    Raises
    ------
    NotPositiveDefinite
        If a pivot falls at or below ``PD_TOL * max(diag(a))``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    tol = PD_TOL * max(float(np.max(np.diag(a))), 0.0)
    try:
        low = _lapack_cholesky(a, lower=True, check_finite=False)
    except LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    # LAPACK accepts pivots marginally above zero; enforce the relative bound.
    if float(np.min(np.diag(low)) ** 2) <= tol:
        raise NotPositiveDefinite("pivot below relative tolerance")
    return low


def cholesky_lax(a: NDArray) -> NDArray:
    """Lower Cholesky factor without the relative pivot tolerance.

    For internal factorizations of quantities that are positive definite by
    construction but may be extremely ill conditioned (posterior precisions
    under heavy-tailed scale priors). Raises :class:`NotPositiveDefinite`
    only when LAPACK itself fails.
    """
    try:
        return _lapack_cholesky(np.asarray(a, dtype=float), lower=True, check_finite=False)
    except LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None


def is_pd(a: NDArray) -> bool:
    """True when ``a`` passes :func:`cholesky`."""
    try:
        cholesky(a)
    except NotPositiveDefinite:
        return False
    return True


def spectral(a: NDArray) -> tuple[NDArray, NDArray]:
    """Eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    a : ndarray, shape (J, J)
        Symmetric matrix.

    Returns
    -------
    eigenvalues : ndarray, shape (J,)
        In descending order.
    eigenvectors : ndarray, shape (J, J)
        Orthonormal columns matching ``eigenvalues``; ``E @ diag(w) @ E.T``
        reconstructs ``a``.

    Raises
    ------
    NoConvergence
        If the underlying QR iteration fails to converge.
    """
    a = np.asarray(a, dtype=float)
    try:
        w, vec = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from None
    order = np.argsort(w)[::-1]
    return w[order], vec[:, order]


def matrix_log(a: NDArray) -> NDArray:
    """Symmetric matrix logarithm via the spectral decomposition.

    Requires positive definite input; eigenvalues at or below the relative
    PD tolerance raise :class:`NotPositiveDefinite`.
    """
    w, vec = spectral(a)
    if w[-1] <= PD_TOL * max(w[0], 0.0):
        raise NotPositiveDefinite("matrix log of a non-PD matrix")
    return symmetrize((vec * np.log(w)) @ vec.T)


def matrix_exp(a: NDArray) -> NDArray:
    """Symmetric matrix exponential via the spectral decomposition.

    The result is positive definite for any symmetric input.
    """
    w, vec = spectral(a)
    return symmetrize((vec * np.exp(w)) @ vec.T)
