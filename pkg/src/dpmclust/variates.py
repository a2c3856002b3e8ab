"""Random-variate generation and Gaussian density evaluation.

Every sampler takes an explicit ``numpy.random.Generator`` so that chains
own their randomness and runs are reproducible from a seed.

Shape/rate convention, fixed package-wide: ``Gamma(a, b)`` has mean ``a/b``
and ``InvGamma(a, b)`` has mean ``b/(a-1)``.
"""

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import solve_triangular, cho_solve

from .errors import DegreesOfFreedomTooSmall
from .linalg import cholesky_lax

LOG_2PI = float(np.log(2.0 * np.pi))


def sample_gamma(shape: float, rate: float, rng, size=None):
    """Gamma(shape, rate) draw(s); mean shape/rate."""
    return rng.gamma(shape, 1.0 / rate, size=size)


def sample_inv_gamma(shape: float, scale: float, rng, size=None):
    """InvGamma(shape, scale) draw(s); mean scale/(shape-1) when shape > 1."""
    return scale / rng.gamma(shape, 1.0, size=size)


def sample_mvn(mean: NDArray, cov_chol: NDArray, rng) -> NDArray:
    """Draw from N(mean, L @ L.T) given the lower factor L."""
    z = rng.standard_normal(mean.shape[0])
    return mean + cov_chol @ z


def mvn_logpdf(x: NDArray, mean: NDArray, cov_chol: NDArray) -> float:
    """Log density of N(mean, L @ L.T) at ``x``.

    Uses the triangular factor for the determinant and the quadratic form,
    so no explicit inverse is ever formed.
    """
    dev = np.asarray(x, dtype=float) - mean
    y = solve_triangular(cov_chol, dev, lower=True, check_finite=False)
    j = mean.shape[0]
    logdet = 2.0 * float(np.sum(np.log(np.diag(cov_chol))))
    return -0.5 * (j * LOG_2PI + logdet + float(y @ y))


def mvn_logpdf_rows(x: NDArray, mean: NDArray, cov_chol: NDArray) -> NDArray:
    """Vectorized :func:`mvn_logpdf` over the rows of ``x`` (n, J)."""
    dev = np.asarray(x, dtype=float) - mean
    y = solve_triangular(cov_chol, dev.T, lower=True, check_finite=False)
    j = mean.shape[0]
    logdet = 2.0 * float(np.sum(np.log(np.diag(cov_chol))))
    return -0.5 * (j * LOG_2PI + logdet + np.einsum("ji,ji->i", y, y))


def _wishart_factor(scale_chol: NDArray, df: float, rng) -> NDArray:
    """Bartlett factor F with F @ F.T ~ Wishart(scale, df)."""
    j = scale_chol.shape[0]
    if df <= j - 1:
        raise DegreesOfFreedomTooSmall(f"df={df} requires df > {j - 1}")
    a = np.zeros((j, j))
    idx = np.tril_indices(j, k=-1)
    a[idx] = rng.standard_normal(len(idx[0]))
    a[np.diag_indices(j)] = np.sqrt(rng.chisquare(df - np.arange(j)))
    return scale_chol @ a


def sample_wishart(scale: NDArray, df: float, rng) -> NDArray:
    """Wishart draw with mean ``df * scale`` via the Bartlett factorization.

    Parameters
    ----------
    scale : ndarray, shape (J, J)
        Positive definite scale matrix.
    df : float
        Degrees of freedom; must exceed J - 1.

    Raises
    ------
    DegreesOfFreedomTooSmall
        If ``df <= J - 1``.
    """
    scale = np.asarray(scale, dtype=float)
    fac = _wishart_factor(cholesky_lax(scale), df, rng)
    return fac @ fac.T


def sample_inv_wishart(scale: NDArray, df: float, rng) -> NDArray:
    """Inverse Wishart draw; mean ``scale/(df - J - 1)`` when df > J + 1.

    Implemented as the inverse of a Wishart draw of the inverted scale: the
    Bartlett factor is inverted triangularly, which keeps the result exactly
    symmetric PD even when the underlying Wishart draw is near singular.
    The draw is proper for any ``df > J - 1``; a finite mean additionally
    needs ``df > J + 1``, which callers relying on moments must enforce.
    """
    scale = np.asarray(scale, dtype=float)
    low = cholesky_lax(scale)
    eye = np.eye(scale.shape[0])
    scale_inv = cho_solve((low, True), eye, check_finite=False)
    fac = _wishart_factor(cholesky_lax(0.5 * (scale_inv + scale_inv.T)), df, rng)
    fac_inv = solve_triangular(fac, eye, lower=True, check_finite=False)
    out = fac_inv.T @ fac_inv
    return 0.5 * (out + out.T)


def sample_inv_gaussian(mu: float, lam: float, rng, size=None):
    """Inverse Gaussian draw(s) via the Michael-Schucany-Haas transform.

    Mean ``mu``, variance ``mu**3 / lam``. The larger root of the defining
    quadratic is computed additively and the smaller recovered as
    ``mu**2 / root``, which stays accurate for extreme ``mu/lam`` ratios.
    """
    if mu <= 0.0 or lam <= 0.0:
        raise ValueError("inverse Gaussian parameters must be positive")
    y = rng.standard_normal(size) ** 2
    big = mu + (mu / (2.0 * lam)) * (mu * y + np.sqrt(4.0 * mu * lam * y + (mu * y) ** 2))
    small = mu * mu / big
    take_small = rng.random(size) <= mu / (mu + small)
    out = np.where(take_small, small, big)
    return float(out) if size is None else out


def sample_mvt(mean: NDArray, scale_chol: NDArray, df: float, rng) -> NDArray:
    """Multivariate-t draw: mean + L z sqrt(df / g), g ~ chi-square(df)."""
    if df <= 0:
        raise ValueError("df must be positive")
    z = rng.standard_normal(mean.shape[0])
    g = rng.chisquare(df)
    return mean + (scale_chol @ z) * np.sqrt(df / g)
