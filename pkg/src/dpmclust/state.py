"""Mixture state containers and the conjugate updates shared by all priors.

The stick-breaking representation keeps one Beta variable per instantiated
component; weights are recomputed from sticks on every change so the
identity ``psi_c = V_c * prod_{l<c} (1 - V_l)`` always holds exactly.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import cho_solve, solve_triangular

from .linalg import cholesky_lax
from .variates import mvn_logpdf_rows, sample_gamma

# Sticks are kept strictly inside (0, 1) so that log(1 - V) stays finite in
# the concentration update.
_STICK_EPS = 1e-12


@dataclass
class Component:
    """Parameters of one mixture component."""

    mu: NDArray
    cov: NDArray
    cov_chol: NDArray
    latents: dict = field(default_factory=dict)


@dataclass
class SharedState:
    """Hyperparameters common to all components.

    ``mu0`` is resampled every sweep; ``sigma0`` and the (mu00, sigma00)
    hyperprior are fixed at ingest. ``extra`` holds the prior-family block
    (e.g. R0/kappa0 for the hierarchical inverse Wishart).
    """

    mu0: NDArray
    sigma0: NDArray
    sigma0_inv: NDArray
    sigma0_chol: NDArray
    mu00: NDArray
    sigma00_inv: NDArray
    extra: dict = field(default_factory=dict)


@dataclass
class MixtureState:
    """Full MCMC state of one chain."""

    Z: NDArray                  # (n,) int component labels
    u: NDArray                  # (n,) slice variables
    V: NDArray                  # (C,) stick betas
    psi: NDArray                # (C,) component weights
    components: list            # list[Component], length C
    alpha: float
    shared: SharedState

    @property
    def n_instantiated(self) -> int:
        return len(self.components)

    def counts(self) -> NDArray:
        return np.bincount(self.Z, minlength=len(self.components))


def stick_weights(v: NDArray) -> NDArray:
    """Weights psi from stick betas; remainder mass is prod(1 - v)."""
    v = np.asarray(v, dtype=float)
    left = np.concatenate(([1.0], np.cumprod(1.0 - v)[:-1]))
    return v * left


def stick_remainder(v: NDArray) -> float:
    """Mass left after the instantiated sticks."""
    return float(np.prod(1.0 - np.asarray(v, dtype=float)))


def update_sticks(counts: NDArray, alpha: float, rng) -> NDArray:
    """Conjugate stick update: V_c ~ Beta(1 + n_c, alpha + sum_{l>c} n_l)."""
    counts = np.asarray(counts, dtype=float)
    tail = np.concatenate((np.cumsum(counts[::-1])[::-1][1:], [0.0]))
    v = rng.beta(1.0 + counts, alpha + tail)
    return np.clip(v, _STICK_EPS, 1.0 - _STICK_EPS)


def update_alpha(v: NDArray, prior_shape: float, prior_rate: float, rng) -> float:
    """Concentration update from the instantiated sticks.

    Full conditional is Gamma(prior_shape + C, prior_rate - sum log(1 - V_c)).
    With no sticks the prior is returned.
    """
    v = np.asarray(v, dtype=float)
    c = v.shape[0]
    rate = prior_rate - float(np.sum(np.log1p(-v)))
    return float(sample_gamma(prior_shape + c, rate, rng))


def component_loglik(rows: NDArray, mu: NDArray, cov_chol: NDArray) -> float:
    """Gaussian log likelihood of a block of rows under one component."""
    return float(np.sum(mvn_logpdf_rows(rows, mu, cov_chol)))


def sample_mvn_from_precision(prec: NDArray, rhs: NDArray, rng) -> NDArray:
    """Draw from N(prec^-1 rhs, prec^-1) without forming the inverse."""
    low = cholesky_lax(prec)
    mean = cho_solve((low, True), rhs, check_finite=False)
    z = rng.standard_normal(rhs.shape[0])
    return mean + solve_triangular(low.T, z, lower=False, check_finite=False)


def update_mu_c(rows: NDArray, cov_chol: NDArray, shared: SharedState, rng) -> NDArray:
    """Conjugate draw of a component mean given its rows and covariance.

    Posterior precision is Sigma0^-1 + n_c Sigma_c^-1; with no rows this is
    a prior draw from N(mu0, Sigma0).
    """
    rows = np.atleast_2d(rows) if np.size(rows) else np.empty((0, shared.mu0.shape[0]))
    n_c = rows.shape[0]
    if n_c == 0:
        return shared.mu0 + shared.sigma0_chol @ rng.standard_normal(shared.mu0.shape[0])
    eye = np.eye(shared.mu0.shape[0])
    cov_inv = cho_solve((cov_chol, True), eye, check_finite=False)
    prec = shared.sigma0_inv + n_c * cov_inv
    rhs = shared.sigma0_inv @ shared.mu0 + cov_inv @ rows.sum(axis=0)
    return sample_mvn_from_precision(prec, rhs, rng)


def update_mu0(mus: NDArray, shared: SharedState, rng) -> NDArray:
    """Conjugate draw of mu0 given the nonempty components' means."""
    mus = np.atleast_2d(mus) if np.size(mus) else np.empty((0, shared.mu0.shape[0]))
    k = mus.shape[0]
    prec = shared.sigma00_inv + k * shared.sigma0_inv
    rhs = shared.sigma00_inv @ shared.mu00
    if k:
        rhs = rhs + shared.sigma0_inv @ mus.sum(axis=0)
    return sample_mvn_from_precision(prec, rhs, rng)


def make_shared(data_values: NDArray, extra: dict | None = None) -> SharedState:
    """Shared-state defaults from the data: vague range-scaled priors.

    mu00 is the sample mean, Sigma00 = Sigma0 = diag(range^2); Sigma0 stays
    fixed for the whole run while mu0 gets a conjugate update per sweep.
    """
    values = np.atleast_2d(np.asarray(data_values, dtype=float))
    mu00 = values.mean(axis=0)
    ranges = values.max(axis=0) - values.min(axis=0)
    # a single observation carries no spread; fall back to unit scale
    ranges = np.where(ranges > 0.0, ranges, 1.0)
    sigma0 = np.diag(ranges ** 2)
    sigma0_inv = np.diag(1.0 / ranges ** 2)
    sigma0_chol = np.diag(ranges)
    return SharedState(
        mu0=mu00.copy(),
        sigma0=sigma0,
        sigma0_inv=sigma0_inv,
        sigma0_chol=sigma0_chol,
        mu00=mu00,
        sigma00_inv=sigma0_inv.copy(),
        extra=dict(extra or {}),
    )
