"""Common machinery for the interchangeable covariance priors.

Each family implements a prior draw for empty components, the component
full-conditional update given a within-cluster scatter matrix, and an
update of its shared hyperparameters given the nonempty components. All
random-walk Metropolis scales live on the family instance (one instance
per chain) and adapt toward 0.35 acceptance during burn-in only.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.special import gammaln, multigammaln

from ..errors import NotPositiveDefinite
from ..linalg import cholesky_lax

MH_TARGET_ACCEPT = 0.35
_G0_RETRY_CAP = 100


@dataclass
class CovDraw:
    """Covariance block of a component: matrix, factor, family latents."""

    cov: NDArray
    cov_chol: NDArray
    latents: dict = field(default_factory=dict)


def invgamma_logpdf(x: float, shape: float, scale: float) -> float:
    """log InvGamma(x; shape, scale), mean scale/(shape-1)."""
    return shape * np.log(scale) - gammaln(shape) - (shape + 1.0) * np.log(x) - scale / x


def gamma_logpdf(x: float, shape: float, rate: float) -> float:
    """log Gamma(x; shape, rate), mean shape/rate."""
    return shape * np.log(rate) - gammaln(shape) + (shape - 1.0) * np.log(x) - rate * x


def invwishart_logpdf(sigma_logdet: float, trace_scale_sigma_inv: float,
                      scale_logdet: float, df: float, j: int) -> float:
    """log IW density from precomputed determinant and trace pieces."""
    return (0.5 * df * scale_logdet
            - 0.5 * df * j * np.log(2.0)
            - multigammaln(0.5 * df, j)
            - 0.5 * (df + j + 1.0) * sigma_logdet
            - 0.5 * trace_scale_sigma_inv)


class CovariancePrior:
    """Base class; subclasses fill in the family-specific conditionals."""

    name = "?"
    #: hyperparameter keys accepted as overrides
    hyper_keys: tuple = ()

    def __init__(self, j: int, col_ranges: NDArray, hyper: dict | None = None):
        self.j = int(j)
        self.col_ranges = np.asarray(col_ranges, dtype=float)
        hyper = dict(hyper or {})
        unknown = set(hyper) - set(self.hyper_keys)
        if unknown:
            raise ValueError(f"{self.name}: unknown hyperparameters {sorted(unknown)}")
        self.hyper = hyper
        self._scales: dict[str, float] = {}
        self._mh_tries: dict[str, int] = {}
        self._mh_accepts: dict[str, int] = {}
        self.adapt = True

    # -- shared hyperparameter block ------------------------------------

    def init_shared(self, rng) -> dict:
        return {}

    def update_shared(self, draws: list, shared_extra: dict, rng) -> dict:
        return shared_extra

    # -- component covariance -------------------------------------------

    def g0_draw(self, shared_extra: dict, rng) -> CovDraw:
        """Prior draw, retried on numerically non-PD results."""
        for _ in range(_G0_RETRY_CAP):
            try:
                return self._g0(shared_extra, rng)
            except NotPositiveDefinite:
                continue
        raise NotPositiveDefinite(
            f"{self.name}: {_G0_RETRY_CAP} consecutive non-PD prior draws; "
            "hyperparameters are likely mis-set")

    def g0_draw_batch(self, shared_extra: dict, rng, k: int) -> list:
        return [self.g0_draw(shared_extra, rng) for _ in range(k)]

    def _g0(self, shared_extra: dict, rng) -> CovDraw:
        raise NotImplementedError

    def update_component(self, scatter: NDArray, n_c: int, shared_extra: dict,
                         prev: CovDraw, rng) -> CovDraw:
        raise NotImplementedError

    # -- Metropolis bookkeeping ------------------------------------------

    def _scale(self, key: str, default: float = 0.5) -> float:
        return self._scales.setdefault(key, default)

    def _record_mh(self, key: str, accepted: bool):
        self._mh_tries[key] = self._mh_tries.get(key, 0) + 1
        if accepted:
            self._mh_accepts[key] = self._mh_accepts.get(key, 0) + 1
        # independence proposals record acceptance but have no scale to tune
        if self.adapt and key in self._scales:
            step = min(0.25, self._mh_tries[key] ** -0.5)
            move = step * ((1.0 if accepted else 0.0) - MH_TARGET_ACCEPT)
            self._scales[key] = float(np.clip(self._scales[key] * np.exp(move), 1e-3, 50.0))

    def rw_positive(self, key: str, x: float, logpost, rng,
                    default_scale: float = 0.5, reps: int = 10) -> float:
        """Random-walk Metropolis on log(x) for a positive scalar.

        ``logpost`` evaluates the target density in the natural
        parameterization; the log-scale Jacobian is applied here. Several
        passes are made per call: the log-posterior pieces are precomputed
        by the caller, so extra passes are essentially free and they speed
        up mixing over the heavy-tailed hyperpriors considerably.
        """
        cur_val = logpost(x)
        for _ in range(reps):
            sigma = self._scale(key, default_scale)
            prop = x * np.exp(sigma * rng.standard_normal())
            prop_val = logpost(prop)
            delta = prop_val - cur_val + np.log(prop) - np.log(x)
            accepted = np.log(rng.random()) < delta
            self._record_mh(key, bool(accepted))
            if accepted:
                x, cur_val = float(prop), prop_val
        return float(x)

    def acceptance_rates(self) -> dict:
        return {k: self._mh_accepts.get(k, 0) / t for k, t in self._mh_tries.items() if t}


def chol_draw(cov: NDArray, latents: dict | None = None) -> CovDraw:
    """Package a covariance matrix with its factor, enforcing PD.

    Validation is float-level positive definiteness: heavy-tailed
    hyperpriors legitimately produce extreme but valid conditioning.
    """
    return CovDraw(cov=cov, cov_chol=cholesky_lax(cov), latents=latents or {})
