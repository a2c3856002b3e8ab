"""Inverse Wishart component prior and its two hierarchical extensions."""

import numpy as np
from scipy.linalg import cho_solve

from ..linalg import cholesky, symmetrize
from ..variates import sample_inv_wishart, sample_wishart, sample_inv_gamma
from .base import CovariancePrior, CovDraw, chol_draw, invgamma_logpdf, invwishart_logpdf


def _cov_inverse(draw: CovDraw) -> np.ndarray:
    eye = np.eye(draw.cov.shape[0])
    inv = cho_solve((draw.cov_chol, True), eye, check_finite=False)
    return symmetrize(inv)


def _cov_logdet(draw: CovDraw) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(draw.cov_chol))))


class IWPrior(CovariancePrior):
    """Fixed inverse Wishart prior on each component covariance.

    Defaults are vague and range-scaled: scale matrix diag(range^2) with
    J + 2 degrees of freedom, keeping the prior mean variance at the square
    of each column's observed spread.
    """

    name = "iw"
    hyper_keys = ("kappa0", "r0", "r0_diag")

    def __init__(self, j, col_ranges, hyper=None):
        super().__init__(j, col_ranges, hyper)
        self.kappa0 = float(self.hyper.get("kappa0", j + 2))
        if self.kappa0 <= j + 1:
            raise ValueError("iw: kappa0 must exceed J + 1")
        if "r0" in self.hyper:
            self.r0 = np.asarray(self.hyper["r0"], dtype=float)
        else:
            diag = np.asarray(self.hyper.get("r0_diag", self.col_ranges ** 2), dtype=float)
            self.r0 = np.diag(np.broadcast_to(diag, (j,)).astype(float))
        cholesky(self.r0)

    def _g0(self, shared_extra, rng):
        return chol_draw(sample_inv_wishart(self.r0, self.kappa0, rng))

    def update_component(self, scatter, n_c, shared_extra, prev, rng):
        if n_c == 0:
            return self.g0_draw(shared_extra, rng)
        return chol_draw(sample_inv_wishart(self.r0 + scatter, self.kappa0 + n_c, rng))


class HIW1Prior(CovariancePrior):
    """Inverse Wishart with a Wishart hyperprior on its scale matrix.

    R0 gets a conjugate Wishart update from all nonempty components at
    once; kappa0 - J moves by random-walk Metropolis on the log scale
    against its inverse-gamma prior.
    """

    name = "hiw1"
    hyper_keys = ("kappa1", "a_kappa0", "b_kappa0", "r1")

    def __init__(self, j, col_ranges, hyper=None):
        super().__init__(j, col_ranges, hyper)
        self.kappa1 = float(self.hyper.get("kappa1", j + 2))
        self.a_kappa0 = float(self.hyper.get("a_kappa0", 0.5))
        self.b_kappa0 = float(self.hyper.get("b_kappa0", j / 2.0))
        self.r1 = np.asarray(self.hyper.get("r1", np.eye(j)), dtype=float)
        self.r1_inv = np.linalg.inv(self.r1)

    def init_shared(self, rng):
        r0 = sample_wishart(self.r1_inv, self.kappa1, rng)
        kappa0 = self.j + sample_inv_gamma(self.a_kappa0, self.b_kappa0, rng)
        return {"r0": r0, "kappa0": float(kappa0)}

    def _g0(self, shared_extra, rng):
        return chol_draw(sample_inv_wishart(shared_extra["r0"], shared_extra["kappa0"], rng))

    def update_component(self, scatter, n_c, shared_extra, prev, rng):
        if n_c == 0:
            return self.g0_draw(shared_extra, rng)
        return chol_draw(sample_inv_wishart(shared_extra["r0"] + scatter,
                                            shared_extra["kappa0"] + n_c, rng))

    def update_shared(self, draws, shared_extra, rng):
        kappa0 = shared_extra["kappa0"]
        if not draws:
            r0 = sample_wishart(self.r1_inv, self.kappa1, rng)
            t = sample_inv_gamma(self.a_kappa0, self.b_kappa0, rng)
            return {"r0": r0, "kappa0": float(self.j + t)}

        inverses = [_cov_inverse(d) for d in draws]
        prec_sum = symmetrize(self.r1 + sum(inverses))
        scale = np.linalg.inv(prec_sum)
        r0 = sample_wishart(symmetrize(scale), self.kappa1 + len(draws) * kappa0, rng)

        r0_chol = cholesky(r0)
        r0_logdet = 2.0 * float(np.sum(np.log(np.diag(r0_chol))))
        logdets = [_cov_logdet(d) for d in draws]
        traces = [float(np.sum(r0 * inv)) for inv in inverses]

        def logpost(t):
            df = self.j + t
            out = invgamma_logpdf(t, self.a_kappa0, self.b_kappa0)
            for ld, tr in zip(logdets, traces):
                out += invwishart_logpdf(ld, tr, r0_logdet, df, self.j)
            return out

        t_new = self.rw_positive("hiw1_kappa0", kappa0 - self.j, logpost, rng)
        return {"r0": r0, "kappa0": float(self.j + t_new)}


class HIW2Prior(CovariancePrior):
    """Huang-Wand style prior: inverse Wishart with diagonal scale built
    from per-dimension inverse-gamma latents delta_j.

    The delta_j full conditionals depend only on the diagonals of the
    component precisions; eps0 - 1 moves by log-scale random walk.
    """

    name = "hiw2"
    hyper_keys = ("alpha_delta", "g", "g_scale", "a_eps0", "b_eps0")

    def __init__(self, j, col_ranges, hyper=None):
        super().__init__(j, col_ranges, hyper)
        self.alpha_delta = float(self.hyper.get("alpha_delta", 0.2))
        default_g = 20.0 * j / self.col_ranges ** 2
        if "g" in self.hyper:
            self.g = np.broadcast_to(np.asarray(self.hyper["g"], dtype=float), (j,)).astype(float)
        else:
            self.g = default_g * float(self.hyper.get("g_scale", 1.0))
        self.a_eps0 = float(self.hyper.get("a_eps0", 0.5))
        self.b_eps0 = float(self.hyper.get("b_eps0", j / 2.0))

    def init_shared(self, rng):
        delta = np.array([sample_inv_gamma(self.alpha_delta, g, rng) for g in self.g])
        eps0 = 1.0 + sample_inv_gamma(self.a_eps0, self.b_eps0, rng)
        return {"delta": delta, "eps0": float(eps0)}

    def _scale_matrix(self, shared_extra):
        return np.diag(2.0 * shared_extra["eps0"] / shared_extra["delta"])

    def _g0(self, shared_extra, rng):
        df = shared_extra["eps0"] + self.j - 1.0
        return chol_draw(sample_inv_wishart(self._scale_matrix(shared_extra), df, rng))

    def update_component(self, scatter, n_c, shared_extra, prev, rng):
        if n_c == 0:
            return self.g0_draw(shared_extra, rng)
        df = shared_extra["eps0"] + self.j - 1.0 + n_c
        return chol_draw(sample_inv_wishart(self._scale_matrix(shared_extra) + scatter, df, rng))

    def update_shared(self, draws, shared_extra, rng):
        eps0 = shared_extra["eps0"]
        if not draws:
            delta = np.array([sample_inv_gamma(self.alpha_delta, g, rng) for g in self.g])
            eps0 = 1.0 + sample_inv_gamma(self.a_eps0, self.b_eps0, rng)
            return {"delta": delta, "eps0": float(eps0)}

        prec_diags = np.array([np.diag(_cov_inverse(d)) for d in draws])  # (|A|, J)
        df = eps0 + self.j - 1.0
        shape = self.alpha_delta + 0.5 * len(draws) * df
        scale = self.g + eps0 * prec_diags.sum(axis=0)
        delta = np.array([sample_inv_gamma(shape, s, rng) for s in scale])

        logdets = [_cov_logdet(d) for d in draws]
        # trace of (2 eps0 diag(1/delta)) Sigma^-1 = 2 eps0 sum_j prec_jj/delta_j
        weighted = prec_diags @ (1.0 / delta)

        def logpost(e):
            eps = 1.0 + e
            df_e = eps + self.j - 1.0
            scale_logdet = self.j * np.log(2.0 * eps) - float(np.sum(np.log(delta)))
            out = invgamma_logpdf(e, self.a_eps0, self.b_eps0)
            for ld, w in zip(logdets, weighted):
                out += invwishart_logpdf(ld, 2.0 * eps * w, scale_logdet, df_e, self.j)
            return out

        e_new = self.rw_positive("hiw2_eps0", eps0 - 1.0, logpost, rng)
        return {"delta": delta, "eps0": float(1.0 + e_new)}
