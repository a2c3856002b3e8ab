"""Log-covariance prior: multivariate normal on the matrix logarithm.

The component update is an independence Metropolis-Hastings step. The
proposal is a multivariate t centered on the mean of the approximate
posterior obtained by a second-order expansion of the Gaussian
log-likelihood in the log-matrix coordinates around the log of the
(regularized) within-cluster scatter. Acceptance always uses the exact
likelihood, so the expansion only affects efficiency, never the
stationary distribution.
"""

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from ..errors import QComputationOverflow
from ..linalg import cholesky_lax, symmetrize
from ..variates import LOG_2PI
from .base import CovariancePrior, CovDraw


def _eta(u):
    """(exp(u) - 1 - u) / u**2, series-expanded near zero."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-4
    safe = np.where(small, 1.0, u)
    exact = (np.expm1(safe) - safe) / safe ** 2
    series = 0.5 + u / 6.0 + u ** 2 / 24.0
    return np.where(small, series, exact)


class LogCovPrior(CovariancePrior):
    name = "log"
    hyper_keys = ("mu_diag", "mu_offdiag", "var_diag", "var_offdiag",
                  "proposal_df", "dim_cap")

    def __init__(self, j, col_ranges, hyper=None):
        super().__init__(j, col_ranges, hyper)
        cap = int(self.hyper.get("dim_cap", 25))
        if j > cap:
            raise QComputationOverflow(
                f"log prior proposal precision is O(J^4); J={j} exceeds cap {cap}")
        self.q = j * (j + 1) // 2
        # coordinate order: the J diagonal entries, then off-diagonals by
        # ascending distance from the diagonal
        rows = list(range(j))
        cols = list(range(j))
        for off in range(1, j):
            for k in range(j - off):
                rows.append(k)
                cols.append(k + off)
        self._rows = np.asarray(rows)
        self._cols = np.asarray(cols)
        mu_d = float(self.hyper.get("mu_diag", -1.0))
        mu_o = float(self.hyper.get("mu_offdiag", 0.0))
        var_d = float(self.hyper.get("var_diag", 3.0))
        var_o = float(self.hyper.get("var_offdiag", 1.0))
        self.mu_a = np.concatenate((np.full(j, mu_d), np.full(self.q - j, mu_o)))
        self.var_a = np.concatenate((np.full(j, var_d), np.full(self.q - j, var_o)))
        self.proposal_df = float(self.hyper.get("proposal_df", 7.0))

    # -- coordinate maps ----------------------------------------------------

    def vec_to_matrix(self, avec):
        mat = np.zeros((self.j, self.j))
        mat[self._rows, self._cols] = avec
        mat[self._cols, self._rows] = avec
        return mat

    def matrix_to_vec(self, mat):
        return np.asarray(mat)[self._rows, self._cols].copy()

    # -- densities ----------------------------------------------------------

    def prior_logpdf(self, avec):
        dev = avec - self.mu_a
        return -0.5 * float(np.sum(dev ** 2 / self.var_a))

    def exact_loglik(self, avec, scatter, n_c):
        """Exact Gaussian log likelihood in log-matrix coordinates.

        log|Sigma| equals the trace of the log matrix, so only one
        eigendecomposition per evaluation is needed.
        """
        mat = self.vec_to_matrix(avec)
        lam, vec = np.linalg.eigh(mat)
        trace_term = float(np.einsum("i,ji,jk,ki->", np.exp(-lam), vec, scatter, vec))
        return -0.5 * (n_c * self.j * LOG_2PI + n_c * float(np.sum(lam)) + trace_term)

    # -- expansion ------------------------------------------------------------

    def taylor_expansion(self, scatter, n_c):
        """Expansion point and curvature of the likelihood in `a` coordinates.

        Returns (lam_vec, Q): the half-vectorized log of the regularized
        scatter mean and the q x q precision contribution such that the
        likelihood is approximately const - 0.5 (a - lam)' Q (a - lam).
        """
        s_bar = symmetrize(scatter / max(n_c, 1))
        d, e = np.linalg.eigh(s_bar)
        floor = 1e-6 * max(float(d[-1]), 1.0)
        d = np.maximum(d, floor)
        log_d = np.log(d)
        a0 = symmetrize((e * log_d) @ e.T)
        lam_vec = self.matrix_to_vec(a0)

        u = log_d[:, None] - log_d[None, :]
        eta = _eta(u)
        eta = 0.5 * (eta + eta.T)

        basis = e[self._rows][:, :, None] * e[self._cols][:, None, :]  # (q, J, J)
        basis = basis + np.transpose(basis, (0, 2, 1))
        basis[: self.j] *= 0.5  # diagonal coordinates are not doubled
        q_mat = n_c * np.einsum("pij,ij,qij->pq", basis, eta, basis)
        return lam_vec, symmetrize(q_mat)

    # -- draws ---------------------------------------------------------------

    def _g0(self, shared_extra, rng):
        avec = self.mu_a + np.sqrt(self.var_a) * rng.standard_normal(self.q)
        return self._compose(avec)

    def _compose(self, avec):
        mat = self.vec_to_matrix(avec)
        lam, vec = np.linalg.eigh(mat)
        cov = symmetrize((vec * np.exp(lam)) @ vec.T)
        return CovDraw(cov=cov, cov_chol=cholesky_lax(cov), latents={"avec": avec})

    def _mvt_quad(self, dev, prec_chol):
        w = prec_chol.T @ dev
        return float(w @ w)

    def update_component(self, scatter, n_c, shared_extra, prev, rng):
        if n_c == 0:
            return self.g0_draw(shared_extra, rng)
        lam_vec, q_mat = self.taylor_expansion(scatter, n_c)
        prec = q_mat + np.diag(1.0 / self.var_a)
        prec_chol = cholesky_lax(prec)
        rhs = self.mu_a / self.var_a + q_mat @ lam_vec
        center = cho_solve((prec_chol, True), rhs, check_finite=False)

        df = self.proposal_df
        z = rng.standard_normal(self.q)
        g = rng.chisquare(df)
        step = solve_triangular(prec_chol.T, z, lower=False, check_finite=False)
        proposal = center + step * np.sqrt(df / g)

        a_cur = prev.latents["avec"]
        half = 0.5 * (df + self.q)
        log_q_cur = -half * np.log1p(self._mvt_quad(a_cur - center, prec_chol) / df)
        log_q_prop = -half * np.log1p(self._mvt_quad(proposal - center, prec_chol) / df)
        log_target_cur = self.prior_logpdf(a_cur) + self.exact_loglik(a_cur, scatter, n_c)
        log_target_prop = self.prior_logpdf(proposal) + self.exact_loglik(proposal, scatter, n_c)

        delta = (log_target_prop - log_target_cur) - (log_q_prop - log_q_cur)
        if np.log(rng.random()) < delta:
            self._record_mh("log_a", True)
            return self._compose(proposal)
        self._record_mh("log_a", False)
        return prev
