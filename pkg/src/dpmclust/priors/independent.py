"""Within-cluster independence baseline: diagonal covariance, inverse-gamma
variances."""

import numpy as np

from ..variates import sample_inv_gamma
from .base import CovariancePrior, CovDraw


class IndependentPrior(CovariancePrior):
    """Per-dimension InvGamma(a_v, b_vj) prior on the diagonal variances.

    b_vj defaults to (range_j / 4)^2 so the prior mean variance matches a
    quarter of each column's spread; off-diagonals are identically zero.
    """

    name = "independent"
    hyper_keys = ("a_v", "b_v", "b_v_scale")

    def __init__(self, j, col_ranges, hyper=None):
        super().__init__(j, col_ranges, hyper)
        self.a_v = float(self.hyper.get("a_v", 2.0))
        if self.a_v <= 1.0:
            raise ValueError("independent: a_v must exceed 1 for a finite prior mean")
        default_b = (self.a_v - 1.0) * (self.col_ranges / 4.0) ** 2
        if "b_v" in self.hyper:
            self.b_v = np.broadcast_to(np.asarray(self.hyper["b_v"], dtype=float), (j,)).astype(float)
        else:
            self.b_v = default_b * float(self.hyper.get("b_v_scale", 1.0))

    def _diag_draw(self, variances):
        sd = np.sqrt(variances)
        return CovDraw(cov=np.diag(variances), cov_chol=np.diag(sd))

    def _g0(self, shared_extra, rng):
        var = np.array([sample_inv_gamma(self.a_v, b, rng) for b in self.b_v])
        return self._diag_draw(var)

    def update_component(self, scatter, n_c, shared_extra, prev, rng):
        if n_c == 0:
            return self.g0_draw(shared_extra, rng)
        shape = self.a_v + 0.5 * n_c
        scale = self.b_v + 0.5 * np.diag(scatter)
        var = np.array([sample_inv_gamma(shape, s, rng) for s in scale])
        return self._diag_draw(var)
