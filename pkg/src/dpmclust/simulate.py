"""Deterministic generators for the comparative-study simulation designs."""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .data import FeatureMatrix
from .errors import NotPositiveDefinite, IndivisibleBlocks


def equicorr_cov(j: int, var: float, rho: float) -> NDArray:
    """Covariance with common variance and one shared correlation.

    Positive definite iff rho > -1/(J-1); violations raise.
    """
    if j > 1 and rho <= -1.0 / (j - 1):
        raise NotPositiveDefinite(f"rho={rho} at or below the -1/(J-1) bound")
    if not -1.0 < rho < 1.0:
        raise NotPositiveDefinite(f"rho={rho} outside (-1, 1)")
    cov = np.full((j, j), var * rho)
    np.fill_diagonal(cov, var)
    return cov


def blockcorr_cov(j: int, var: float, rho: float, nblocks: int) -> NDArray:
    """Block-diagonal covariance: equal blocks, within-block correlation
    rho, independence between blocks."""
    if j % nblocks:
        raise IndivisibleBlocks(f"J={j} not divisible into {nblocks} blocks")
    size = j // nblocks
    block = equicorr_cov(size, var, rho)
    cov = np.zeros((j, j))
    for b in range(nblocks):
        sl = slice(b * size, (b + 1) * size)
        cov[sl, sl] = block
    return cov


@dataclass
class ClusterSpec:
    mu: NDArray
    var: float
    rho: float
    n: int


@dataclass
class ScenarioSpec:
    """Cluster means/shapes plus the correlation structure they share."""

    clusters: list
    correlation_kind: str = "equicorrelated"   # or "block"
    nblocks: int = 1
    seed: int | None = None
    name: str = ""

    @property
    def j(self) -> int:
        return len(self.clusters[0].mu)

    def cov(self, cluster: ClusterSpec) -> NDArray:
        if self.correlation_kind == "block":
            return blockcorr_cov(self.j, cluster.var, cluster.rho, self.nblocks)
        return equicorr_cov(self.j, cluster.var, cluster.rho)


def generate(spec: ScenarioSpec, rng=None) -> tuple[FeatureMatrix, NDArray]:
    """Draw the scenario and shuffle rows; returns data plus true labels."""
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    blocks = []
    labels = []
    for c, cluster in enumerate(spec.clusters):
        cov = spec.cov(cluster)
        low = np.linalg.cholesky(cov)
        draws = rng.standard_normal((cluster.n, spec.j)) @ low.T + np.asarray(cluster.mu)
        blocks.append(draws)
        labels.append(np.full(cluster.n, c + 1))
    values = np.vstack(blocks)
    truth = np.concatenate(labels)
    perm = rng.permutation(values.shape[0])
    return FeatureMatrix(values[perm]), truth[perm]


def _rep(*pairs) -> NDArray:
    return np.concatenate([np.full(count, val, dtype=float) for val, count in pairs])


def _scenario(name, means, var, rhos, n_c, kind="equicorrelated", nblocks=1):
    clusters = [ClusterSpec(mu=np.asarray(m, dtype=float), var=var, rho=r, n=n_c)
                for m, r in zip(means, rhos)]
    return ScenarioSpec(clusters=clusters, correlation_kind=kind,
                        nblocks=nblocks, name=name)


_MEANS_6 = [
    (5, 35, 75, 5, 5, 5),
    (35, 5, 5, 5, 5, 5),
    (5, 75, 5, 5, 5, 35),
    (5, 5, 35, 5, 5, 75),
    (35, 75, 35, 5, 5, 5),
]

_MEANS_20_A = [
    _rep((3, 5), (32, 5), (35, 5), (72, 5)),
    _rep((32, 5), (5, 5), (5, 5), (35, 5)),
    _rep((25, 5), (15, 5), (32, 5), (3, 5)),
    _rep((15, 5), (75, 5), (8, 5), (75, 5)),
    _rep((8, 5), (6, 5), (25, 5), (5, 5)),
]

_MEANS_20_B = [
    _rep((3, 5), (12, 5), (18, 5), (12, 5)),
    _rep((12, 5), (18, 5), (3, 5), (18, 5)),
    _rep((18, 5), (18, 5), (12, 5), (8, 5)),
    _rep((18, 5), (3, 5), (8, 5), (3, 5)),
    _rep((8, 5), (8, 5), (12, 5), (3, 5)),
]


def _presets() -> dict:
    out = {
        "data1": _scenario("data1", _MEANS_6, 1.0, [0.0] * 5, 100),
        "data2": _scenario("data2", _MEANS_20_A, 5.0, [0.2, 0.5, 0.3, 0.1, 0.7], 200),
        "data3": _scenario("data3", _MEANS_20_B, 3.0, [0.2, 0.5, 0.3, 0.1, 0.7], 200),
        "data4": _scenario("data4", _MEANS_20_B, 9.0, [0.2, 0.5, 0.3, 0.1, 0.7], 200),
        "data5": _scenario("data5", _MEANS_20_B, 3.0, [0.7] * 5, 200,
                           kind="block", nblocks=5),
        "data6": _scenario("data6", _MEANS_20_B, 9.0, [0.7] * 5, 200,
                           kind="block", nblocks=5),
        "data7": _scenario("data7", _MEANS_20_B, 9.0, [0.7] * 5, 500,
                           kind="block", nblocks=5),
    }
    return out


PRESETS = _presets()
