import numpy as np
import pytest

from dpmclust.errors import DegreesOfFreedomTooSmall
from dpmclust.linalg import cholesky
from dpmclust.variates import (mvn_logpdf, mvn_logpdf_rows, sample_mvn,
                               sample_wishart, sample_inv_wishart,
                               sample_inv_gaussian, sample_mvt,
                               sample_gamma, sample_inv_gamma)

N_DRAWS = 100_000


def test_mvn_sample_mean_identity_cov():
    rng = np.random.default_rng(0)
    low = cholesky(np.eye(2))
    draws = np.array([sample_mvn(np.zeros(2), low, rng) for _ in range(N_DRAWS)])
    assert np.all(np.abs(draws.mean(axis=0)) < 0.02)


def test_mvn_sample_covariance():
    rng = np.random.default_rng(1)
    cov = np.array([[2.0, 0.6, 0.3], [0.6, 1.5, -0.4], [0.3, -0.4, 1.0]])
    mu = np.array([1.0, -2.0, 0.5])
    low = cholesky(cov)
    draws = np.array([sample_mvn(mu, low, rng) for _ in range(N_DRAWS)])
    got = np.cov(draws.T)
    assert np.all(np.abs(got - cov) < 0.05 * np.abs(cov).max())


def test_mvn_sample_deterministic():
    low = cholesky(np.array([[2.0, 0.3], [0.3, 1.0]]))
    a = sample_mvn(np.zeros(2), low, np.random.default_rng(7))
    b = sample_mvn(np.zeros(2), low, np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_mvn_logpdf_standard_bivariate():
    got = mvn_logpdf(np.zeros(2), np.zeros(2), cholesky(np.eye(2)))
    assert abs(got - (-np.log(2 * np.pi))) < 1e-12


def test_mvn_logpdf_scalar_case():
    got = mvn_logpdf(np.array([2.0]), np.array([0.0]), cholesky(np.array([[4.0]])))
    expected = -0.5 * np.log(8 * np.pi) - 0.5
    assert abs(got - expected) < 1e-12


def test_mvn_logpdf_matches_naive_formula():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((4, 4))
    cov = a @ a.T + 4 * np.eye(4)
    mu = rng.standard_normal(4)
    x = rng.standard_normal(4)
    naive = (-2.0 * np.log(2 * np.pi)
             - 0.5 * np.log(np.linalg.det(cov))
             - 0.5 * (x - mu) @ np.linalg.inv(cov) @ (x - mu))
    assert abs(mvn_logpdf(x, mu, cholesky(cov)) - naive) < 1e-10


def test_mvn_logpdf_rows_matches_loop():
    rng = np.random.default_rng(3)
    cov = np.array([[1.5, 0.4], [0.4, 2.0]])
    low = cholesky(cov)
    mu = np.array([0.5, -1.0])
    rows = rng.standard_normal((5, 2))
    batch = mvn_logpdf_rows(rows, mu, low)
    single = [mvn_logpdf(r, mu, low) for r in rows]
    assert np.allclose(batch, single, atol=1e-12)


def test_wishart_scalar_mean():
    rng = np.random.default_rng(4)
    draws = np.array([sample_wishart(np.array([[1.0]]), 4.0, rng)[0, 0]
                      for _ in range(N_DRAWS)])
    assert abs(draws.mean() - 4.0) < 0.02 * 4.0


def test_wishart_matrix_mean_and_pd():
    rng = np.random.default_rng(5)
    total = np.zeros((3, 3))
    for _ in range(20_000):
        w = sample_wishart(np.eye(3), 10.0, rng)
        total += w
    mean = total / 20_000
    assert np.all(np.abs(mean - 10.0 * np.eye(3)) < 0.5)
    for _ in range(200):
        cholesky(sample_wishart(np.eye(3), 10.0, rng))


def test_wishart_df_bound():
    with pytest.raises(DegreesOfFreedomTooSmall):
        sample_wishart(np.eye(3), 1.5, np.random.default_rng(0))


def test_inv_wishart_scalar_matches_inv_gamma():
    rng = np.random.default_rng(6)
    draws = np.array([sample_inv_wishart(np.array([[2.0]]), 5.0, rng)[0, 0]
                      for _ in range(N_DRAWS)])
    # InvGamma(2.5, 1) mean = 2/3
    assert abs(draws.mean() - 2.0 / 3.0) < 0.02 * (2.0 / 3.0)


def test_inv_wishart_matrix_mean():
    rng = np.random.default_rng(7)
    total = np.zeros((2, 2))
    n = 40_000
    for _ in range(n):
        total += sample_inv_wishart(np.eye(2), 6.0, rng)
    mean = total / n
    assert np.all(np.abs(mean - np.eye(2) / 3.0) < 0.05 * (1.0 / 3.0) * 3)


def test_inv_wishart_duality_with_wishart():
    # X ~ IW(S, df) iff X^-1 ~ Wishart(S^-1, df): compare E[X^-1] to df S^-1
    rng = np.random.default_rng(8)
    scale = np.array([[2.0, 0.5], [0.5, 1.0]])
    n = 20_000
    total = np.zeros((2, 2))
    for _ in range(n):
        total += np.linalg.inv(sample_inv_wishart(scale, 7.0, rng))
    mean_prec = total / n
    expected = 7.0 * np.linalg.inv(scale)
    assert np.all(np.abs(mean_prec - expected) < 0.05 * np.abs(expected).max())


def test_inv_gaussian_mean():
    rng = np.random.default_rng(9)
    draws = sample_inv_gaussian(1.0, 1.0, rng, size=N_DRAWS)
    assert abs(draws.mean() - 1.0) < 0.02


def test_inv_gaussian_variance():
    rng = np.random.default_rng(10)
    draws = sample_inv_gaussian(2.0, 8.0, rng, size=N_DRAWS)
    # variance mu^3/lambda = 1
    assert abs(draws.var() - 1.0) < 0.05


def test_inv_gaussian_strictly_positive():
    rng = np.random.default_rng(11)
    draws = sample_inv_gaussian(1.0, 0.5, rng, size=1_000_000)
    assert np.all(draws > 0.0)
    # extreme mean/shape ratios must stay finite and positive
    extreme = sample_inv_gaussian(1e12, 9.0, rng, size=1000)
    assert np.all(np.isfinite(extreme)) and np.all(extreme > 0)


def test_mvt_normal_limit():
    rng = np.random.default_rng(12)
    low = cholesky(np.eye(2))
    draws = np.array([sample_mvt(np.zeros(2), low, 200.0, rng) for _ in range(N_DRAWS)])
    got = np.cov(draws.T)
    assert np.all(np.abs(got - np.eye(2)) < 0.05)


def test_mvt_covariance_df5():
    rng = np.random.default_rng(13)
    low = cholesky(np.eye(2))
    draws = np.array([sample_mvt(np.zeros(2), low, 5.0, rng) for _ in range(N_DRAWS)])
    got = np.cov(draws.T)
    expected = (5.0 / 3.0) * np.eye(2)
    assert np.all(np.abs(got - expected) < 0.1 * (5.0 / 3.0))


def test_mvt_deterministic():
    low = cholesky(np.eye(3))
    a = sample_mvt(np.ones(3), low, 7.0, np.random.default_rng(42))
    b = sample_mvt(np.ones(3), low, 7.0, np.random.default_rng(42))
    assert np.array_equal(a, b)


def test_gamma_rate_convention():
    rng = np.random.default_rng(14)
    draws = sample_gamma(3.0, 2.0, rng, size=N_DRAWS)
    assert abs(draws.mean() - 1.5) < 0.02


def test_inv_gamma_convention():
    rng = np.random.default_rng(15)
    draws = sample_inv_gamma(3.0, 2.0, rng, size=N_DRAWS)
    assert abs(draws.mean() - 1.0) < 0.02
