import numpy as np
import pytest

from dpmclust.errors import NotPositiveDefinite
from dpmclust.linalg import cholesky, cholesky_lax, spectral, matrix_log, matrix_exp, symmetrize


def random_pd(j, rng, cond=10.0):
    q, _ = np.linalg.qr(rng.standard_normal((j, j)))
    lam = np.exp(np.linspace(0.0, np.log(cond), j))
    return symmetrize((q * lam) @ q.T)


def test_cholesky_identity():
    low = cholesky(np.eye(3))
    assert np.allclose(low, np.eye(3))


def test_cholesky_hand_2x2():
    low = cholesky(np.array([[4.0, 2.0], [2.0, 5.0]]))
    assert np.allclose(low, np.array([[2.0, 0.0], [1.0, 2.0]]))


def test_cholesky_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_cholesky_rejects_tiny_pivot():
    a = np.diag([1.0, 1e-15])
    with pytest.raises(NotPositiveDefinite):
        cholesky(a)
    # the lax variant accepts anything LAPACK can factor
    low = cholesky_lax(a)
    assert np.allclose(low @ low.T, a)


@pytest.mark.parametrize("j", [1, 2, 6, 20])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_cholesky_reconstruction(j, seed):
    a = random_pd(j, np.random.default_rng(seed))
    low = cholesky(a)
    rel = np.linalg.norm(low @ low.T - a) / np.linalg.norm(a)
    assert rel < 1e-10
    assert np.allclose(np.tril(low), low)


def test_spectral_diagonal():
    w, vec = spectral(np.diag([3.0, 1.0]))
    assert np.allclose(w, [3.0, 1.0])
    assert np.allclose(np.abs(vec), np.eye(2))


def test_spectral_classic_pair():
    w, _ = spectral(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(w, [3.0, 1.0])


def test_spectral_recovers_constructed_eigenvalues():
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    lam = np.array([9.0, 5.5, 3.0, 1.0, 0.5, 0.1])
    a = symmetrize((q * lam) @ q.T)
    w, vec = spectral(a)
    assert np.allclose(w, lam, atol=1e-10)
    recon = (vec * w) @ vec.T
    assert np.linalg.norm(recon - a) / np.linalg.norm(a) < 1e-10
    assert np.linalg.norm(vec.T @ vec - np.eye(6)) < 1e-10


@pytest.mark.parametrize("j", [1, 2, 6, 20])
def test_spectral_properties_random(j):
    a = random_pd(j, np.random.default_rng(10 + j), cond=100.0)
    w, vec = spectral(a)
    assert np.all(np.diff(w) <= 1e-12)
    assert np.linalg.norm((vec * w) @ vec.T - a) / np.linalg.norm(a) < 1e-10
    assert np.linalg.norm(vec.T @ vec - np.eye(j)) < 1e-10


def test_matrix_log_identity_and_diag():
    assert np.allclose(matrix_log(np.eye(4)), np.zeros((4, 4)))
    got = matrix_log(np.diag([np.e, np.e ** 2]))
    assert np.allclose(got, np.diag([1.0, 2.0]))


def test_matrix_log_requires_pd():
    with pytest.raises(NotPositiveDefinite):
        matrix_log(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_log_exp_round_trip_20x20():
    a = random_pd(20, np.random.default_rng(4), cond=1e4)
    back = matrix_exp(matrix_log(a))
    assert np.linalg.norm(back - a) / np.linalg.norm(a) < 1e-8


def test_matrix_exp_always_pd():
    rng = np.random.default_rng(5)
    for _ in range(5):
        a = symmetrize(rng.standard_normal((5, 5)))
        cholesky(matrix_exp(a))
