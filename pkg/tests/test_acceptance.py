"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Fast property checks come first; the desk-scale comparative runs (reduced
replicate counts and chain lengths) follow. Everything is deterministic
given the seeds fixed here.
"""

import time

import numpy as np
import pytest
from scipy.stats import mannwhitneyu

from dpmclust.data import FeatureMatrix
from dpmclust.priors import PriorSpec, FAMILIES
from dpmclust.priors.logcov import LogCovPrior
from dpmclust.priors.sparse import SparsePrior
from dpmclust.sampler import McmcConfig, InitStrategy, run_chain
from dpmclust.simulate import PRESETS, generate
from dpmclust.postprocess import similarity, best_partition, adjusted_rand

from geweke import run_geweke, forward_reference, check_moments
from test_postprocess import brute_force_ari


def _report(num, ok, detail):
    print(f"\nACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


# -- 1: adjusted Rand index equals brute-force pair counting -------------------


def test_criterion_1_ari_oracle_equivalence():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 31))
        a = rng.integers(0, int(rng.integers(1, 6)) + 1, n)
        b = rng.integers(0, int(rng.integers(1, 6)) + 1, n)
        worst = max(worst, abs(adjusted_rand(a, b) - brute_force_ari(a, b)))
    hand_zero = abs(adjusted_rand([1, 1, 2, 2], [1, 2, 2, 2]))
    hand_47 = abs(adjusted_rand([1, 1, 2, 2], [1, 1, 2, 3]) - 4.0 / 7.0)
    ok = worst < 1e-12 and hand_zero < 1e-12 and hand_47 < 1e-12
    _report(1, ok, f"max |ari - brute force| = {worst:.2e} over 200 pairs; "
                   f"hand cases 0 and 4/7 exact")


# -- 2: Geweke prior reproduction for all seven priors -------------------------


GEWEKE_SEEDS = {"iw": 210, "hiw1": 211, "hiw2": 212, "separation": 213,
                "log": 214, "sparse": 215, "independent": 216}

# The default hyperpriors on kappa0/eps0/kappa_R/beta_s have shape
# parameters of 0.5 or 0.2, spreading prior mass over e^{+-6}; a
# successive-conditional chain cannot traverse that support in 2e4 cycles,
# so the moment gate would have no power there. The Geweke gate therefore
# runs the identical update code at gentler shapes; the production
# constants are covered by the conjugacy/quadrature oracles in
# test_priors.
GEWEKE_HYPER = {
    "hiw1": {"a_kappa0": 2.5, "b_kappa0": 4.0},
    "hiw2": {"alpha_delta": 2.5, "g": 3.0, "a_eps0": 2.5, "b_eps0": 4.0},
    "separation": {"alpha0": 2.5, "alpha_s": 4.0, "a_kappa_r": 4.0,
                   "b_kappa_r": 8.0, "site_scans": 4},
}


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_criterion_2_geweke(name):
    rng = np.random.default_rng(GEWEKE_SEEDS[name])
    ranges = np.array([4.0, 6.0, 9.0])
    hyper = GEWEKE_HYPER.get(name, {})
    fam = PriorSpec(name, dict(hyper)).build(3, ranges)
    # n = 60 split over six components: the same likelihood terms are
    # exercised while the shared-hyper ladder mixes fast enough for the
    # moment comparison to have power
    chains = run_geweke(fam, n_cycles=20_000, n_per_comp=10, n_comp=6, rng=rng)

    fam_ref = PriorSpec(name, dict(hyper)).build(3, ranges)
    ref, ref_iid = forward_reference(fam_ref, 20_000, np.random.default_rng(1000 + GEWEKE_SEEDS[name]))

    failures = []
    for key in sorted(set(chains) & set(ref)):
        failures += check_moments(f"{name}:{key}", chains[key], ref[key], ref_iid=ref_iid)
    _report(2, not failures,
            f"{name}: {len(set(chains) & set(ref))} functionals x 2 moments within 3 SE"
            + ("" if not failures else f"; failures: {failures}"))


# -- 3: positive definiteness over full chains ---------------------------------


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_criterion_3_pd_safety(name):
    data, _ = generate(PRESETS["data1"], np.random.default_rng(31))
    cfg = McmcConfig(burn_in=1000, main=1000, seed=32, prior=PriorSpec(name),
                     init=InitStrategy(k_init=30))
    checked = 0

    def instrument(rec):
        nonlocal checked
        for comp in rec["state"].components:
            np.linalg.cholesky(comp.cov)
            checked += 1

    run_chain(data, cfg, instrument=instrument)
    _report(3, checked > 0,
            f"{name}: every covariance over 2000 sweeps passed Cholesky "
            f"({checked} factorizations)")


# -- 4: stick normalization and slice validity ---------------------------------


def test_criterion_4_sweep_invariants():
    data, _ = generate(PRESETS["data1"], np.random.default_rng(41))
    cfg = McmcConfig(burn_in=250, main=250, seed=42, prior=PriorSpec("iw"),
                     init=InitStrategy(k_init=30))
    records = []
    run_chain(data, cfg, instrument=records.append)
    slice_ok = all(r["slice_ok"] for r in records)
    norm_ok = all(r["psi_residual"] < 1e-12 for r in records)
    worst = max(r["psi_residual"] for r in records)
    _report(4, slice_ok and norm_ok and len(records) == 500,
            f"500 sweeps: slice validity held, max normalization residual {worst:.2e}")


# -- 5: log-prior expansion gradient check --------------------------------------


def test_criterion_5_log_expansion_gradient():
    fam = LogCovPrior(2, np.ones(2))
    rng = np.random.default_rng(51)
    n = 25
    rows = rng.standard_normal((n, 2)) @ np.array([[1.2, 0.0], [0.5, 0.9]])
    scatter = rows.T @ rows
    lam, q_mat = fam.taylor_expansion(scatter, n)
    avec = lam + 1e-3 * np.array([0.8, -1.0, 0.5])
    grad_quad = -q_mat @ (avec - lam)
    h = 1e-5
    grad_fd = np.zeros(3)
    for p in range(3):
        d = np.zeros(3)
        d[p] = h
        grad_fd[p] = (fam.exact_loglik(avec + d, scatter, n)
                      - fam.exact_loglik(avec - d, scatter, n)) / (2 * h)
    worst = float(np.max(np.abs(grad_quad - grad_fd)))
    _report(5, worst < 1e-4,
            f"quadratic vs finite-difference gradient at J=2: max abs diff {worst:.2e}")


# -- 6: sparse prior correlation shrinkage direction -----------------------------


def test_criterion_6_sparse_shape():
    def prior_abs_corr(m0_off, seed):
        fam = SparsePrior(2, np.ones(2), {"m0_diag": 10.0, "m0_offdiag": m0_off})
        draws = fam.g0_draw_batch({}, np.random.default_rng(seed), 10_000)
        covs = np.array([d.cov for d in draws])
        return np.abs(covs[:, 0, 1] / np.sqrt(covs[:, 0, 0] * covs[:, 1, 1]))

    corr_30 = prior_abs_corr(30.0, 61)
    corr_90 = prior_abs_corr(90.0, 62)
    stat = mannwhitneyu(corr_90, corr_30, alternative="less")
    ok = stat.pvalue < 0.01 and np.median(corr_90) < np.median(corr_30)
    _report(6, ok,
            f"|corr| stochastically smaller at m0_offdiag 90 vs 30 "
            f"(medians {np.median(corr_90):.3f} < {np.median(corr_30):.3f}, "
            f"one-sided rank test p = {stat.pvalue:.2e})")


# -- desk-scale reproductions -----------------------------------------------------


def _desk_run(preset, prior, data_seed, chain_seed, burn=3000, main=2000, hyper=None):
    data, truth = generate(PRESETS[preset], np.random.default_rng(data_seed))
    cfg = McmcConfig(burn_in=burn, main=main, seed=chain_seed,
                     prior=PriorSpec(prior, hyper or {}), init=InitStrategy(k_init=30))
    chain = run_chain(data, cfg)
    part = best_partition(similarity(chain.z_samples), k_max=15)
    ari = adjusted_rand(part, truth)
    sizes = np.bincount(part)[1:]
    return {"k": int(part.max()), "big": int((sizes > 2).sum()), "ari": ari,
            "seconds": chain.seconds}


def test_criterion_7_data1_sparse_recovery():
    results = [_desk_run("data1", "sparse", 700 + r, 750 + r) for r in range(5)]
    good = sum(1 for r in results if r["big"] == 5 and r["ari"] >= 0.95)
    detail = "; ".join(f"rep{r}: k={x['k']} big={x['big']} ari={x['ari']:.3f}"
                       for r, x in enumerate(results))
    _report(7, good >= 4, f"Data I + sparse: {good}/5 replicates recovered "
                          f"5 substantive clusters with ARI >= 0.95 ({detail})")


def test_criterion_8_data3_sparse_ari():
    results = [_desk_run("data3", "sparse", 800 + r, 850 + r) for r in range(3)]
    good = sum(1 for r in results if r["ari"] >= 0.98)
    detail = "; ".join(f"rep{r}: ari={x['ari']:.4f}" for r, x in enumerate(results))
    _report(8, good == 3, f"Data III + sparse: ARI >= 0.98 in {good}/3 ({detail})")


def test_criterion_9_data1_iw_merges():
    results = [_desk_run("data1", "iw", 900 + r, 950 + r) for r in range(5)]
    counts = sorted(r["k"] for r in results)
    median = counts[2]
    _report(9, median < 5, f"Data I + IW: cluster counts {counts}, median {median} < 5")


def test_criterion_10_data4_independent_splits():
    results = [_desk_run("data4", "independent", 1000 + r, 1050 + r) for r in range(3)]
    over = sum(1 for r in results if r["k"] > 5)
    detail = "; ".join(f"rep{r}: k={x['k']}" for r, x in enumerate(results))
    _report(10, over >= 2, f"Data IV + independent: more than 5 clusters in "
                           f"{over}/3 replicates ({detail})")


def test_criterion_11_runtime_ordering():
    # CPU time rather than wall time: the ordering is about algorithmic
    # cost and should not be at the mercy of scheduler noise
    data, _ = generate(PRESETS["data3"], np.random.default_rng(5))
    times = {}
    for name in sorted(FAMILIES):
        cfg = McmcConfig(burn_in=400, main=200, seed=11, prior=PriorSpec(name),
                         init=InitStrategy(k_init=30))
        start = time.process_time()
        run_chain(data, cfg)
        times[name] = time.process_time() - start
    order = sorted(times, key=times.get)
    ratio = times["sparse"] / times["hiw1"]
    iw_ok = times["iw"] <= 1.1 * min(times.values())
    ok = (order[-1] == "log" and order[-2] == "separation"
          and 2.0 <= ratio <= 6.0 and iw_ok)
    detail = (", ".join(f"{k}={times[k]:.1f}s" for k in order)
              + f"; sparse/hiw1 = {ratio:.2f}")
    _report(11, ok, detail)
