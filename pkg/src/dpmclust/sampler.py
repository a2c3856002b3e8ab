"""Conditional slice sampler: one-sweep kernel, initialization, full chains.

Sweep order: slice variables, stick instantiation down to the smallest
slice, allocations, conjugate stick update, per-component parameter
updates, shared hyperparameters, concentration, and an optional label-swap
move that helps the conditional sampler mix over component order. Slice
validity (psi_{Z_i} > u_i) is guaranteed at the allocation step; the later
stick update may shrink weights below stale slice variables, which is
irrelevant because u is redrawn before its next use.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .data import FeatureMatrix
from .errors import ChainError, NotPositiveDefinite
from .priors import PriorSpec
from .state import (MixtureState, Component, make_shared, stick_weights,
                    stick_remainder, update_sticks, update_alpha, update_mu_c,
                    update_mu0)
from scipy.linalg import solve_triangular

_STICK_EPS = 1e-12


@dataclass
class InitStrategy:
    """Random-allocation initialization over k_init labels."""

    k_init: int = 30


@dataclass
class McmcConfig:
    burn_in: int = 10000
    main: int = 6000
    seed: int = 0
    prior: PriorSpec = field(default_factory=PriorSpec)
    init: InitStrategy = field(default_factory=InitStrategy)
    thin: int = 1
    label_switch_moves: bool = True
    alpha_prior_shape: float = 2.0
    alpha_prior_rate: float = 1.0

    def validate(self):
        if self.burn_in < 0 or self.main < 1:
            raise ValueError("need burn_in >= 0 and main >= 1")
        if self.thin < 1:
            raise ValueError("thin must be a positive integer")
        if self.init.k_init < 1:
            raise ValueError("k_init must be at least 1")


@dataclass
class ChainOutput:
    """Post-burn-in draws of one chain."""

    z_samples: np.ndarray       # (S, n) int
    alpha_trace: np.ndarray     # (S,)
    n_instantiated: np.ndarray  # (S,)
    n_nonempty: np.ndarray      # (S,)
    seconds: float
    prior_family: str
    seed: int
    burn_in: int
    main: int
    thin: int


def _draw_fresh_components(family, shared, count, rng):
    """Prior draws of (mu, Sigma) for newly instantiated components."""
    cov_draws = family.g0_draw_batch(shared.extra, rng, count)
    out = []
    for draw in cov_draws:
        mu = shared.mu0 + shared.sigma0_chol @ rng.standard_normal(shared.mu0.shape[0])
        out.append(Component(mu=mu, cov=draw.cov, cov_chol=draw.cov_chol,
                             latents=draw.latents))
    return out


def init_state(data: FeatureMatrix, config: McmcConfig, family, rng) -> MixtureState:
    """Random allocations over k_init labels, prior sticks, one conditional
    parameter update per component."""
    config.validate()
    k_init = min(config.init.k_init, data.n)
    shared = make_shared(data.values, extra=family.init_shared(rng))
    alpha = float(rng.gamma(config.alpha_prior_shape, 1.0 / config.alpha_prior_rate))
    z = rng.integers(0, k_init, size=data.n)
    v = np.clip(rng.beta(1.0, alpha, size=k_init), _STICK_EPS, 1.0 - _STICK_EPS)

    cov_draws = family.g0_draw_batch(shared.extra, rng, k_init)
    components = []
    for c in range(k_init):
        rows = data.values[z == c]
        mu = update_mu_c(rows, cov_draws[c].cov_chol, shared, rng)
        if rows.shape[0]:
            dev = rows - mu
            scatter = dev.T @ dev
        else:
            scatter = np.zeros((data.J, data.J))
        draw = family.update_component(scatter, rows.shape[0], shared.extra,
                                       cov_draws[c], rng)
        components.append(Component(mu=mu, cov=draw.cov, cov_chol=draw.cov_chol,
                                    latents=draw.latents))

    psi = stick_weights(v)
    u = rng.random(data.n) * psi[z]
    return MixtureState(Z=z, u=u, V=v, psi=psi, components=components,
                        alpha=alpha, shared=shared)


def slice_sweep(state: MixtureState, data: FeatureMatrix, family, config: McmcConfig,
                rng, instrument=None) -> MixtureState:
    """One full conditional sweep, mutating and returning ``state``."""
    x = data.values
    n = data.n

    # (1) slice variables given current weights and allocations
    state.u = rng.random(n) * state.psi[state.Z]

    # (2) instantiate sticks until the leftover mass is below every slice
    u_min = float(state.u.min())
    remainder = stick_remainder(state.V)
    cap = 10 * config.init.k_init + 100
    new_v = []
    while remainder >= u_min:
        if len(state.V) + len(new_v) > cap:
            raise ChainError(
                f"instantiated components exceeded cap {cap}; alpha={state.alpha:.3g} "
                "is likely running away", prior=family.name)
        draw = float(np.clip(rng.beta(1.0, state.alpha), _STICK_EPS, 1.0 - _STICK_EPS))
        new_v.append(draw)
        remainder *= 1.0 - draw
    if new_v:
        state.V = np.concatenate((state.V, new_v))
        state.components.extend(_draw_fresh_components(family, state.shared, len(new_v), rng))
        state.psi = stick_weights(state.V)

    # (3) allocations among components whose weight clears each slice;
    # the quadratic form uses the precomputed inverse factor, which is
    # cheaper than a triangular solve for many rows
    c_count = len(state.components)
    logf = np.full((n, c_count), -np.inf)
    log_2pi = float(np.log(2.0 * np.pi))
    for c in range(c_count):
        idx = np.flatnonzero(state.u < state.psi[c])
        if not idx.size:
            continue
        comp = state.components[c]
        low = comp.cov_chol
        low_inv = solve_triangular(low, np.eye(data.J), lower=True, check_finite=False)
        dev = (x if idx.size == n else x[idx]) - comp.mu
        y = dev @ low_inv.T
        logdet = 2.0 * float(np.sum(np.log(np.diag(low))))
        logf[idx, c] = -0.5 * (data.J * log_2pi + logdet + np.einsum("ij,ij->i", y, y))
    top = logf.max(axis=1)
    probs = np.exp(logf - top[:, None])
    cum = np.cumsum(probs, axis=1)
    r = rng.random(n) * cum[:, -1]
    state.Z = np.minimum((cum < r[:, None]).sum(axis=1), c_count - 1)

    if instrument is not None:
        slice_ok = bool(np.all(state.psi[state.Z] > state.u))

    # drop sticks beyond the last occupied label
    c_used = int(state.Z.max()) + 1
    state.V = state.V[:c_used]
    state.components = state.components[:c_used]

    # (4) conjugate stick update
    counts = np.bincount(state.Z, minlength=c_used)
    state.V = update_sticks(counts, state.alpha, rng)
    state.psi = stick_weights(state.V)

    # (5) component parameters: conjugate/conditional updates for occupied
    # components, fresh prior draws for empty ones
    order = np.argsort(state.Z, kind="stable")
    bounds = np.searchsorted(state.Z[order], np.arange(c_used + 1))
    empty = []
    for c in range(c_used):
        n_c = counts[c]
        if n_c == 0:
            empty.append(c)
            continue
        rows = x[order[bounds[c]:bounds[c + 1]]]
        comp = state.components[c]
        try:
            comp.mu = update_mu_c(rows, comp.cov_chol, state.shared, rng)
            dev = rows - comp.mu
            scatter = dev.T @ dev
            draw = family.update_component(
                scatter, int(n_c), state.shared.extra,
                _as_cov_draw(comp), rng)
        except (NotPositiveDefinite, np.linalg.LinAlgError, FloatingPointError) as exc:
            raise ChainError(f"component update failed: {exc}",
                             component=c, prior=family.name) from exc
        comp.cov, comp.cov_chol, comp.latents = draw.cov, draw.cov_chol, draw.latents
    if empty:
        fresh = _draw_fresh_components(family, state.shared, len(empty), rng)
        for c, comp in zip(empty, fresh):
            state.components[c] = comp

    # (6) shared hyperparameters from the nonempty components
    nonempty = [c for c in range(c_used) if counts[c] > 0]
    try:
        draws = [_as_cov_draw(state.components[c]) for c in nonempty]
        state.shared.extra = family.update_shared(draws, state.shared.extra, rng)
        mus = np.array([state.components[c].mu for c in nonempty])
        state.shared.mu0 = update_mu0(mus, state.shared, rng)
    except (NotPositiveDefinite, np.linalg.LinAlgError, FloatingPointError) as exc:
        raise ChainError(f"shared update failed: {exc}", prior=family.name) from exc

    # (7) concentration
    state.alpha = update_alpha(state.V, config.alpha_prior_shape,
                               config.alpha_prior_rate, rng)

    # (8) label-swap moves over adjacent pairs (Metropolis on the
    # u-marginal target; the swapped sticks keep the prior invariant).
    # One pass of C-1 proposals lets occupied components bubble past
    # empty ones instead of lingering at high labels.
    if config.label_switch_moves and c_used >= 2:
        swapped = False
        for c in rng.integers(0, c_used - 1, size=c_used - 1):
            n_c, n_c1 = counts[c], counts[c + 1]
            log_ratio = n_c * np.log1p(-state.V[c + 1]) - n_c1 * np.log1p(-state.V[c])
            if np.log(rng.random()) < log_ratio:
                state.V[[c, c + 1]] = state.V[[c + 1, c]]
                state.components[c], state.components[c + 1] = (
                    state.components[c + 1], state.components[c])
                counts[[c, c + 1]] = counts[[c + 1, c]]
                at_c = state.Z == c
                state.Z[state.Z == c + 1] = c
                state.Z[at_c] = c + 1
                swapped = True
        if swapped:
            state.psi = stick_weights(state.V)

    if instrument is not None:
        instrument({
            "slice_ok": slice_ok,
            "psi_residual": abs(state.psi.sum() + stick_remainder(state.V) - 1.0),
            "n_instantiated": len(state.components),
            "n_nonempty": len(nonempty),
            "state": state,
        })
    return state


def _as_cov_draw(comp: Component):
    from .priors.base import CovDraw
    return CovDraw(cov=comp.cov, cov_chol=comp.cov_chol, latents=comp.latents)


def run_chain(data: FeatureMatrix, config: McmcConfig, instrument=None) -> ChainOutput:
    """Execute burn-in plus main sweeps and collect post-burn-in draws."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    family = config.prior.build(data.J, data.col_ranges)
    family.adapt = True
    state = init_state(data, config, family, rng)

    z_samples, alpha_trace, inst_counts, occ_counts = [], [], [], []
    start = time.perf_counter()
    total = config.burn_in + config.main
    for sweep in range(total):
        if sweep == config.burn_in:
            family.adapt = False  # freeze proposal scales after burn-in
        try:
            slice_sweep(state, data, family, config, rng, instrument=instrument)
        except ChainError as exc:
            raise ChainError(str(exc), sweep=sweep, prior=family.name) from exc
        if sweep >= config.burn_in and (sweep - config.burn_in) % config.thin == 0:
            z_samples.append(state.Z.astype(np.int32))
            alpha_trace.append(state.alpha)
            inst_counts.append(len(state.components))
            occ_counts.append(len(np.unique(state.Z)))
    seconds = time.perf_counter() - start

    return ChainOutput(
        z_samples=np.asarray(z_samples, dtype=np.int32),
        alpha_trace=np.asarray(alpha_trace),
        n_instantiated=np.asarray(inst_counts, dtype=np.int32),
        n_nonempty=np.asarray(occ_counts, dtype=np.int32),
        seconds=seconds,
        prior_family=family.name,
        seed=config.seed,
        burn_in=config.burn_in,
        main=config.main,
        thin=config.thin,
    )
