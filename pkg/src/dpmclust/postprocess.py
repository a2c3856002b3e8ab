"""Partition extraction and scoring from stored allocation samples."""

import numpy as np
from numpy.typing import NDArray

from .errors import LengthMismatch


def canonicalize(labels: NDArray) -> NDArray:
    """Relabel a partition to 1, 2, ... in order of first occurrence."""
    labels = np.asarray(labels)
    mapping: dict = {}
    out = np.empty(labels.shape[0], dtype=np.int64)
    for i, lab in enumerate(labels):
        key = lab.item() if hasattr(lab, "item") else lab
        if key not in mapping:
            mapping[key] = len(mapping) + 1
        out[i] = mapping[key]
    return out


def similarity(samples: NDArray) -> NDArray:
    """Posterior similarity matrix: co-clustering fraction per pair.

    ``samples`` is (S, n); the result has unit diagonal and is exactly
    symmetric because each term is.
    """
    samples = np.atleast_2d(np.asarray(samples))
    s_count, n = samples.shape
    if s_count < 1:
        raise ValueError("need at least one sample")
    acc = np.zeros((n, n))
    for z in samples:
        acc += z[:, None] == z[None, :]
    acc /= s_count
    np.fill_diagonal(acc, 1.0)
    return acc


def adjusted_rand(a: NDArray, b: NDArray) -> float:
    """Chance-corrected partition agreement via the contingency table.

    The degenerate case (both partitions trivial, maximum equals expected)
    is defined as 1.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[0] != b.shape[0]:
        raise LengthMismatch(f"partition lengths differ: {a.shape[0]} vs {b.shape[0]}")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    ka, kb = ai.max() + 1, bi.max() + 1
    table = np.zeros((ka, kb))
    np.add.at(table, (ai, bi), 1.0)

    def comb2(x):
        return x * (x - 1.0) / 2.0

    index = comb2(table).sum()
    sum_a = comb2(table.sum(axis=1)).sum()
    sum_b = comb2(table.sum(axis=0)).sum()
    total = comb2(float(a.shape[0]))
    expected = sum_a * sum_b / total
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))


def partition_loss(sim: NDArray, labels: NDArray) -> float:
    """Least-squares distance between a partition and a similarity matrix,
    summed over unordered pairs."""
    labels = np.asarray(labels)
    same = labels[:, None] == labels[None, :]
    iu = np.triu_indices(labels.shape[0], k=1)
    return float(((sim[iu] - same[iu]) ** 2).sum())


def _kmedoids(diss: NDArray, k: int, max_iter: int = 50) -> NDArray:
    """Deterministic alternate k-medoids on a precomputed dissimilarity.

    Initialization is greedy: the most central point first, then repeated
    farthest-point selection; afterwards assignment and medoid refresh
    alternate to a fixed point.
    """
    n = diss.shape[0]
    medoids = [int(np.argmin(diss.sum(axis=0)))]
    while len(medoids) < k:
        dmin = diss[:, medoids].min(axis=1)
        dmin[medoids] = -np.inf
        medoids.append(int(np.argmax(dmin)))
    medoids = np.asarray(medoids)
    for _ in range(max_iter):
        labels = np.argmin(diss[:, medoids], axis=1)
        updated = medoids.copy()
        for c in range(k):
            members = np.flatnonzero(labels == c)
            if members.size:
                within = diss[np.ix_(members, members)].sum(axis=1)
                updated[c] = members[np.argmin(within)]
        if np.array_equal(np.sort(updated), np.sort(medoids)):
            break
        medoids = updated
    return np.argmin(diss[:, medoids], axis=1)


def best_partition(sim: NDArray, k_max: int = 15) -> NDArray:
    """Representative partition: medoid candidates for k = 1..k_max scored
    by least-squares distance to the similarity matrix."""
    n = sim.shape[0]
    k_max = min(k_max, n)
    diss = 1.0 - sim
    best_labels = np.zeros(n, dtype=np.int64)
    best_loss = partition_loss(sim, best_labels)
    for k in range(2, k_max + 1):
        labels = _kmedoids(diss, k)
        loss = partition_loss(sim, labels)
        if loss < best_loss:
            best_loss = loss
            best_labels = labels
    return canonicalize(best_labels)


def pca_project(values: NDArray, k: int) -> tuple[NDArray, NDArray]:
    """Top-k principal component coordinates and explained-variance
    fractions of the sample covariance."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n, j = values.shape
    if k > j:
        raise ValueError("k exceeds the number of variables")
    centered = values - values.mean(axis=0)
    cov = centered.T @ centered / max(n - 1, 1)
    w, vec = np.linalg.eigh(cov)
    order = np.argsort(w)[::-1]
    w = np.maximum(w[order], 0.0)
    vec = vec[:, order]
    coords = centered @ vec[:, :k]
    total = w.sum()
    fractions = w[:k] / total if total > 0 else np.zeros(k)
    return coords, fractions


def alpha_density(trace: NDArray, grid_size: int = 256) -> tuple[NDArray, NDArray]:
    """Gaussian-kernel density of the concentration trace on a fixed grid,
    Silverman bandwidth."""
    trace = np.asarray(trace, dtype=float)
    sd = trace.std()
    if trace.shape[0] > 1 and sd > 0:
        iqr = np.subtract(*np.percentile(trace, [75, 25]))
        width = min(sd, iqr / 1.34) if iqr > 0 else sd
        bw = 0.9 * width * trace.shape[0] ** (-0.2)
    else:
        bw = max(abs(trace.mean()), 1.0) * 0.1
    lo, hi = trace.min() - 3 * bw, trace.max() + 3 * bw
    grid = np.linspace(lo, hi, grid_size)
    dev = (grid[:, None] - trace[None, :]) / bw
    dens = np.exp(-0.5 * dev ** 2).sum(axis=1) / (trace.shape[0] * bw * np.sqrt(2 * np.pi))
    return grid, dens


def summarize(chains: list, reference: NDArray | None = None, k_max: int = 15) -> dict:
    """Per-chain best partitions, cluster counts, ARI, and alpha densities."""
    if not chains:
        raise ValueError("need at least one chain")
    rows = []
    partitions = []
    densities = []
    sims = []
    for i, chain in enumerate(chains):
        sim = similarity(chain.z_samples)
        part = best_partition(sim, k_max=k_max)
        n_clusters = int(part.max())
        ari = adjusted_rand(part, reference) if reference is not None else float("nan")
        rows.append({
            "chain": i,
            "prior": chain.prior_family,
            "n_clusters": n_clusters,
            "ari": ari,
            "seconds": chain.seconds,
        })
        partitions.append(part)
        densities.append(alpha_density(chain.alpha_trace))
        sims.append(sim)
    return {"rows": rows, "partitions": partitions,
            "alpha_density": densities, "similarity": sims}
