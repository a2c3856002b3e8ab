"""Experiment configuration, execution, and CSV artifact handling."""

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import FeatureMatrix, ingest_csv
from .postprocess import (similarity, best_partition, adjusted_rand, pca_project,
                          canonicalize)
from .priors import PriorSpec, FAMILIES
from .sampler import McmcConfig, InitStrategy, run_chain
from .simulate import PRESETS, generate

FLOAT_FMT = "%.17g"


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    preset: str | None = None
    csv_path: str | None = None
    csv_header: bool = False
    data_seed: int = 1
    prior_family: str = "sparse"
    prior_hyper: dict = field(default_factory=dict)
    burn_in: int = 10000
    main: int = 6000
    thin: int = 1
    k_init: int = 30
    label_switch: bool = True
    alpha_shape: float = 2.0
    alpha_rate: float = 1.0
    replicates: int = 1
    seeds: list = field(default_factory=lambda: [1])
    k_max: int = 15
    output: str = ""
    workers: int = 0

    def validate(self):
        if (self.preset is None) == (self.csv_path is None):
            raise ConfigError("exactly one data source: data.preset or data.csv")
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {sorted(PRESETS)}")
        if self.prior_family not in FAMILIES:
            raise ConfigError(f"unknown prior family {self.prior_family!r}")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if len(self.seeds) != self.replicates:
            raise ConfigError("need exactly one seed per replicate")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if self.burn_in < 0 or self.main < 1 or self.thin < 1 or self.k_init < 1:
            raise ConfigError("invalid mcmc sizes")

    def mcmc_config(self, seed: int) -> McmcConfig:
        return McmcConfig(
            burn_in=self.burn_in, main=self.main, seed=seed,
            prior=PriorSpec(self.prior_family, dict(self.prior_hyper)),
            init=InitStrategy(k_init=self.k_init), thin=self.thin,
            label_switch_moves=self.label_switch,
            alpha_prior_shape=self.alpha_shape, alpha_prior_rate=self.alpha_rate,
        )


_BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def build_config(entries: dict) -> ExperimentConfig:
    """Typed ExperimentConfig from flat dotted keys."""
    cfg = ExperimentConfig()
    cfg.seeds = []
    handlers = {
        "data.preset": lambda v: setattr(cfg, "preset", v),
        "data.csv": lambda v: setattr(cfg, "csv_path", v),
        "data.header": lambda v: setattr(cfg, "csv_header", _parse_bool(v)),
        "data.seed": lambda v: setattr(cfg, "data_seed", int(v)),
        "prior.family": lambda v: setattr(cfg, "prior_family", v),
        "mcmc.burn_in": lambda v: setattr(cfg, "burn_in", int(v)),
        "mcmc.main": lambda v: setattr(cfg, "main", int(v)),
        "mcmc.thin": lambda v: setattr(cfg, "thin", int(v)),
        "mcmc.k_init": lambda v: setattr(cfg, "k_init", int(v)),
        "mcmc.label_switch": lambda v: setattr(cfg, "label_switch", _parse_bool(v)),
        "mcmc.alpha_shape": lambda v: setattr(cfg, "alpha_shape", float(v)),
        "mcmc.alpha_rate": lambda v: setattr(cfg, "alpha_rate", float(v)),
        "run.replicates": lambda v: setattr(cfg, "replicates", int(v)),
        "run.seeds": lambda v: setattr(cfg, "seeds", [int(s) for s in v.split(",") if s.strip()]),
        "run.seed_base": lambda v: setattr(cfg, "seeds", ["base", int(v)]),
        "post.k_max": lambda v: setattr(cfg, "k_max", int(v)),
        "output": lambda v: setattr(cfg, "output", v),
        "workers": lambda v: setattr(cfg, "workers", int(v)),
    }
    for key, value in entries.items():
        if key in handlers:
            try:
                handlers[key](value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{key}: {exc}") from None
        elif key.startswith("prior."):
            cfg.prior_hyper[key.split(".", 1)[1]] = _parse_number(value)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    if cfg.seeds and cfg.seeds[0] == "base":
        base = cfg.seeds[1]
        cfg.seeds = [base + i for i in range(cfg.replicates)]
    if not cfg.seeds:
        cfg.seeds = list(range(1, cfg.replicates + 1))
    cfg.validate()
    return cfg


def _parse_bool(v: str) -> bool:
    try:
        return _BOOL[v.lower()]
    except KeyError:
        raise ConfigError(f"expected a boolean, got {v!r}") from None


def _parse_number(v: str):
    try:
        f = float(v)
    except ValueError:
        raise ConfigError(f"expected a number, got {v!r}") from None
    return int(f) if f.is_integer() and "." not in v and "e" not in v.lower() else f


def default_output_root() -> str:
    return os.environ.get("DPMCLUST_OUT", "dpmclust_out")


# -- artifact IO ------------------------------------------------------------


def write_matrix(path, mat, fmt=FLOAT_FMT):
    np.savetxt(path, np.atleast_2d(mat), fmt=fmt, delimiter=",")


def write_labels(path, labels):
    np.savetxt(path, np.asarray(labels, dtype=np.int64)[:, None], fmt="%d", delimiter=",")


def read_labels(path):
    return np.loadtxt(path, dtype=np.int64, delimiter=",", ndmin=1)


def write_summary(path, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["chain", "prior", "n_clusters", "ari", "seconds"])
        for row in rows:
            writer.writerow([row["chain"], row["prior"], row["n_clusters"],
                             FLOAT_FMT % row["ari"], FLOAT_FMT % row["seconds"]])


def read_summary(path):
    rows = []
    with open(path, newline="") as handle:
        for rec in csv.DictReader(handle):
            rows.append({"chain": int(rec["chain"]), "prior": rec["prior"],
                         "n_clusters": int(rec["n_clusters"]),
                         "ari": float(rec["ari"]), "seconds": float(rec["seconds"])})
    return rows


def _load_data(cfg: ExperimentConfig, replicate: int, shared_data=None):
    """Dataset plus optional truth for one replicate.

    Presets generate a fresh dataset per replicate (seeded); a CSV source
    is parsed once up front and carries no reference partition.
    """
    if cfg.preset is not None:
        rng = np.random.default_rng(cfg.data_seed + replicate)
        data, truth = generate(PRESETS[cfg.preset], rng)
        return data, truth
    if shared_data is None:
        shared_data = ingest_csv(cfg.csv_path, header=cfg.csv_header)
    return shared_data, None


def run_one(cfg: ExperimentConfig, replicate: int, out_dir: str,
            shared_data=None) -> dict:
    """Run a single replicate end to end and write its artifact set."""
    data, truth = _load_data(cfg, replicate, shared_data)
    chain = run_chain(data, cfg.mcmc_config(cfg.seeds[replicate]))
    sim = similarity(chain.z_samples)
    part = best_partition(sim, k_max=cfg.k_max)
    ari = adjusted_rand(part, truth) if truth is not None else float("nan")
    coords, fractions = pca_project(data.values, min(3, data.J))

    run_dir = Path(out_dir) / f"run_{replicate:02d}"
    run_dir.mkdir(parents=True, exist_ok=True)
    write_matrix(run_dir / "allocations.csv", chain.z_samples, fmt="%d")
    write_matrix(run_dir / "alpha_trace.csv", chain.alpha_trace[:, None])
    write_matrix(run_dir / "similarity.csv", sim)
    write_labels(run_dir / "best_partition.csv", part)
    write_matrix(run_dir / "pca_coords.csv", coords)
    write_matrix(run_dir / "data.csv", data.values)
    if truth is not None:
        write_labels(run_dir / "truth.csv", truth)
    row = {"chain": replicate, "prior": cfg.prior_family,
           "n_clusters": int(part.max()), "ari": ari, "seconds": chain.seconds}
    write_summary(run_dir / "summary.csv", [row])
    return row


def _run_one_star(args):
    return run_one(*args)


def run_experiment(cfg: ExperimentConfig, out_dir: str | None = None) -> tuple[int, list]:
    """All replicates plus the aggregate summary table.

    Returns (exit_status, rows); failures are reported per replicate and
    partial results preserved.
    """
    cfg.validate()
    out_dir = out_dir or cfg.output or default_output_root()
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    # a CSV source is parsed once so malformed data fails fast, before any
    # chain starts
    shared_data = None
    if cfg.csv_path is not None:
        shared_data = ingest_csv(cfg.csv_path, header=cfg.csv_header)
    jobs = [(cfg, r, out_dir, shared_data) for r in range(cfg.replicates)]
    rows, failures = [], []
    workers = cfg.workers or (os.cpu_count() or 1)
    if workers > 1 and cfg.replicates > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_run_one_star, job): job[1] for job in jobs}
            for future, rep in futures.items():
                try:
                    rows.append(future.result())
                except Exception as exc:
                    failures.append((rep, str(exc)))
        rows.sort(key=lambda r: r["chain"])
    else:
        for job in jobs:
            try:
                rows.append(_run_one_star(job))
            except Exception as exc:  # keep earlier replicates' artifacts
                failures.append((job[1], str(exc)))
    write_summary(Path(out_dir) / "summary.csv", rows)
    if failures:
        with open(Path(out_dir) / "failures.txt", "w") as handle:
            for rep, msg in failures:
                handle.write(f"replicate {rep}: {msg}\n")
        return 4, rows
    return 0, rows


def reaggregate(out_dir: str) -> list:
    """Rebuild the aggregate summary from per-run artifacts."""
    root = Path(out_dir)
    rows = []
    for run_dir in sorted(root.glob("run_*")):
        per_run = read_summary(run_dir / "summary.csv")[0]
        part = read_labels(run_dir / "best_partition.csv")
        per_run["n_clusters"] = int(canonicalize(part).max())
        truth_path = run_dir / "truth.csv"
        if truth_path.exists():
            per_run["ari"] = adjusted_rand(part, read_labels(truth_path))
        rows.append(per_run)
    write_summary(root / "summary.csv", rows)
    return rows
