"""Dirichlet process mixture clustering with interchangeable covariance
priors, a conditional slice sampler, simulation generators, and partition
post-processing."""

from .data import FeatureMatrix, ingest_csv
from .priors import PriorSpec, FAMILIES
from .sampler import McmcConfig, InitStrategy, ChainOutput, init_state, slice_sweep, run_chain
from .postprocess import similarity, best_partition, adjusted_rand, pca_project, summarize
from .simulate import ScenarioSpec, PRESETS, equicorr_cov, blockcorr_cov, generate

__version__ = "0.1.0"

__all__ = [
    "FeatureMatrix", "ingest_csv",
    "PriorSpec", "FAMILIES",
    "McmcConfig", "InitStrategy", "ChainOutput", "init_state", "slice_sweep", "run_chain",
    "similarity", "best_partition", "adjusted_rand", "pca_project", "summarize",
    "ScenarioSpec", "PRESETS", "equicorr_cov", "blockcorr_cov", "generate",
    "__version__",
]
