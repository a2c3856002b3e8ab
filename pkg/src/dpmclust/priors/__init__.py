"""Interchangeable covariance priors for the mixture components."""

from dataclasses import dataclass, field

from .base import CovariancePrior, CovDraw  # noqa: F401
from .wishart_based import IWPrior, HIW1Prior, HIW2Prior
from .separation import SeparationPrior
from .logcov import LogCovPrior
from .sparse import SparsePrior
from .independent import IndependentPrior

FAMILIES = {
    cls.name: cls
    for cls in (IWPrior, HIW1Prior, HIW2Prior, SeparationPrior,
                LogCovPrior, SparsePrior, IndependentPrior)
}


@dataclass
class PriorSpec:
    """Selected prior family plus hyperparameter overrides."""

    family: str = "sparse"
    hyper: dict = field(default_factory=dict)

    def build(self, j, col_ranges) -> CovariancePrior:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown prior family {self.family!r}; "
                             f"choose from {sorted(FAMILIES)}")
        return FAMILIES[self.family](j, col_ranges, self.hyper)
