"""Exception types shared across the package."""


class NotPositiveDefinite(ValueError):
    """A matrix required to be positive definite failed its factorization."""


class NoConvergence(RuntimeError):
    """An iterative decomposition hit its iteration cap."""


class DegreesOfFreedomTooSmall(ValueError):
    """Wishart-family degrees of freedom below the validity bound."""


class LengthMismatch(ValueError):
    """Two partitions of unequal length were compared."""


class ParseError(ValueError):
    """A CSV cell failed to parse; carries 0-based row/column coordinates."""

    def __init__(self, row, col, message):
        super().__init__(f"row {row}, column {col}: {message}")
        self.row = row
        self.col = col


class ConstantColumn(ValueError):
    """A data column with zero range was rejected at ingest."""

    def __init__(self, col):
        super().__init__(f"column {col} is constant; range-based hyperparameters are undefined")
        self.col = col


class QComputationOverflow(RuntimeError):
    """Dimension exceeds the configured cap for the log-covariance proposal machinery."""


class IndivisibleBlocks(ValueError):
    """Requested block count does not divide the dimension."""


class ChainError(RuntimeError):
    """A sweep failed; carries sweep index and component/prior context."""

    def __init__(self, message, sweep=None, component=None, prior=None):
        parts = [message]
        if sweep is not None:
            parts.append(f"sweep={sweep}")
        if component is not None:
            parts.append(f"component={component}")
        if prior is not None:
            parts.append(f"prior={prior}")
        super().__init__("; ".join(parts))
        self.sweep = sweep
        self.component = component
        self.prior = prior
