"""Exception types raised across the package."""


class ShapeError(ValueError):
    """Operands have incompatible shapes."""


class StateError(RuntimeError):
    """An operation was called out of order (e.g. backward before forward)."""


class IngestionError(OSError):
    """A required dataset file is missing or unreadable."""


class FormatError(ValueError):
    """Dataset contents are malformed."""


class TrainingDivergedError(FloatingPointError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch, graph_index, sigma, loss):
        self.epoch = epoch
        self.graph_index = graph_index
        self.sigma = sigma
        self.loss = loss
        super().__init__(
            f"non-finite loss {loss!r} at epoch {epoch}, graph {graph_index} (sigma={sigma!r})"
        )
