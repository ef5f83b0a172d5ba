"""Small container for sampled one-dimensional results."""
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ScanSeries:
    """Values sampled along a parameter (``x``), e.g. ratios over a grid."""

    x: np.ndarray
    values: np.ndarray
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.x) != len(self.values):
            raise ValueError("x and values must have equal length")

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def argsup(self):
        return self.x[int(np.argmax(np.abs(self.values)))]
