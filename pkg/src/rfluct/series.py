"""Uniform-grid series container shared by the simulators and estimators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class SpectrumSeries:
    """Real values on a uniform abscissa grid (energy or time).

    ``start`` is the abscissa of the first sample, ``step`` the grid
    spacing, and ``values`` a one-dimensional float array.
    """

    start: float
    step: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ParameterError("series values must be one-dimensional")
        if not np.isfinite(self.step) or self.step <= 0:
            raise ParameterError("series step must be positive")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "step", float(self.step))

    def __len__(self) -> int:
        return self.values.size

    @property
    def abscissa(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.values.size)

    @property
    def end(self) -> float:
        """Abscissa of the last sample."""
        return self.start + self.step * (self.values.size - 1)

    @property
    def span(self) -> float:
        """Total length covered, counting one step per sample."""
        return self.step * self.values.size

    def window(self, lo: float, hi: float) -> "SpectrumSeries":
        """Sub-series of samples with lo <= abscissa < hi."""
        x = self.abscissa
        idx = np.flatnonzero((x >= lo) & (x < hi))
        if idx.size == 0:
            raise ParameterError(f"window [{lo}, {hi}) contains no samples")
        return SpectrumSeries(float(x[idx[0]]), self.step, self.values[idx])
