"""Per-feature z-score standardization fitted on training data only."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError


@dataclass(frozen=True)
class ScalingStats:
    mean: np.ndarray
    std: np.ndarray
    # constant features pass through unscaled
    constant: np.ndarray

    @classmethod
    def fit(cls, X) -> ScalingStats:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ShapeError(f"cannot fit scaling on shape {X.shape}")
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        constant = ~(std > 0)
        return cls(mean=mean, std=std, constant=constant)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.dim:
            raise ShapeError(f"expected {self.dim} features, got {X.shape[-1]}")
        mean = np.where(self.constant, 0.0, self.mean)
        std = np.where(self.constant, 1.0, self.std)
        return (X - mean) / std

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "constant": self.constant.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> ScalingStats:
        return cls(
            mean=np.asarray(data["mean"], dtype=np.float64),
            std=np.asarray(data["std"], dtype=np.float64),
            constant=np.asarray(data["constant"], dtype=bool),
        )
