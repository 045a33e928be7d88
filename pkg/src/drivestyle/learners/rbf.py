"""Radial-basis-function network: k-means centers (k/2 per class), Gaussian
hidden units, linear output layer fitted by ridge least squares."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateDataset
from ._base import Standardizer, check_training_set
from .kmeans import kmeans

RIDGE = 1e-8


@dataclass(frozen=True)
class RbfModel:
    centers: np.ndarray   # (k, d) in standardized coordinates
    widths: np.ndarray    # (k,)
    weights: np.ndarray   # (k + 1,), last entry is the bias
    scaler: Standardizer

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    def hidden(self, z: np.ndarray) -> np.ndarray:
        d2 = ((z[:, None, :] - self.centers[None, :, :]) ** 2).sum(axis=2)
        phi = np.exp(-d2 / (2.0 * self.widths ** 2))
        return np.hstack([phi, np.ones((z.shape[0], 1))])

    def score(self, x) -> np.ndarray:
        return self.hidden(self.scaler(x)) @ self.weights

    def to_dict(self) -> dict:
        return {"algorithm": "rbf", "centers": self.centers.tolist(), "widths": self.widths.tolist(),
                "weights": self.weights.tolist(), "scaler": self.scaler.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "RbfModel":
        return cls(centers=np.asarray(d["centers"], float), widths=np.asarray(d["widths"], float),
                   weights=np.asarray(d["weights"], float), scaler=Standardizer.from_dict(d["scaler"]))


def nearest_other_center_widths(centers: np.ndarray) -> np.ndarray:
    """Width of each unit = distance to the closest other center.

    Coincident centers fall back to the mean of the positive widths (or 1).
    """
    k = centers.shape[0]
    if k == 1:
        return np.ones(1)
    d = np.sqrt(((centers[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(d, np.inf)
    widths = d.min(axis=1)
    positive = widths[widths > 1e-12]
    fallback = positive.mean() if positive.size else 1.0
    return np.where(widths > 1e-12, widths, fallback)


def train_rbf(x, y, k: int = 6, seed: int = 0, max_iters: int = 100) -> RbfModel:
    x, y = check_training_set(x, y)
    if k < 2 or k % 2:
        raise ValueError(f"k must be a positive even number, got {k}")
    per_class = k // 2
    for cls in (0, 1):
        if np.sum(y == cls) < per_class:
            raise DegenerateDataset(f"class {cls} has fewer than k/2={per_class} points")
    scaler = Standardizer.fit(x)
    z = scaler(x)
    centers = np.vstack([kmeans(z[y == cls], per_class, seed=seed + cls, max_iters=max_iters)
                         for cls in (0, 1)])
    widths = nearest_other_center_widths(centers)
    model = RbfModel(centers=centers, widths=widths, weights=np.zeros(k + 1), scaler=scaler)
    phi = model.hidden(z)
    gram = phi.T @ phi + RIDGE * np.eye(k + 1)
    weights = np.linalg.solve(gram, phi.T @ y.astype(np.float64))
    return RbfModel(centers=centers, widths=widths, weights=weights, scaler=scaler)
