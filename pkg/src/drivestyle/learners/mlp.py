"""One-hidden-layer perceptron with logistic units, trained by full-batch
gradient descent on the mean binary cross-entropy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._accel import USE_NUMBA, njit
from ._base import Standardizer, check_training_set, sigmoid

HIDDEN_RANGE = range(2, 7)


@dataclass(frozen=True)
class MlpModel:
    w1: np.ndarray  # (input_dim, hidden)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden,)
    b2: float
    scaler: Standardizer
    final_loss: float = float("nan")

    @property
    def hidden_count(self) -> int:
        return self.w1.shape[1]

    @property
    def input_dim(self) -> int:
        return self.w1.shape[0]

    def score(self, x) -> np.ndarray:
        """Probability of the dangerous class."""
        z = self.scaler(x)
        h = sigmoid(z @ self.w1 + self.b1)
        return sigmoid(h @ self.w2 + self.b2)

    def to_dict(self) -> dict:
        return {"algorithm": "mlp", "w1": self.w1.tolist(), "b1": self.b1.tolist(),
                "w2": self.w2.tolist(), "b2": float(self.b2), "scaler": self.scaler.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "MlpModel":
        return cls(w1=np.asarray(d["w1"], float), b1=np.asarray(d["b1"], float),
                   w2=np.asarray(d["w2"], float), b2=float(d["b2"]),
                   scaler=Standardizer.from_dict(d["scaler"]))


def loss_and_grad(w1, b1, w2, b2, x, y):
    """Mean cross-entropy and its gradient with respect to every parameter."""
    n = x.shape[0]
    h = sigmoid(x @ w1 + b1)
    p = sigmoid(h @ w2 + b2)
    eps = 1e-300
    loss = -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
    dz2 = (p - y) / n
    gw2 = h.T @ dz2
    gb2 = dz2.sum()
    dz1 = np.outer(dz2, w2) * h * (1.0 - h)
    gw1 = x.T @ dz1
    gb1 = dz1.sum(axis=0)
    return float(loss), (gw1, gb1, gw2, float(gb2))


def _train_numpy(x, y, w1, b1, w2, b2, lr, epochs):
    for _ in range(epochs):
        _, (gw1, gb1, gw2, gb2) = loss_and_grad(w1, b1, w2, b2, x, y)
        w1 = w1 - lr * gw1
        b1 = b1 - lr * gb1
        w2 = w2 - lr * gw2
        b2 = b2 - lr * gb2
    loss, _ = loss_and_grad(w1, b1, w2, b2, x, y)
    return w1, b1, w2, b2, loss


@njit
def _train_loops(x, y, w1, b1, w2, b2, lr, epochs):
    n, d = x.shape
    m = w1.shape[1]
    w1 = w1.copy()
    b1 = b1.copy()
    w2 = w2.copy()
    h = np.empty((n, m))
    dz1 = np.empty(m)
    gw1 = np.empty((d, m))
    gb1 = np.empty(m)
    gw2 = np.empty(m)
    loss = 0.0
    for epoch in range(epochs + 1):
        loss = 0.0
        gb2 = 0.0
        gw1[:, :] = 0.0
        gb1[:] = 0.0
        gw2[:] = 0.0
        for i in range(n):
            hi = h[i]
            for j in range(m):
                hi[j] = b1[j]
            for r in range(d):
                xir = x[i, r]
                for j in range(m):
                    hi[j] += xir * w1[r, j]
            z2 = b2
            for j in range(m):
                z = min(max(hi[j], -500.0), 500.0)
                hi[j] = 1.0 / (1.0 + math.exp(-z))
                z2 += hi[j] * w2[j]
            z2 = min(max(z2, -500.0), 500.0)
            p = 1.0 / (1.0 + math.exp(-z2))
            if epoch == epochs:
                loss -= y[i] * math.log(p + 1e-300) + (1.0 - y[i]) * math.log(1.0 - p + 1e-300)
                continue
            dz2 = (p - y[i]) / n
            gb2 += dz2
            for j in range(m):
                gw2[j] += hi[j] * dz2
                dz1[j] = dz2 * w2[j] * hi[j] * (1.0 - hi[j])
                gb1[j] += dz1[j]
            for r in range(d):
                xir = x[i, r]
                for j in range(m):
                    gw1[r, j] += xir * dz1[j]
        loss /= n
        if epoch == epochs:
            break
        for j in range(m):
            b1[j] -= lr * gb1[j]
            w2[j] -= lr * gw2[j]
        for r in range(d):
            for j in range(m):
                w1[r, j] -= lr * gw1[r, j]
        b2 -= lr * gb2
    return w1, b1, w2, b2, loss


def init_params(input_dim: int, hidden: int, seed: int):
    rng = np.random.default_rng(seed)
    w1 = rng.normal(0.0, 1.0 / math.sqrt(input_dim), size=(input_dim, hidden))
    w2 = rng.normal(0.0, 1.0 / math.sqrt(hidden), size=hidden)
    return w1, np.zeros(hidden), w2, 0.0


def train_mlp(x, y, hidden: int = 6, epochs: int = 2000, lr: float = 0.5, seed: int = 0,
              use_numba: bool = USE_NUMBA) -> MlpModel:
    x, y = check_training_set(x, y)
    if hidden not in HIDDEN_RANGE:
        raise ValueError(f"hidden must be in 2..6, got {hidden}")
    scaler = Standardizer.fit(x)
    z = np.ascontiguousarray(scaler(x))
    yf = y.astype(np.float64)
    w1, b1, w2, b2 = init_params(x.shape[1], hidden, seed)
    train = _train_loops if use_numba else _train_numpy
    w1, b1, w2, b2, loss = train(z, yf, w1, b1, w2, float(b2), float(lr), int(epochs))
    return MlpModel(w1=w1, b1=b1, w2=w2, b2=float(b2), scaler=scaler, final_loss=float(loss))
