"""Neighbourhood-component feature selection.

Learns a nonnegative weight per feature by gradient ascent on a
leave-one-out stochastic nearest-neighbour objective::

    xi(w) = (1/n) sum_i p_i - lam * sum_r w_r^2
    p_i   = sum_{j != i, y_j = y_i} p_ij
    p_ij  = exp(-D_ij / sigma) / sum_{k != i} exp(-D_ik / sigma)
    D_ij  = sum_r w_r^2 |x_ir - x_jr|

with gradient::

    dxi/dw_r = 2 w_r [ (1/(sigma n)) sum_i ( p_i sum_j p_ij |x_ir - x_jr|
                                            - sum_{j: y_j = y_i} p_ij |x_ir - x_jr| ) - lam ]

Features whose final weight exceeds 0.1 are selected.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from ._accel import USE_NUMBA, njit
from .errors import DegenerateDataset

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.1
STD_FLOOR = 1e-12


@dataclass(frozen=True)
class LabeledDataset:
    """Standardised feature matrix with binary labels (1 = dangerous)."""

    x: np.ndarray
    y: np.ndarray
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        if self.x.ndim != 2 or self.x.shape[0] != self.y.shape[0]:
            raise ValueError("x must be (n, d) and y of length n")
        if self.x.shape[0] < 2:
            raise DegenerateDataset("need at least two points")
        if np.unique(self.y).size < 2:
            raise DegenerateDataset("both classes must be present")

    @classmethod
    def from_raw(cls, x, y) -> "LabeledDataset":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y).astype(np.int64)
        if x.ndim != 2 or x.shape[0] < 2:
            raise DegenerateDataset("need a 2-D matrix with at least two rows")
        if np.unique(y).size < 2:
            raise DegenerateDataset("both classes must be present")
        mean = x.mean(axis=0)
        std = np.maximum(x.std(axis=0, ddof=1), STD_FLOOR)
        return cls(x=(x - mean) / std, y=y, mean=mean, std=std)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def raw(self) -> np.ndarray:
        return self.x * self.std + self.mean

    def subset(self, columns) -> "LabeledDataset":
        cols = np.asarray(columns, dtype=np.int64)
        return LabeledDataset(x=self.x[:, cols], y=self.y, mean=self.mean[cols], std=self.std[cols])


@dataclass(frozen=True)
class FeatureWeights:
    w: np.ndarray
    objective_trace: tuple[float, ...]
    converged: bool = True
    iterations: int = 0
    params: dict = field(default_factory=dict)

    def to_json(self, threshold: float = DEFAULT_THRESHOLD) -> dict:
        return {
            "weights": [float(v) for v in self.w],
            "selected": [int(i) + 1 for i in select(self, threshold)],
            "objective_trace": [float(v) for v in self.objective_trace],
            "converged": bool(self.converged),
            "params": dict(self.params),
        }


# kernels ----------------------------------------------------------------

@njit
def _objective_grad_loops(x, y, w, sigma, lam):
    n, d = x.shape
    w2 = w * w
    acc = np.zeros(d)
    dist = np.empty(n)
    p = np.empty(n)
    total = 0.0
    for i in range(n):
        dmin = np.inf
        for j in range(n):
            if j == i:
                continue
            s = 0.0
            for r in range(d):
                s += w2[r] * abs(x[i, r] - x[j, r])
            dist[j] = s
            if s < dmin:
                dmin = s
        z = 0.0
        for j in range(n):
            if j == i:
                p[j] = 0.0
            else:
                p[j] = math.exp(-(dist[j] - dmin) / sigma)
                z += p[j]
        pi = 0.0
        for j in range(n):
            p[j] /= z
            if y[j] == y[i]:
                pi += p[j]
        total += pi
        for j in range(n):
            if j == i:
                continue
            coef = pi * p[j]
            if y[j] == y[i]:
                coef -= p[j]
            for r in range(d):
                acc[r] += coef * abs(x[i, r] - x[j, r])
    obj = total / n - lam * np.sum(w2)
    grad = 2.0 * w * (acc / (sigma * n) - lam)
    return obj, grad


def _objective_grad_numpy(x, y, w, sigma, lam, absdiff=None):
    n = x.shape[0]
    if absdiff is None:
        absdiff = np.abs(x[:, None, :] - x[None, :, :])
    w2 = w * w
    dist = absdiff @ w2
    np.fill_diagonal(dist, np.inf)
    dist -= dist.min(axis=1, keepdims=True)
    p = np.exp(-dist / sigma)
    p /= p.sum(axis=1, keepdims=True)
    same = y[:, None] == y[None, :]
    pi = np.where(same, p, 0.0).sum(axis=1)
    coef = p * pi[:, None] - np.where(same, p, 0.0)
    acc = np.einsum("ij,ijr->r", coef, absdiff)
    obj = pi.sum() / n - lam * w2.sum()
    grad = 2.0 * w * (acc / (sigma * n) - lam)
    return float(obj), grad


class _Objective:
    """Caches the pairwise |x_i - x_j| tensor for the numpy path."""

    def __init__(self, x, y, sigma, lam, use_numba=USE_NUMBA):
        self.x = np.ascontiguousarray(x, dtype=np.float64)
        self.y = np.ascontiguousarray(y, dtype=np.int64)
        self.sigma = float(sigma)
        self.lam = float(lam)
        self.use_numba = use_numba
        self._absdiff = None if use_numba else np.abs(self.x[:, None, :] - self.x[None, :, :])

    def __call__(self, w):
        w = np.ascontiguousarray(w, dtype=np.float64)
        if self.use_numba:
            obj, grad = _objective_grad_loops(self.x, self.y, w, self.sigma, self.lam)
            return float(obj), grad
        return _objective_grad_numpy(self.x, self.y, w, self.sigma, self.lam, self._absdiff)


def objective_and_gradient(ds: LabeledDataset, w, sigma: float = 1.0, lam: float | None = None):
    lam = 1.0 / ds.n if lam is None else lam
    return _Objective(ds.x, ds.y, sigma, lam)(w)


# fitting ----------------------------------------------------------------

def nca_fit(ds: LabeledDataset, lam: float | None = None, sigma: float = 1.0, lr: float = 1.0,
            max_iters: int = 100, seed: int = 0, tol: float = 1e-6,
            w0=None, growth: float = 1.25) -> FeatureWeights:
    """Fit feature weights by projected gradient ascent with step halving.

    A trial step that lowers the objective is halved until it does not; an
    accepted step is followed by a ``growth``-times larger trial step.
    Negative weights are clipped to zero after every step. ``lam`` defaults
    to ``1/n``. The ascent is deterministic; ``seed`` is
    recorded in ``params`` only. A run that hits ``max_iters`` returns the last
    accepted weights with ``converged=False``.
    """
    if np.unique(ds.y).size < 2:
        raise DegenerateDataset("both classes must be present")
    if sigma <= 0 or lr <= 0:
        raise ValueError("sigma and lr must be positive")
    lam = 1.0 / ds.n if lam is None else float(lam)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    f = _Objective(ds.x, ds.y, sigma, lam)
    w = np.full(ds.d, 1.0 / math.sqrt(ds.d)) if w0 is None else np.maximum(np.asarray(w0, float), 0.0)
    obj, grad = f(w)
    trace = [obj]
    step = float(lr)
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        while True:
            cand = np.maximum(w + step * grad, 0.0)
            cand_obj, cand_grad = f(cand)
            if cand_obj >= obj:
                break
            step *= 0.5
            if step < 1e-12:
                break
        if step < 1e-12:
            # no ascent direction left at any usable step size
            converged = True
            break
        gain = cand_obj - obj
        w, obj, grad = cand, cand_obj, cand_grad
        step *= growth
        trace.append(obj)
        if gain <= tol * max(1.0, abs(obj)):
            converged = True
            break
    if not converged:
        log.warning("nca_fit stopped after %d iterations without converging", max_iters)
    return FeatureWeights(w=w, objective_trace=tuple(trace), converged=converged, iterations=it,
                          params={"lambda": lam, "sigma": sigma, "lr": lr, "max_iters": max_iters,
                                  "seed": seed, "tol": tol, "growth": growth})


def gradient_check(ds: LabeledDataset, w, h: float = 1e-5, sigma: float = 1.0,
                   lam: float | None = None) -> float:
    """Largest ``|analytic - central difference| / max(1, |analytic|)`` over components."""
    if not 1e-7 <= h <= 1e-4:
        raise ValueError("h must lie in [1e-7, 1e-4]")
    lam = 1.0 / ds.n if lam is None else lam
    f = _Objective(ds.x, ds.y, sigma, lam)
    w = np.asarray(w, dtype=np.float64)
    _, grad = f(w)
    err = 0.0
    for r in range(w.size):
        e = np.zeros_like(w)
        e[r] = h
        fd = (f(w + e)[0] - f(w - e)[0]) / (2 * h)
        err = max(err, abs(grad[r] - fd) / max(1.0, abs(grad[r])))
    return err


def select(fw: FeatureWeights | np.ndarray, threshold: float = DEFAULT_THRESHOLD) -> list[int]:
    """0-based indices of features with weight strictly above ``threshold``."""
    w = fw.w if isinstance(fw, FeatureWeights) else np.asarray(fw)
    return [int(i) for i in np.flatnonzero(w > threshold)]


def select_or_all(fw: FeatureWeights, threshold: float = DEFAULT_THRESHOLD) -> list[int]:
    """Like :func:`select` but falls back to every feature when nothing passes."""
    idx = select(fw, threshold)
    if not idx:
        log.warning("no feature weight exceeds %g; keeping all %d features", threshold, fw.w.size)
        idx = list(range(fw.w.size))
    return idx


def save_weights(path: str | os.PathLike, fw: FeatureWeights, threshold: float = DEFAULT_THRESHOLD) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(fw.to_json(threshold), fh, indent=2)
        fh.write("\n")


def load_weights(path: str | os.PathLike) -> FeatureWeights:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return FeatureWeights(w=np.asarray(doc["weights"], dtype=float),
                          objective_trace=tuple(doc.get("objective_trace", ())),
                          converged=doc.get("converged", True), params=doc.get("params", {}))
