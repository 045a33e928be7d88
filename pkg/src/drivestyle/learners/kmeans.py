from __future__ import annotations

import numpy as np

from ..errors import TooFewPoints


def _sqdist(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def kmeans(points, k: int, seed: int = 0, max_iters: int = 100) -> np.ndarray:
    """Lloyd's algorithm from ``k`` distinct random data points.

    Iterates until the assignment stops changing or ``max_iters`` passes.
    A cluster that loses all its points is re-seeded at the point farthest
    from its current center.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if k < 1 or n < k:
        raise TooFewPoints(f"need at least k={k} points, got {n}")
    rng = np.random.default_rng(seed)
    centers = x[np.sort(rng.choice(n, size=k, replace=False))].copy()
    assign = np.full(n, -1)
    for _ in range(max_iters):
        d2 = _sqdist(x, centers)
        new = np.argmin(d2, axis=1)
        spread = d2[np.arange(n), new]
        for c in range(k):
            if not np.any(new == c):
                far = int(np.argmax(spread))
                new[far] = c
                spread[far] = -np.inf
        if np.array_equal(new, assign):
            break
        assign = new
        for c in range(k):
            centers[c] = x[assign == c].mean(axis=0)
    return centers
