"""Soft-margin SVM trained by sequential minimal optimization.

Solves the dual::

    min_a  1/2 a^T Q a - sum(a),   Q_ij = y_i y_j K(x_i, x_j)
    s.t.   0 <= a_i <= C,  sum_i y_i a_i = 0

choosing each working pair by the maximal-violating-pair rule for ``i`` and
the second-order gain for ``j``. Labels are +1 (dangerous) / -1 (safe)
internally.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .._accel import USE_NUMBA, njit
from ._base import Standardizer, check_training_set, sigmoid

log = logging.getLogger(__name__)

TAU = 1e-12


def kernel_matrix(a: np.ndarray, b: np.ndarray, kernel: str, gamma: float) -> np.ndarray:
    if kernel == "linear":
        return a @ b.T
    if kernel == "gaussian":
        d2 = (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * a @ b.T
        return np.exp(-gamma * np.maximum(d2, 0.0))
    raise ValueError(f"unknown kernel {kernel!r}")


@njit
def _smo_loops(K, y, C, tol, max_iter):
    n = y.shape[0]
    alpha = np.zeros(n)
    G = -np.ones(n)
    it = 0
    converged = False
    while it < max_iter:
        # i: maximal violator in the "up" set
        gmax = -np.inf
        i = -1
        for t in range(n):
            if y[t] > 0:
                if alpha[t] < C and -G[t] >= gmax:
                    gmax = -G[t]
                    i = t
            else:
                if alpha[t] > 0 and G[t] >= gmax:
                    gmax = G[t]
                    i = t
        gmax2 = -np.inf
        j = -1
        best = np.inf
        for t in range(n):
            if y[t] > 0:
                if alpha[t] > 0:
                    if G[t] >= gmax2:
                        gmax2 = G[t]
                    diff = gmax + G[t]
                    if diff > 0 and i >= 0:
                        a = K[i, i] + K[t, t] - 2.0 * K[i, t]
                        if a <= 0:
                            a = TAU
                        gain = -(diff * diff) / a
                        if gain <= best:
                            best = gain
                            j = t
            else:
                if alpha[t] < C:
                    if -G[t] >= gmax2:
                        gmax2 = -G[t]
                    diff = gmax - G[t]
                    if diff > 0 and i >= 0:
                        a = K[i, i] + K[t, t] - 2.0 * K[i, t]
                        if a <= 0:
                            a = TAU
                        gain = -(diff * diff) / a
                        if gain <= best:
                            best = gain
                            j = t
        if gmax + gmax2 < tol or j < 0:
            converged = True
            break
        it += 1
        ai_old = alpha[i]
        aj_old = alpha[j]
        qij = y[i] * y[j] * K[i, j]
        if y[i] != y[j]:
            quad = K[i, i] + K[j, j] + 2.0 * qij
            if quad <= 0:
                quad = TAU
            delta = (-G[i] - G[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            quad = K[i, i] + K[j, j] - 2.0 * qij
            if quad <= 0:
                quad = TAU
            delta = (G[i] - G[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total
        dai = alpha[i] - ai_old
        daj = alpha[j] - aj_old
        for t in range(n):
            G[t] += y[t] * (y[i] * K[t, i] * dai + y[j] * K[t, j] * daj)
    return alpha, G, it, converged


def _smo_numpy(K, y, C, tol, max_iter):
    n = y.shape[0]
    alpha = np.zeros(n)
    G = -np.ones(n)
    diagK = np.diag(K).copy()
    pos = y > 0
    it = 0
    converged = False
    while it < max_iter:
        up = np.where(pos, alpha < C, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < C)
        minus_yg = -y * G
        if not up.any() or not low.any():
            converged = True
            break
        # ties resolve to the last index, as in the loop kernel
        cand_up = np.where(up, minus_yg, -np.inf)
        i = n - 1 - int(np.argmax(cand_up[::-1]))
        gmax = cand_up[i]
        gmax2 = np.max(np.where(low, -minus_yg, -np.inf))
        diff = gmax - minus_yg
        ok = low & (diff > 0)
        if gmax + gmax2 < tol or not ok.any():
            converged = True
            break
        a = diagK[i] + diagK - 2.0 * K[i]
        a = np.where(a <= 0, TAU, a)
        gain = np.where(ok, -(diff * diff) / a, np.inf)
        j = n - 1 - int(np.argmin(gain[::-1]))
        it += 1
        ai_old, aj_old = alpha[i], alpha[j]
        qij = y[i] * y[j] * K[i, j]
        if y[i] != y[j]:
            quad = max(K[i, i] + K[j, j] + 2.0 * qij, TAU)
            delta = (-G[i] - G[j]) / quad
            d = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if d > 0:
                if alpha[j] < 0:
                    alpha[j], alpha[i] = 0.0, d
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, -d
            if d > 0:
                if alpha[i] > C:
                    alpha[i], alpha[j] = C, C - d
            elif alpha[j] > C:
                alpha[j], alpha[i] = C, C + d
        else:
            quad = max(K[i, i] + K[j, j] - 2.0 * qij, TAU)
            delta = (G[i] - G[j]) / quad
            s = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if s > C:
                if alpha[i] > C:
                    alpha[i], alpha[j] = C, s - C
            elif alpha[j] < 0:
                alpha[j], alpha[i] = 0.0, s
            if s > C:
                if alpha[j] > C:
                    alpha[j], alpha[i] = C, s - C
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, s
        dai = alpha[i] - ai_old
        daj = alpha[j] - aj_old
        G += y * (y[i] * K[:, i] * dai + y[j] * K[:, j] * daj)
    return alpha, G, it, converged


def solve_dual(K, y, C: float = 1.0, tol: float = 1e-3, max_iter: int = 100_000,
               use_numba: bool = USE_NUMBA):
    """Run SMO on a precomputed kernel matrix; ``y`` in {-1, +1}.

    Returns ``(alpha, gradient, iterations, converged)``.
    """
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    solver = _smo_loops if use_numba else _smo_numpy
    alpha, G, it, converged = solver(K, y, float(C), float(tol), int(max_iter))
    return alpha, G, int(it), bool(converged)


def compute_rho(alpha, G, y, C) -> float:
    """Offset such that the decision value is ``sum a_i y_i K(x_i, x) - rho``."""
    yg = y * G
    at_upper = alpha >= C
    at_lower = alpha <= 0
    free = ~at_upper & ~at_lower
    if free.any():
        return float(yg[free].mean())
    ub = np.min(yg[(at_upper & (y < 0)) | (at_lower & (y > 0))], initial=np.inf)
    lb = np.max(yg[(at_upper & (y > 0)) | (at_lower & (y < 0))], initial=-np.inf)
    return float((ub + lb) / 2.0)


def dual_objective(alpha, K, y) -> float:
    """Dual value in maximisation form, ``sum(a) - 1/2 a^T Q a``."""
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


@dataclass(frozen=True)
class SvmModel:
    kernel: str
    gamma: float
    C: float
    support_vectors: np.ndarray   # standardized coordinates
    dual_coef: np.ndarray         # alpha_i * y_i of the support vectors
    rho: float
    scaler: Standardizer
    alpha: np.ndarray             # full alpha vector of the training set
    converged: bool = True
    iterations: int = 0
    objective: float = float("nan")

    @property
    def bias(self) -> float:
        return -self.rho

    def decision(self, x) -> np.ndarray:
        z = self.scaler(x)
        if self.support_vectors.shape[0] == 0:
            return np.full(z.shape[0], -self.rho)
        return kernel_matrix(z, self.support_vectors, self.kernel, self.gamma) @ self.dual_coef - self.rho

    def predict(self, x) -> np.ndarray:
        return (self.decision(x) > 0).astype(np.int64)

    def score(self, x) -> np.ndarray:
        """Logistic squash of the decision value; 0.5 sits on the margin centre."""
        return sigmoid(self.decision(x))

    def to_dict(self) -> dict:
        return {"algorithm": "svm", "kernel": self.kernel, "gamma": self.gamma, "C": self.C,
                "support_vectors": self.support_vectors.tolist(), "dual_coef": self.dual_coef.tolist(),
                "rho": self.rho, "converged": self.converged, "scaler": self.scaler.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "SvmModel":
        return cls(kernel=d["kernel"], gamma=float(d["gamma"]), C=float(d["C"]),
                   support_vectors=np.asarray(d["support_vectors"], float).reshape(len(d["dual_coef"]), -1),
                   dual_coef=np.asarray(d["dual_coef"], float), rho=float(d["rho"]),
                   scaler=Standardizer.from_dict(d["scaler"]), alpha=np.asarray(d["dual_coef"], float),
                   converged=bool(d.get("converged", True)))


def train_svm(x, y, kernel: str = "gaussian", C: float = 1.0, tol: float = 1e-3,
              seed: int = 0, gamma: float | None = None, max_iter: int = 100_000,
              use_numba: bool = USE_NUMBA) -> SvmModel:
    """Fit on labels 0/1 (1 = dangerous).

    ``gamma`` defaults to ``1 / n_features``. SMO with deterministic pair
    selection does not consume randomness; ``seed`` is kept for a uniform
    trainer signature.
    """
    x, y01 = check_training_set(x, y)
    if C <= 0:
        raise ValueError("C must be positive")
    gamma = 1.0 / x.shape[1] if gamma is None else float(gamma)
    scaler = Standardizer.fit(x)
    z = scaler(x)
    ys = np.where(y01 == 1, 1.0, -1.0)
    K = kernel_matrix(z, z, kernel, gamma)
    alpha, G, it, converged = solve_dual(K, ys, C, tol, max_iter, use_numba=use_numba)
    if not converged:
        log.warning("SMO hit %d iterations before reaching tolerance %g", max_iter, tol)
    rho = compute_rho(alpha, G, ys, C)
    sv = alpha > 0
    return SvmModel(kernel=kernel, gamma=gamma, C=float(C), support_vectors=z[sv],
                    dual_coef=(alpha * ys)[sv], rho=rho, scaler=scaler, alpha=alpha,
                    converged=converged, iterations=it, objective=dual_objective(alpha, K, ys))
