"""Two-Gaussian regression of the steering signal.

Model::

    f(x) = a1 exp(-(x - b1)^2 / (2 c1^2)) + a2 exp(-(x - b2)^2 / (2 c2^2))

fitted with a Levenberg-Marquardt loop over ``(a1, b1, log c1, a2, b2, log c2)``
so the widths stay positive. The six fitted numbers double as an alternative
feature vector for the classifiers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveWidth, TooFewSamples
from .sensor import SensorSegment

log = logging.getLogger(__name__)

N_PARAMS = 6
GAUSS_FEATURE_NAMES = ("a1", "b1", "c1", "a2", "b2", "c2")


@dataclass(frozen=True)
class GaussianPair:
    a1: float
    b1: float
    c1: float
    a2: float
    b2: float
    c2: float
    rmse: float = 0.0
    converged: bool = True
    iterations: int = 0
    sse_trace: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise NonPositiveWidth(f"widths must be positive, got c1={self.c1}, c2={self.c2}")

    @property
    def params(self) -> np.ndarray:
        return np.array([self.a1, self.b1, self.c1, self.a2, self.b2, self.c2])

    def canonical(self) -> "GaussianPair":
        """Swap the two components if needed so that ``b1 <= b2``."""
        if self.b1 <= self.b2:
            return self
        return GaussianPair(self.a2, self.b2, self.c2, self.a1, self.b1, self.c1, rmse=self.rmse,
                            converged=self.converged, iterations=self.iterations,
                            sse_trace=self.sse_trace)

    def to_dict(self) -> dict:
        return {"a1": self.a1, "b1": self.b1, "c1": self.c1, "a2": self.a2, "b2": self.b2,
                "c2": self.c2, "rmse": self.rmse, "converged": self.converged}


def _eval(p, x):
    a1, b1, c1, a2, b2, c2 = p
    return (a1 * np.exp(-((x - b1) ** 2) / (2.0 * c1 * c1))
            + a2 * np.exp(-((x - b2) ** 2) / (2.0 * c2 * c2)))


def eval_two_gaussians(p: GaussianPair | tuple, x):
    params = p.params if isinstance(p, GaussianPair) else np.asarray(p, dtype=np.float64)
    if not (params[2] > 0 and params[5] > 0):
        raise NonPositiveWidth("widths must be positive")
    out = _eval(params, np.asarray(x, dtype=np.float64))
    return float(out) if np.ndim(out) == 0 else out


def jacobian(p, x) -> np.ndarray:
    """d f / d (a1, b1, c1, a2, b2, c2), shape ``(len(x), 6)``."""
    a1, b1, c1, a2, b2, c2 = np.asarray(p, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    cols = []
    for a, b, c in ((a1, b1, c1), (a2, b2, c2)):
        u = x - b
        e = np.exp(-u * u / (2.0 * c * c))
        cols += [e, a * e * u / (c * c), a * e * u * u / (c ** 3)]
    return np.column_stack(cols)


def _to_theta(p):
    p = np.asarray(p, dtype=np.float64)
    return np.array([p[0], p[1], math.log(p[2]), p[3], p[4], math.log(p[5])])


def _from_theta(theta):
    return np.array([theta[0], theta[1], math.exp(theta[2]), theta[3], theta[4], math.exp(theta[5])])


def _jacobian_theta(theta, x):
    p = _from_theta(theta)
    j = jacobian(p, x)
    # chain rule for c = exp(s)
    j[:, 2] *= p[2]
    j[:, 5] *= p[5]
    return j


def initial_guess(ts, ys) -> np.ndarray:
    """Centers at the two largest-|y| local extrema, amplitudes at their values,
    widths a sixth of the span."""
    ts = np.asarray(ts, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    n = ys.size
    interior = np.arange(1, n - 1)
    mid, left, right = ys[1:-1], ys[:-2], ys[2:]
    is_max = (mid >= left) & (mid >= right) & ((mid > left) | (mid > right))
    is_min = (mid <= left) & (mid <= right) & ((mid < left) | (mid < right))
    extrema = interior[is_max | is_min]
    order = extrema[np.argsort(-np.abs(ys[extrema]), kind="stable")]
    picks = list(order[:2])
    for idx in np.argsort(-np.abs(ys), kind="stable"):
        if len(picks) >= 2:
            break
        if idx not in picks:
            picks.append(int(idx))
    i1, i2 = sorted(picks[:2])
    width = max((ts[-1] - ts[0]) / 6.0, 1e-6)
    return np.array([ys[i1], ts[i1], width, ys[i2], ts[i2], width])


def fit_two_gaussians(ts, ys, max_iters: int = 200, tol: float = 1e-9, p0=None) -> GaussianPair:
    """Damped least-squares fit; returns the canonical (``b1 <= b2``) pair.

    Each iteration solves ``(J^T J + mu I) delta = J^T r`` and only
    accepts steps that lower the sum of squares, raising ``mu`` tenfold on
    rejection and dividing it by ten on success. Stops once the relative
    drop of the residual sum of squares falls below ``tol``.
    """
    ts = np.asarray(ts, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if ts.shape != ys.shape or ts.ndim != 1:
        raise ValueError("ts and ys must be 1-D of equal length")
    if ts.size < 2 * N_PARAMS:
        raise TooFewSamples(f"need at least {2 * N_PARAMS} samples, got {ts.size}")
    if np.any(np.diff(ts) <= 0):
        raise ValueError("ts must be strictly increasing")

    theta = _to_theta(initial_guess(ts, ys) if p0 is None else p0)
    r = ys - _eval(_from_theta(theta), ts)
    sse = float(r @ r)
    trace = [sse]
    mu = None
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        if sse == 0.0:
            converged = True
            break
        J = _jacobian_theta(theta, ts)
        jtj = J.T @ J
        jtr = J.T @ r
        if mu is None:
            mu = 1e-3 * max(float(np.max(np.diag(jtj))), 1e-12)
        mu_cap = 1e16 * max(float(np.max(np.diag(jtj))), 1.0)
        eye = np.eye(N_PARAMS)
        accepted = False
        while mu < mu_cap:
            try:
                step = np.linalg.solve(jtj + mu * eye, jtr)
            except np.linalg.LinAlgError:
                mu *= 10.0
                continue
            cand = theta + step
            if not np.all(np.isfinite(cand)) or abs(cand[2]) > 50 or abs(cand[5]) > 50:
                mu *= 10.0
                continue
            r_new = ys - _eval(_from_theta(cand), ts)
            sse_new = float(r_new @ r_new)
            if sse_new < sse:
                accepted = True
                break
            mu *= 10.0
        if not accepted:
            # no damping level lowers the residual: at a (local) minimum
            converged = True
            break
        rel = (sse - sse_new) / sse
        theta, r, sse = cand, r_new, sse_new
        trace.append(sse)
        mu = max(mu / 10.0, 1e-15)
        if rel < tol:
            converged = True
            break
    if not converged:
        log.warning("two-Gaussian fit stopped after %d iterations", max_iters)
    p = _from_theta(theta)
    rmse = math.sqrt(sse / ts.size)
    return GaussianPair(*map(float, p), rmse=rmse, converged=converged, iterations=it,
                        sse_trace=tuple(trace)).canonical()


def gauss_features(segment: SensorSegment, **fit_kwargs) -> np.ndarray:
    """``(a1, b1 - t0, c1, a2, b2 - t0, c2)`` from a fit of the gz channel."""
    ts = segment.t - segment.t[0]
    pair = fit_two_gaussians(ts, segment.gz, **fit_kwargs)
    return pair.params
