"""Orthonormal Haar DWT.

Analysis at one level applies each filter at even offsets with periodic
wrap-around::

    approx[n] = sum_k low[k]  * x[(2n + k) mod N]
    detail[n] = sum_k high[k] * x[(2n + k) mod N]

which is convolution with the time-reversed filter followed by keeping every
second output. With ``low = [1, 1]/sqrt(2)`` and ``high = [1, -1]/sqrt(2)``
this gives ``approx = (x0 + x1)/sqrt(2)`` and ``detail = (x0 - x1)/sqrt(2)``
per sample pair. Odd-length inputs get their last sample repeated once before
filtering, so every level output has ``ceil(N/2)`` coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, EmptySignal, ShapeMismatch, TooShort

LEVELS = 4
MIN_LENGTH = 2 ** LEVELS

_S = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class FilterPair:
    low: tuple[float, ...]
    high: tuple[float, ...]

    def __post_init__(self):
        low = np.asarray(self.low, dtype=float)
        high = np.asarray(self.high, dtype=float)
        if low.shape != high.shape or low.ndim != 1 or low.size < 2:
            raise ValueError("filters must be 1-D and of equal length >= 2")
        for name, f in (("low", low), ("high", high)):
            if abs(float(f @ f) - 1.0) > 1e-12:
                raise ValueError(f"{name} filter is not unit-norm")
        if abs(float(low @ high)) > 1e-12:
            raise ValueError("low and high filters are not orthogonal")


HAAR = FilterPair(low=(_S, _S), high=(_S, -_S))


@dataclass(frozen=True)
class DwtDecomposition:
    """Level-4 approximation ``a4`` and details ``d4`` (coarsest) .. ``d1`` (finest)."""

    a4: np.ndarray
    d4: np.ndarray
    d3: np.ndarray
    d2: np.ndarray
    d1: np.ndarray

    @property
    def details(self) -> tuple[np.ndarray, ...]:
        """Details ordered coarse to fine: d4, d3, d2, d1."""
        return (self.d4, self.d3, self.d2, self.d1)

    def bands(self) -> tuple[np.ndarray, ...]:
        return (self.a4, self.d4, self.d3, self.d2, self.d1)


def _pad_even(x: np.ndarray) -> np.ndarray:
    if x.shape[0] % 2:
        return np.concatenate([x, x[-1:]])
    return x


def dwt_step(signal, filters: FilterPair = HAAR) -> tuple[np.ndarray, np.ndarray]:
    """One analysis level: returns ``(approx, detail)``."""
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] == 0:
        raise EmptySignal("signal must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(x)):
        raise EmptySignal("signal contains non-finite values")
    x = _pad_even(x)
    low = np.asarray(filters.low, dtype=np.float64)
    high = np.asarray(filters.high, dtype=np.float64)
    m = x.shape[0] // 2
    taps = low.shape[0]
    if taps == 2:
        pairs = x.reshape(m, 2)
        return pairs @ low, pairs @ high
    idx = (2 * np.arange(m)[:, None] + np.arange(taps)[None, :]) % x.shape[0]
    windows = x[idx]
    return windows @ low, windows @ high


def decompose4(signal, filters: FilterPair = HAAR) -> DwtDecomposition:
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < MIN_LENGTH:
        raise TooShort(f"need at least {MIN_LENGTH} samples for {LEVELS} levels, got {x.size}")
    details = []
    approx = x
    for _ in range(LEVELS):
        approx, det = dwt_step(approx, filters)
        details.append(det)
    d1, d2, d3, d4 = details
    return DwtDecomposition(a4=approx, d4=d4, d3=d3, d2=d2, d1=d1)


def idwt_step(approx, detail, filters: FilterPair = HAAR) -> np.ndarray:
    """Synthesis matching :func:`dwt_step` (transpose of the orthonormal analysis)."""
    a = np.asarray(approx, dtype=np.float64)
    d = np.asarray(detail, dtype=np.float64)
    if a.shape != d.shape:
        raise ShapeMismatch(f"approx {a.shape} and detail {d.shape} differ")
    low = np.asarray(filters.low, dtype=np.float64)
    high = np.asarray(filters.high, dtype=np.float64)
    m = a.shape[0]
    n = 2 * m
    out = np.zeros(n)
    for k in range(low.shape[0]):
        np.add.at(out, (2 * np.arange(m) + k) % n, a * low[k] + d * high[k])
    return out


def reconstruct(dec: DwtDecomposition, original_len: int, filters: FilterPair = HAAR) -> np.ndarray:
    """Invert :func:`decompose4`.

    Exact (to rounding) when no level needed parity padding, i.e. when
    ``original_len`` is a multiple of 16.
    """
    # approximation length entering each level, finest first
    lengths = [int(original_len)]
    for det in (dec.d1, dec.d2, dec.d3):
        lengths.append(det.shape[0])
    for target, det in zip(lengths, (dec.d1, dec.d2, dec.d3, dec.d4)):
        if det.shape[0] != (target + 1) // 2:
            raise ShapeMismatch(f"detail of length {det.shape[0]} cannot come from length {target}")
    approx = np.asarray(dec.a4, dtype=np.float64)
    for target, det in zip(reversed(lengths), reversed((dec.d1, dec.d2, dec.d3, dec.d4))):
        approx = idwt_step(approx, det, filters)[:target]
    return approx


def variance(xs) -> float:
    """Population variance (divides by n)."""
    x = np.asarray(xs, dtype=np.float64)
    if x.size == 0:
        raise EmptyInput("variance of an empty sequence")
    return float(np.mean((x - x.mean()) ** 2))
