"""Threshold rule for braking and gas maneuvers.

The largest peak-to-peak swing of the longitudinal acceleration inside any
3-second window decides the verdict::

    delta <= 0.11 g        very safe
    delta >  0.45 g        dangerous
    otherwise              safe

Both "very safe" and "safe" count as the safe label. Gas maneuvers use the
same thresholds as braking.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import WindowTooLong, WrongKind
from .sensor import Kind, Label, SensorSegment, duration

G0 = 9.80665
VERY_SAFE_G = 0.11
DANGEROUS_G = 0.45
WINDOW_S = 3.0


class Severity(str, enum.Enum):
    VERY_SAFE = "very_safe"
    SAFE = "safe"
    DANGEROUS = "dangerous"

    @property
    def label(self) -> Label:
        return Label.DANGEROUS if self is Severity.DANGEROUS else Label.SAFE


@dataclass(frozen=True)
class BrakeVerdict:
    delta_a: float
    severity: Severity
    window: tuple[float, float]

    @property
    def label(self) -> Label:
        return self.severity.label

    def to_dict(self) -> dict:
        return {"delta_a": self.delta_a, "severity": self.severity.value, "label": self.label.value,
                "window": list(self.window)}


def severity_for(delta_a: float, theta_vs: float = VERY_SAFE_G * G0,
                 theta_d: float = DANGEROUS_G * G0) -> Severity:
    if delta_a > theta_d:
        return Severity.DANGEROUS
    if delta_a <= theta_vs:
        return Severity.VERY_SAFE
    return Severity.SAFE


def max_window_swing(t: np.ndarray, a: np.ndarray, window_s: float) -> tuple[float, int, int]:
    """Largest ``max - min`` of ``a`` over windows ``[t_i, t_i + window_s]``.

    Returns ``(swing, first, last)`` with inclusive sample indices of the
    winning window (the earliest one on ties).
    """
    # small slack so a window of exactly N sample periods keeps its end sample
    slack = 1e-9 * max(1.0, window_s)
    ends = np.searchsorted(t, t + window_s + slack, side="right")
    best, bi, bj = -1.0, 0, 0
    for i, j in enumerate(ends):
        seg = a[i:j]
        swing = float(seg.max() - seg.min())
        if swing > best:
            best, bi, bj = swing, i, int(j) - 1
        if j == t.shape[0]:
            break
    return best, bi, bj


def classify_braking(segment: SensorSegment, theta_vs: float = VERY_SAFE_G * G0,
                     theta_d: float = DANGEROUS_G * G0, window_s: float = WINDOW_S) -> BrakeVerdict:
    if segment.kind not in (Kind.BRAKE, Kind.GAS):
        raise WrongKind(f"rule applies to brake/gas maneuvers, got {segment.kind.value}")
    if not 0 <= theta_vs <= theta_d:
        raise ValueError("thresholds must satisfy 0 <= theta_vs <= theta_d")
    slack = 1e-9 * max(1.0, window_s)
    if duration(segment) + slack < window_s:
        raise WindowTooLong(f"segment lasts {duration(segment):.3f} s, window is {window_s} s")
    delta, i, j = max_window_swing(segment.t, segment.ax, window_s)
    return BrakeVerdict(delta_a=delta, severity=severity_for(delta, theta_vs, theta_d),
                        window=(float(segment.t[i]), float(segment.t[j])))
