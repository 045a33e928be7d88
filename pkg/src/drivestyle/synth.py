"""Seeded synthetic maneuvers on an exact 20 Hz grid.

Shapes are simple analytic envelopes:

* turn / U-turn: one Gaussian bump on gz with a matching lateral bump on ay
  and a mild deceleration bump on ax (U-turns are wider and taller);
* lane change: a positive then a negative gz bump, mirrored on ay;
* brake / gas: a tanh-smoothed step on ax (down for brake, up for gas).

Dangerous variants are shorter and roughly twice as strong. White Gaussian
noise of ``noise_std`` is added to every channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import TooShortSpec
from .sensor import DEFAULT_RATE_HZ, MIN_SAMPLES, Kind, Label, SensorSegment

G0 = 9.80665


class Ranges(NamedTuple):
    duration_s: tuple[float, float]
    gz: tuple[float, float]   # rad/s, bump peak
    ay: tuple[float, float]   # m/s^2, bump peak
    ax: tuple[float, float]   # m/s^2, bump peak (turns) or step height (brake/gas)


# (kind, label) -> uniform ranges used by generate_corpus; defaults are midpoints
DEFAULT_RANGES: dict[tuple[Kind, Label], Ranges] = {
    (Kind.TURN, Label.SAFE): Ranges((3.0, 6.0), (0.4, 0.8), (1.5, 3.0), (0.3, 0.6)),
    (Kind.TURN, Label.DANGEROUS): Ranges((1.0, 2.5), (0.8, 1.6), (3.0, 6.0), (0.6, 1.2)),
    (Kind.UTURN, Label.SAFE): Ranges((6.0, 10.0), (0.5, 1.0), (1.5, 3.0), (0.3, 0.6)),
    (Kind.UTURN, Label.DANGEROUS): Ranges((3.0, 5.0), (1.0, 2.0), (3.0, 6.0), (0.6, 1.2)),
    (Kind.LANE_CHANGE, Label.SAFE): Ranges((4.0, 7.0), (0.15, 0.3), (0.8, 1.6), (0.0, 0.0)),
    (Kind.LANE_CHANGE, Label.DANGEROUS): Ranges((2.0, 3.5), (0.3, 0.6), (1.6, 3.2), (0.0, 0.0)),
    (Kind.BRAKE, Label.SAFE): Ranges((4.0, 7.0), (0.0, 0.0), (0.0, 0.0), (0.5, 3.0)),
    (Kind.BRAKE, Label.DANGEROUS): Ranges((3.5, 4.5), (0.0, 0.0), (0.0, 0.0), (5.0, 8.0)),
    (Kind.GAS, Label.SAFE): Ranges((4.0, 7.0), (0.0, 0.0), (0.0, 0.0), (0.5, 3.0)),
    (Kind.GAS, Label.DANGEROUS): Ranges((3.5, 4.5), (0.0, 0.0), (0.0, 0.0), (5.0, 8.0)),
}

DEFAULT_NOISE_STD = 0.05

# bump width as a fraction of the maneuver duration
_TURN_WIDTH = 1.0 / 6.0
_UTURN_WIDTH = 1.0 / 4.0
_LANE_WIDTH = 1.0 / 10.0
# tanh time constant of brake/gas steps, seconds
_STEP_TAU = {Label.SAFE: 0.25, Label.DANGEROUS: 0.1}

_KIND_CODE = {k: i for i, k in enumerate(Kind)}
_LABEL_CODE = {Label.SAFE: 0, Label.DANGEROUS: 1}


@dataclass(frozen=True)
class ScenarioSpec:
    kind: Kind
    label: Label
    duration_s: float
    gz_amp: float
    ay_amp: float
    ax_amp: float
    noise_std: float = DEFAULT_NOISE_STD
    seed: int = 0
    rate_hz: float = DEFAULT_RATE_HZ
    segment_id: str = "synth"

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "label", Label(self.label))
        if self.label is Label.UNLABELED:
            raise ValueError("synthetic scenarios are labelled safe or dangerous")
        if self.noise_std < 0:
            raise ValueError("noise_std must be nonnegative")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s * self.rate_hz))

    @classmethod
    def default(cls, kind, label, **overrides) -> "ScenarioSpec":
        """Scenario at the midpoint of every default range."""
        if Label(label) is Label.UNLABELED:
            raise ValueError("synthetic scenarios are labelled safe or dangerous")
        r = DEFAULT_RANGES[(Kind(kind), Label(label))]
        mid = lambda lo_hi: 0.5 * (lo_hi[0] + lo_hi[1])  # noqa: E731
        values = dict(kind=Kind(kind), label=Label(label), duration_s=mid(r.duration_s),
                      gz_amp=mid(r.gz), ay_amp=mid(r.ay), ax_amp=mid(r.ax))
        values.update(overrides)
        return cls(**values)


def _bump(t, center, width):
    return np.exp(-((t - center) ** 2) / (2.0 * width * width))


def envelope(spec: ScenarioSpec, t: np.ndarray) -> dict[str, np.ndarray]:
    """Noise-free channels for ``spec`` on time grid ``t`` (starting at 0)."""
    span = t[-1] - t[0] if t.size > 1 else 0.0
    zeros = np.zeros_like(t)
    ch = {"ax": zeros.copy(), "ay": zeros.copy(), "az": np.full_like(t, G0),
          "gx": zeros.copy(), "gy": zeros.copy(), "gz": zeros.copy()}
    if spec.kind in (Kind.TURN, Kind.UTURN):
        frac = _TURN_WIDTH if spec.kind is Kind.TURN else _UTURN_WIDTH
        shape = _bump(t, t[0] + span / 2.0, frac * span)
        ch["gz"] = spec.gz_amp * shape
        ch["ay"] = spec.ay_amp * shape
        ch["ax"] = -spec.ax_amp * shape
    elif spec.kind is Kind.LANE_CHANGE:
        w = _LANE_WIDTH * span
        shape = _bump(t, t[0] + span / 3.0, w) - _bump(t, t[0] + 2.0 * span / 3.0, w)
        ch["gz"] = spec.gz_amp * shape
        ch["ay"] = spec.ay_amp * shape
    else:
        sign = -1.0 if spec.kind is Kind.BRAKE else 1.0
        tau = _STEP_TAU[spec.label]
        ch["ax"] = sign * spec.ax_amp * 0.5 * (1.0 + np.tanh((t - t[0] - span / 2.0) / tau))
    return ch


def generate(spec: ScenarioSpec) -> SensorSegment:
    n = spec.n_samples
    if n < MIN_SAMPLES:
        raise TooShortSpec(f"{spec.duration_s} s at {spec.rate_hz} Hz gives {n} samples, "
                           f"need {MIN_SAMPLES}")
    t = np.arange(n) / spec.rate_hz
    channels = envelope(spec, t)
    if spec.noise_std > 0:
        rng = np.random.default_rng(spec.seed)
        for name in ("ax", "ay", "az", "gx", "gy", "gz"):
            channels[name] = channels[name] + rng.normal(0.0, spec.noise_std, n)
    return SensorSegment(segment_id=spec.segment_id, kind=spec.kind, label=spec.label,
                         rate_hz=spec.rate_hz, t=t, **channels)


def _draw(rng: np.random.Generator, lo_hi: tuple[float, float]) -> float:
    lo, hi = lo_hi
    return float(rng.uniform(lo, hi)) if hi > lo else float(lo)


def corpus_specs(kind, n_per_class: int, master_seed: int,
                 noise_std: float = DEFAULT_NOISE_STD) -> list[ScenarioSpec]:
    kind = Kind(kind)
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    specs = []
    for label in (Label.SAFE, Label.DANGEROUS):
        r = DEFAULT_RANGES[(kind, label)]
        for i in range(n_per_class):
            rng = np.random.default_rng([master_seed, _KIND_CODE[kind], _LABEL_CODE[label], i])
            specs.append(ScenarioSpec(
                kind=kind, label=label,
                duration_s=_draw(rng, r.duration_s), gz_amp=_draw(rng, r.gz),
                ay_amp=_draw(rng, r.ay), ax_amp=_draw(rng, r.ax),
                noise_std=noise_std, seed=int(rng.integers(2**31 - 1)),
                segment_id=f"{kind.value}-{label.value}-{i:04d}"))
    return specs


def generate_corpus(kind, n_per_class: int, master_seed: int = 0,
                    noise_std: float = DEFAULT_NOISE_STD) -> list[SensorSegment]:
    """``n_per_class`` safe then ``n_per_class`` dangerous segments."""
    return [generate(s) for s in corpus_specs(kind, n_per_class, master_seed, noise_std)]


def peak_amplitude(spec: ScenarioSpec) -> float:
    """Largest absolute value of the defining channel's noise-free envelope."""
    t = np.arange(max(spec.n_samples, 1)) / spec.rate_hz
    ch = envelope(spec, t)
    key = "ax" if spec.kind in (Kind.BRAKE, Kind.GAS) else "gz"
    return float(np.max(np.abs(ch[key])))


def expected_duration(spec: ScenarioSpec) -> float:
    return (spec.n_samples - 1) / spec.rate_hz if spec.n_samples else math.nan
