"""The 22-component wavelet feature vector.

Layout (1-based, as used in reports)::

    1       duration
    2-8     gz: var, mean, var A4, var D4, var D3, var D2, var D1
    9-15    ay (lateral acceleration), same sub-order
    16-22   ax (direct acceleration), same sub-order
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import TooShort
from .sensor import MIN_SAMPLES, SensorSegment, duration
from .wavelet import decompose4, variance

# which physical channel feeds each 7-wide block
BLOCK_CHANNELS = ("gz", "ay", "ax")
_BLOCK_PARTS = ("var", "mean", "var_a4", "var_d4", "var_d3", "var_d2", "var_d1")

FEATURE_NAMES: tuple[str, ...] = ("dur",) + tuple(
    f"{part}_{ch}" for ch in BLOCK_CHANNELS for part in _BLOCK_PARTS)
N_FEATURES = len(FEATURE_NAMES)

# 0-based indices of the mean components, useful for tests and scaling
MEAN_INDICES = tuple(FEATURE_NAMES.index(f"mean_{ch}") for ch in BLOCK_CHANNELS)


@dataclass(frozen=True)
class FeatureVector:
    v: np.ndarray
    names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        v = np.array(self.v, dtype=np.float64)
        if v.shape != (N_FEATURES,) or not np.all(np.isfinite(v)):
            raise ValueError("feature vector must hold 22 finite values")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    def __getitem__(self, component: int) -> float:
        """1-based component access."""
        if not 1 <= component <= N_FEATURES:
            raise IndexError(component)
        return float(self.v[component - 1])

    def as_dict(self) -> dict[str, float]:
        return {name: float(x) for name, x in zip(self.names, self.v)}


def channel_block(x: np.ndarray) -> list[float]:
    dec = decompose4(x)
    return [variance(x), float(np.mean(x))] + [variance(b) for b in dec.bands()]


def extract(segment: SensorSegment) -> FeatureVector:
    if len(segment) < MIN_SAMPLES:
        raise TooShort(f"segment has {len(segment)} samples, need {MIN_SAMPLES}")
    values = [duration(segment)]
    for ch in BLOCK_CHANNELS:
        values.extend(channel_block(segment.channel(ch)))
    return FeatureVector(np.asarray(values))


def feature_matrix(segments: Iterable[SensorSegment]) -> np.ndarray:
    rows = [extract(s).v for s in segments]
    return np.vstack(rows) if rows else np.empty((0, N_FEATURES))


# export -----------------------------------------------------------------

def column_names(n: int) -> list[str]:
    return [f"f{i:02d}" for i in range(1, n + 1)]


def write_feature_csv(path: str | os.PathLike, ids: Sequence[str], labels: Sequence[str],
                      x: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["segment_id", "label"] + column_names(x.shape[1]))
        for sid, lab, row in zip(ids, labels, x):
            w.writerow([sid, lab] + [repr(float(v)) for v in row])


def read_feature_csv(path: str | os.PathLike) -> tuple[list[str], list[str], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header[:2] != ["segment_id", "label"]:
            raise ValueError(f"{path}: expected header starting with segment_id,label")
        ids, labels, rows = [], [], []
        for rec in r:
            if not rec:
                continue
            ids.append(rec[0])
            labels.append(rec[1])
            rows.append([float(v) for v in rec[2:]])
    x = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(header) - 2)
    return ids, labels, x


def write_feature_json(path: str | os.PathLike, ids: Sequence[str], labels: Sequence[str],
                       x: np.ndarray, names: Sequence[str] = FEATURE_NAMES) -> None:
    doc = {
        "names": list(names),
        "segments": [
            {"segment_id": sid, "label": lab, "features": dict(zip(names, map(float, row)))}
            for sid, lab, row in zip(ids, labels, x)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
