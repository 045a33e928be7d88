"""Sensor data types and CSV ingestion.

A CSV file may hold many segments, one row per sample::

    segment_id,kind,label,t,ax,ay,az,gx,gy,gz

Accelerations are in m/s^2, angular rates in rad/s, time in seconds.
``ax`` is the longitudinal ("direct") acceleration, ``ay`` the lateral one and
``gz`` the steering-wheel angular speed. ``az``, ``gx`` and ``gy`` are carried
through but no feature uses them.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import (
    InvalidCategory,
    IrregularSampling,
    MissingColumn,
    NonFiniteValue,
    NonMonotoneTime,
    SensorError,
    TooShortSegment,
)

MIN_SAMPLES = 16
DEFAULT_RATE_HZ = 20.0
SPACING_TOLERANCE = 0.10

CHANNELS = ("ax", "ay", "az", "gx", "gy", "gz")
COLUMNS = ("segment_id", "kind", "label", "t") + CHANNELS


class Kind(str, enum.Enum):
    TURN = "turn"
    UTURN = "uturn"
    LANE_CHANGE = "lane_change"
    BRAKE = "brake"
    GAS = "gas"


class Label(str, enum.Enum):
    SAFE = "safe"
    DANGEROUS = "dangerous"
    UNLABELED = "unlabeled"


class SensorSample(NamedTuple):
    t: float
    ax: float
    ay: float
    az: float
    gx: float
    gy: float
    gz: float


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SensorSegment:
    """One labelled maneuver window, stored column-wise.

    Construction validates the invariants: finite values, strictly increasing
    time stamps spaced within 10% of ``1/rate_hz`` and at least 16 samples.
    """

    segment_id: str
    kind: Kind
    label: Label
    t: np.ndarray
    ax: np.ndarray
    ay: np.ndarray
    az: np.ndarray
    gx: np.ndarray
    gy: np.ndarray
    gz: np.ndarray
    rate_hz: float = DEFAULT_RATE_HZ
    # row number of the first sample in the source file, for error messages
    first_row: int | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "label", Label(self.label))
        object.__setattr__(self, "segment_id", str(self.segment_id))
        for name in ("t",) + CHANNELS:
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        _validate(self)

    def __len__(self) -> int:
        return self.t.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SensorSegment):
            return NotImplemented
        return (
            self.segment_id == other.segment_id
            and self.kind == other.kind
            and self.label == other.label
            and self.rate_hz == other.rate_hz
            and all(np.array_equal(getattr(self, c), getattr(other, c)) for c in ("t",) + CHANNELS)
        )

    @property
    def samples(self) -> list[SensorSample]:
        cols = [getattr(self, c) for c in ("t",) + CHANNELS]
        return [SensorSample(*map(float, row)) for row in zip(*cols)]

    def channel(self, name: str) -> np.ndarray:
        if name not in CHANNELS:
            raise KeyError(name)
        return getattr(self, name)

    def shifted(self, dt: float) -> "SensorSegment":
        """Copy with every time stamp moved by ``dt`` seconds."""
        return replace(self, t=self.t + dt)

    @classmethod
    def from_samples(cls, segment_id, kind, label, samples: Iterable[SensorSample],
                     rate_hz: float = DEFAULT_RATE_HZ) -> "SensorSegment":
        arr = np.asarray([tuple(s) for s in samples], dtype=np.float64).reshape(-1, 7)
        cols = {name: arr[:, i] for i, name in enumerate(("t",) + CHANNELS)}
        return cls(segment_id=segment_id, kind=kind, label=label, rate_hz=rate_hz, **cols)


def _validate(seg: SensorSegment) -> None:
    sid = seg.segment_id
    base = seg.first_row
    n = len(seg.t)
    for name in ("t",) + CHANNELS:
        arr = getattr(seg, name)
        if arr.shape != (n,):
            raise SensorError(f"channel {name} has shape {arr.shape}, expected ({n},)", segment_id=sid)
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            row = None if base is None else base + int(bad[0])
            raise NonFiniteValue(f"non-finite value in column {name}", row=row, segment_id=sid)
    if not (math.isfinite(seg.rate_hz) and seg.rate_hz > 0):
        raise SensorError(f"rate_hz must be positive, got {seg.rate_hz}", segment_id=sid)

    dt = np.diff(seg.t)
    bad = np.flatnonzero(dt <= 0)
    if bad.size:
        row = None if base is None else base + int(bad[0]) + 1
        raise NonMonotoneTime("time stamps must be strictly increasing", row=row, segment_id=sid)
    period = 1.0 / seg.rate_hz
    bad = np.flatnonzero(np.abs(dt - period) > SPACING_TOLERANCE * period)
    if bad.size:
        row = None if base is None else base + int(bad[0]) + 1
        raise IrregularSampling(
            f"sample spacing {dt[bad[0]]:.6g} s deviates more than 10% from {period:.6g} s",
            row=row, segment_id=sid)
    if n < MIN_SAMPLES:
        raise TooShortSegment(f"{n} samples, need at least {MIN_SAMPLES}", row=base, segment_id=sid)


def duration(segment: SensorSegment) -> float:
    """Elapsed time between the first and last sample, in seconds."""
    return float(segment.t[-1] - segment.t[0])


# CSV I/O ----------------------------------------------------------------

def _parse_float(text: str, column: str, row: int, sid: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise NonFiniteValue(f"cannot parse {text!r} in column {column}", row=row, segment_id=sid) from None
    if not math.isfinite(value):
        raise NonFiniteValue(f"non-finite value {text!r} in column {column}", row=row, segment_id=sid)
    return value


def read_segments(stream: io.TextIOBase, rate_hz: float = DEFAULT_RATE_HZ) -> list[SensorSegment]:
    reader = csv.reader(stream)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise MissingColumn("empty file, no header", row=1) from None
    missing = [c for c in COLUMNS if c not in header]
    if missing:
        raise MissingColumn(f"missing column(s): {', '.join(missing)}", row=1)
    idx = {c: header.index(c) for c in COLUMNS}

    # segment_id -> (kind, label, first_row, rows)
    groups: dict[str, list] = {}
    for rownum, rec in enumerate(reader, start=2):
        if not rec or all(not f.strip() for f in rec):
            continue
        if len(rec) < len(header):
            raise MissingColumn(f"expected {len(header)} fields, got {len(rec)}", row=rownum)
        sid = rec[idx["segment_id"]].strip()
        kind = rec[idx["kind"]].strip().lower()
        label = rec[idx["label"]].strip().lower()
        try:
            Kind(kind)
            Label(label)
        except ValueError:
            raise InvalidCategory(f"unknown kind/label {kind!r}/{label!r}", row=rownum, segment_id=sid) from None
        values = [_parse_float(rec[idx[c]], c, rownum, sid) for c in ("t",) + CHANNELS]
        if sid not in groups:
            groups[sid] = [kind, label, rownum, []]
        g = groups[sid]
        if (g[0], g[1]) != (kind, label):
            raise InvalidCategory("kind/label changes within a segment", row=rownum, segment_id=sid)
        g[3].append(values)

    segments = []
    for sid, (kind, label, first_row, rows) in groups.items():
        arr = np.asarray(rows, dtype=np.float64)
        cols = {name: arr[:, i] for i, name in enumerate(("t",) + CHANNELS)}
        segments.append(SensorSegment(segment_id=sid, kind=kind, label=label, rate_hz=rate_hz,
                                      first_row=first_row, **cols))
    return segments


def load_segments(path: str | os.PathLike, format: str = "csv",
                  rate_hz: float = DEFAULT_RATE_HZ) -> list[SensorSegment]:
    """Parse and validate every segment in a CSV log, in file order."""
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}")
    with open(path, newline="", encoding="utf-8") as fh:
        return read_segments(fh, rate_hz=rate_hz)


def _rows(segments: Iterable[SensorSegment]) -> Iterator[list[str]]:
    for seg in segments:
        cols = [getattr(seg, c) for c in ("t",) + CHANNELS]
        for values in zip(*cols):
            # repr() of a Python float is the shortest string that round-trips
            yield [seg.segment_id, seg.kind.value, seg.label.value] + [repr(float(v)) for v in values]


def write_segments(stream: io.TextIOBase, segments: Iterable[SensorSegment]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    writer.writerows(_rows(segments))


def save_segments(path: str | os.PathLike, segments: Iterable[SensorSegment]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        write_segments(fh, segments)
