"""Driving-maneuver safety classification from smartphone IMU traces."""

__version__ = "0.1.0"

from .features import FEATURE_NAMES, FeatureVector, extract  # noqa: E402
from .sensor import Kind, Label, SensorSample, SensorSegment, duration, load_segments  # noqa: E402

__all__ = [
    "FEATURE_NAMES", "FeatureVector", "extract", "Kind", "Label", "SensorSample",
    "SensorSegment", "duration", "load_segments", "__version__",
]
