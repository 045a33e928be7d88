import sys

import numpy as np
import pytest
from hypothesis import settings

from drivestyle.sensor import SensorSegment

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def make_segment(n=64, rate=20.0, t0=0.0, kind="turn", label="safe", sid="s", **channels):
    t = t0 + np.arange(n) / rate
    cols = {c: np.asarray(channels.get(c, np.zeros(n)), dtype=float) for c in ("ax", "ay", "az", "gx", "gy", "gz")}
    return SensorSegment(segment_id=sid, kind=kind, label=label, rate_hz=rate, t=t, **cols)


@pytest.fixture
def segment_factory():
    return make_segment


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
