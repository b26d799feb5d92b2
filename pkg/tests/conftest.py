import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ffwd.model import VideoRecord
from ffwd.synth import ScenarioSpec, asd_style_spec, generate

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def make_video(n=6, f=2, bins=2, hist=None, thumbs=None, scores=None, motion=None, features=None):
    """Hand-built video; histograms default to uniform."""
    if hist is None:
        hist = np.full((n, 3, bins), 1.0 / bins)
    return VideoRecord(
        features=np.zeros((n, f)) if features is None else features,
        semantic_scores=np.zeros(n) if scores is None else scores,
        motion=np.zeros(n) if motion is None else motion,
        histograms=hist,
        thumbnails=thumbs,
    )


def one_hot_hist(n, bins, hot):
    """Histograms whose every channel puts all mass on bin ``hot[i]``."""
    h = np.zeros((n, 3, bins))
    for i, b in enumerate(hot):
        h[i, :, b] = 1.0
    return h


@pytest.fixture(scope="session")
def small_video():
    return generate(ScenarioSpec(n=400, f=8, semantic_fraction=0.5, shake_bursts=((50, 30, 2.0),), seed=7))


@pytest.fixture(scope="session")
def asd_video():
    return generate(asd_style_spec(3, 0.5))


VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
