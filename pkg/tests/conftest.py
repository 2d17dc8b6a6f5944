import sys
import time
from pathlib import Path

import pytest
from hypothesis import settings

# Make the brute-force oracle helpers importable from any test module.
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")

_SESSION_START = time.monotonic()


def session_elapsed() -> float:
    return time.monotonic() - _SESSION_START


def pytest_sessionfinish(session, exitstatus):
    elapsed = session_elapsed()
    print(f"\n[suite] total wall time {elapsed:.1f}s (budget 300s)")


@pytest.fixture(scope="session")
def building_dataset():
    from causaldesign.dataset import default_schema, generate_dataset

    return generate_dataset(default_schema(), n=1000, seed=7, noise=0.005)
