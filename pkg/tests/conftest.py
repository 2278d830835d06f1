import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from acfhorizon import Trajectory

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

# criterion id -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE, key=lambda s: (int("".join(ch for ch in s if ch.isdigit())), s)):
        ok, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {cid}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def traj(data, t0=0, names=None):
    return Trajectory(np.asarray(data, dtype=float).reshape(len(data), -1), t0=t0, names=names)
