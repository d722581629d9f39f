"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from teamnego.model import Direction, UtilityProfile

#: One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def record_acceptance(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[acceptance] {status} {name}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def rng_from(*key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(tuple(key)))


def random_profile(
    n: int, rng: np.random.Generator, mixed_directions: bool = True
) -> UtilityProfile:
    gaps = rng.exponential(1.0, n)
    weights = tuple(float(g) / float(gaps.sum()) for g in gaps)
    if mixed_directions:
        directions = tuple(
            Direction.INCREASING if rng.random() < 0.5 else Direction.DECREASING
            for _ in range(n)
        )
    else:
        directions = (Direction.INCREASING,) * n
    return UtilityProfile(weights, directions)


@pytest.fixture
def rng() -> np.random.Generator:
    return rng_from(20240811)
