from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cartierlab.families import EnSpec

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("quick", deadline=None, max_examples=10)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def int_matrix(n: int, lo: int = -3, hi: int = 3):
    return st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n)


@st.composite
def en_specs(draw, sizes=(1, 2)):
    n = draw(st.sampled_from(sizes))
    return EnSpec(n, draw(int_matrix(n)), draw(int_matrix(n)))


def random_matrix(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> list[list[int]]:
    return [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]


def random_skew(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> list[list[int]]:
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            m[i][j] = rng.randint(lo, hi)
            m[j][i] = -m[i][j]
    return m


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20261014)
