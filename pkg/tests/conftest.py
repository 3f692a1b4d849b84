import numpy as np
import pytest
from hypothesis import settings, strategies as st

from hofa.group import GroupFunction, GroupSpec

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

SMALL_GROUPS = [(1,), (2,), (5,), (6,), (8,), (2, 2), (2, 3), (3, 4), (2, 2, 2)]


def random_function(group: GroupSpec, rng: np.random.Generator, scale: float = 1.0) -> GroupFunction:
    n = group.order
    return GroupFunction(group, scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n)))


def bounded_function(group: GroupSpec, rng: np.random.Generator) -> GroupFunction:
    """Random function with |f(x)| <= 1."""
    n = group.order
    return GroupFunction(group, rng.uniform(0, 1, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n)))


def quadratic_phase(n: int, a: int = 1, b: int = 0) -> GroupFunction:
    x = np.arange(n, dtype=np.int64)
    return GroupFunction(GroupSpec.cyclic(n), np.exp(2j * np.pi * ((a * x * x + b * x) % n) / n))


groups = st.sampled_from(SMALL_GROUPS).map(GroupSpec)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
