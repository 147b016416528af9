import numpy as np
import pytest
from hypothesis import settings

from reflectfbm.paths import DiscretePath, UniformGrid

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def brute_holder(values, times, lam):
    """Independent O(n^2) double loop over node pairs."""
    best = 0.0
    for a in range(len(times)):
        for b in range(a + 1, len(times)):
            best = max(best, np.linalg.norm(values[b] - values[a]) / (times[b] - times[a]) ** lam)
    return best


def random_walk(rng, n, d, t_end=1.0, start=None):
    grid = UniformGrid(0.0, t_end, n)
    v = np.cumsum(rng.normal(scale=np.sqrt(grid.dt), size=(n + 1, d)), axis=0)
    v[0] = 0.0
    if start is not None:
        v = v + start
    return DiscretePath(grid, v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria report: (number, title, passed, detail)
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
