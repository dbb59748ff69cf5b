import sys
import time
from contextlib import contextmanager
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Time a criterion block against its limit and record the verdict."""
    @contextmanager
    def run(number: int, limit: float = float("inf")):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            _CRITERIA[number] = (ok and elapsed < limit, elapsed, limit)
            print(f"criterion {number}: {'PASS' if _CRITERIA[number][0] else 'FAIL'} ({elapsed:.1f}s)")
        assert elapsed < limit, f"criterion {number} took {elapsed:.1f}s, limit {limit:.0f}s"
    return run


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, elapsed, limit = _CRITERIA[n]
        bound = f"limit {limit:.0f}s" if limit != float("inf") else "no limit"
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s, {bound})")
