import functools

import pytest

from eoll.errors import TooManyFailures
from eoll.mcstudy import SimConfig, run_study


@functools.lru_cache(maxsize=None)
def _cached_study(n: int, censoring: float, replicates: int):
    try:
        return run_study(SimConfig(n=n, censoring=censoring, replicates=replicates), keep_residuals=True)
    except TooManyFailures as exc:
        return exc


@pytest.fixture(scope="session")
def study():
    """Monte Carlo cells at the default seed, computed once per session."""

    def get(n: int, censoring: float, replicates: int):
        out = _cached_study(n, censoring, replicates)
        if isinstance(out, Exception):
            raise out
        return out

    return get


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record a one-line acceptance verdict and fail the test if it is negative."""

    def record(k: int, ok: bool, detail: str) -> None:
        line = f"criterion {k}: {'PASS' if ok else 'FAIL'} | {detail}"
        print(line)
        request.config.stash.setdefault(_VERDICTS, []).append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
