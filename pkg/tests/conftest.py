import numpy as np
import pytest

from asgo import _backend


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path_factory, monkeypatch):
    # keep minimizer caches out of the user's home directory
    monkeypatch.setenv("ASGO_CACHE_DIR", str(tmp_path_factory.getbasetemp() / "asgo-cache"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=_backend.available())
def backend(request):
    with _backend.use_backend(request.param):
        yield request.param


_ACCEPTANCE = []


@pytest.fixture
def acceptance_report():
    """Collects one line per acceptance criterion; printed in the terminal summary."""

    def record(number, title, passed, detail):
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        _ACCEPTANCE.append((number, line))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
