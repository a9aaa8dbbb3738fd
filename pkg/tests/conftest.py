import sys

import numpy as np
import pytest

from hocpoles import _backend


@pytest.fixture(params=sorted(_backend.KERNELS))
def kernel(request, monkeypatch):
    """Run a test once per available crossing kernel."""
    monkeypatch.setattr(_backend, "ingest_block", _backend.KERNELS[request.param])
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    RESULTS = module.RESULTS
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, line = RESULTS[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {line}")
