from pathlib import Path

import numpy as np
import pytest

from dctjpeg import _kernels
from dctjpeg.image import RasterImage, load

DATA = Path(__file__).parent / "data"
CORPUS = sorted(DATA.glob("*.p[gp]m"))

_acceptance = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def corpus() -> dict[str, RasterImage]:
    return {p.stem: load(p) for p in CORPUS}


@pytest.fixture(params=sorted(_kernels.BACKENDS))
def backend(request):
    """Run a test once per available scan-kernel backend."""
    previous = _kernels.backend()
    _kernels.use_backend(request.param)
    yield request.param
    _kernels.use_backend(previous)


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome
    elif "test_acceptance.py" in report.nodeid and report.outcome == "failed":
        _acceptance[report.nodeid.split("::")[-1]] = "failed"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        status = "PASS" if _acceptance[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
