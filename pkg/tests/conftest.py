from pathlib import Path

import pytest

from hgsqueeze.basis import BeamGeometry

DATA = Path(__file__).resolve().parents[1] / "src" / "hgsqueeze" / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def unit():
    return BeamGeometry(1.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(RESULTS):
        checks = RESULTS[crit]
        ok = all(c[1] for c in checks)
        failed = "; ".join(c[0] + ": " + c[2] for c in checks if not c[1])
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {crit:>2}: {len(checks)} checks"
        terminalreporter.write_line(line + ("" if ok else f"  -- {failed}"))
