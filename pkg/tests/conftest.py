import json
import subprocess
import sys
import time

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("qmeas", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qmeas")

_CRITERIA: list[str] = []


def full_run(path):
    """Run every scenario through the CLI with the default config; returns
    (parsed reports, raw bytes, wall seconds, exit code)."""
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "qmeas", "run", "all", "--format", "json",
                           "--out", str(path)], capture_output=True, text=True)
    elapsed = time.perf_counter() - start
    raw = path.read_bytes() if path.exists() else b""
    reports = {r["scenario"]: r for r in json.loads(raw)} if raw else {}
    return reports, raw, elapsed, proc.returncode


@pytest.fixture(scope="session")
def suite_run(tmp_path_factory):
    return full_run(tmp_path_factory.mktemp("suite") / "first.json")


@pytest.fixture
def criterion(request):
    """Call with (ok, detail); records one PASS/FAIL line and asserts."""
    def record(ok: bool, detail: str = ""):
        line = f"{'PASS' if ok else 'FAIL'}  {request.node.name}  {detail}".rstrip()
        print(line)
        _CRITERIA.append(line)
        assert ok, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
