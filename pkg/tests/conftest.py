from __future__ import annotations

import dataclasses
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from signal_horizon.config import config_from_dict, preset  # noqa: E402
from signal_horizon.harness import run_sweep  # noqa: E402

SEEDS = tuple(20240601 + i for i in range(10))

_outcomes: dict[int, dict] = {}


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None and (report.when == "call" or report.failed):
        number, title = marker.args
        entry = _outcomes.setdefault(number, {"title": title, "passed": True, "failed_tests": []})
        if report.failed:
            entry["passed"] = False
            entry["failed_tests"].append(item.name)
    return report


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        entry = _outcomes[number]
        status = "PASS" if entry["passed"] else "FAIL"
        line = f"criterion {number:>2} {status}  {entry['title']}"
        if entry["failed_tests"]:
            line += f"  (failed: {', '.join(entry['failed_tests'])})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def seeded_sweeps():
    """Ten-seed sweeps of both presets, shared by the statistical checks."""
    out = {}
    for name in ("fig1", "fig2"):
        cfg = config_from_dict(preset(name))
        out[name] = [run_sweep(dataclasses.replace(cfg, master_seed=s)) for s in SEEDS]
    return out
