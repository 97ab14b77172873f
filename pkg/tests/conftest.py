from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bidisearch.graph import build_graph  # noqa: E402


@pytest.fixture
def path_graph():
    # s=1, a=2, b=3, t=4
    return build_graph(False, 4, [(1, 2, 1.0), (2, 3, 2.0), (3, 4, 1.0)])


@pytest.fixture
def single_edge():
    return build_graph(False, 2, [(1, 2, 5.0)])


@pytest.fixture
def root_scan_counterexample():
    # forward search closes t while the backward search is still scanning t's in-edges
    return build_graph(True, 4, [(4, 1, 2.0), (2, 3, 2.0), (2, 2, 2.0), (3, 2, 2.0), (4, 2, 2.0), (1, 2, 1.0)])


# acceptance results are collected here by tests/test_acceptance.py and echoed
# in the terminal summary, one line per criterion
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
