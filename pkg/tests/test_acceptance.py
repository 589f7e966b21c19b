"""End-to-end acceptance gate.

Runs the full acceptance suite once and asserts each criterion separately,
printing one pass/fail line per criterion.
"""

import sys

import pytest

from randswitch import acceptance


@pytest.fixture(scope="module")
def summary():
    return acceptance.verify_all(stream=sys.__stdout__)


@pytest.mark.parametrize("number", [c[0] for c in acceptance.CRITERIA])
def test_criterion(summary, number):
    entry = next(c for c in summary["criteria"] if c["number"] == number)
    mark = "pass" if entry["passed"] else "FAIL"
    print(f"[{mark}] criterion {number:2d}: {entry['name']}")
    assert entry["passed"], entry["detail"]
