"""Acceptance suite: one test per criterion, each printing its pass/fail line.

Mirrors the ``autocorr verify`` subcommand; every criterion runs at its stated
tolerance with the expected values frozen in :mod:`autocorr.verification`.
"""

import time

import pytest

from autocorr.verification import CRITERIA, run_acceptance


@pytest.mark.parametrize("index", sorted(CRITERIA))
def test_criterion(index, capsys):
    t0 = time.perf_counter()
    result = CRITERIA[index]()
    elapsed = time.perf_counter() - t0
    status = "PASS" if result.passed else "FAIL"
    with capsys.disabled():
        print(f"\n[{status}] criterion {index}: {result.title} ({elapsed:.1f}s)")
        for c in result.checks:
            if not c.passed:
                print(f"    FAILED {c.name}: measured {c.measured!r} vs "
                      f"expected {c.expected!r} (tol {c.tolerance:g}, {c.comparison})")
    assert result.passed, f"criterion {index} failed: " + "; ".join(
        f"{c.name}={c.measured!r}" for c in result.checks if not c.passed)


def test_fault_injection_negative_control():
    results = run_acceptance(fault=4, only=[4])
    assert len(results) == 1
    assert not results[0].passed
