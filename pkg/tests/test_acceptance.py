"""The eight acceptance criteria at their stated tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.  Run this file directly to print the lines without pytest.
"""
import pytest

from vortexpacket.checks import CHECKS, run_check

RESULTS = []


@pytest.mark.parametrize("number", [c[0] for c in CHECKS], ids=[c[1].replace(" ", "_") for c in CHECKS])
def test_criterion(number):
    result = run_check(number)
    RESULTS.append(result)
    print(result.line())
    assert result.passed, result.line()


if __name__ == "__main__":
    for number, _, _ in CHECKS:
        print(run_check(number).line())
