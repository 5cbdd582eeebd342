"""Acceptance gate: every criterion runs at its stated tolerance.

One test per criterion, each printing its pass/fail line with the measured
quantities.  The underlying sweeps live in ``toricstab.acceptance`` and are
also reachable through ``toricstab selftest``.
"""

import pytest

from toricstab import acceptance


@pytest.mark.parametrize(
    "criterion", acceptance.CRITERIA,
    ids=[fn.__name__.split("_", 1)[1] for fn in acceptance.CRITERIA])
def test_criterion(criterion):
    result = criterion()
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] {result.criterion}: {result.detail}")
    assert result.passed, f"{result.criterion}: {result.detail}"
