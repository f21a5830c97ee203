"""Acceptance suite: one pass/fail line per criterion, with runtime budgets.

Run with ``pytest tests/test_acceptance.py`` (lines are printed even under
capture) or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys
import time

import pytest

from jmf import verify as vf
from jmf.formspec import kac_wakimoto, shifted_pole_form

CRITERIA = {
    1: ("transformation laws", ["transform"], lambda: [None], 60.0),
    2: ("heat and raising operators", ["operators"], lambda: [None], 60.0),
    3: ("decomposition on theta(z+1/2)^4/theta^2 and theta(z+1/2)^6/theta^4", ["decompose"],
        lambda: [kac_wakimoto(4, 2), kac_wakimoto(6, 4)], 300.0),
    4: ("shifted pole at s=(1/2,1/2)", ["shifted"], lambda: [shifted_pole_form()], 180.0),
    5: ("contour vs band oracle and wall crossing", ["oracle"],
        lambda: [kac_wakimoto(4, 2), shifted_pole_form()], 120.0),
    6: ("negative controls", ["controls"], lambda: [None], 60.0),
}


def evaluate(number: int) -> tuple[bool, str]:
    title, groups, forms, budget = CRITERIA[number]
    t0 = time.perf_counter()
    results = []
    for form in forms():
        ctx = vf.Context(form)
        specs = vf.select(groups, form)
        assert specs, f"no checks selected for criterion {number}"
        results += [(form.name if form else "-", vf.run_check(s, ctx)) for s in specs]
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for _, r in results) and elapsed < budget
    failed = [f"{name}:{r.name}={r.residual:.2e}" for name, r in results if not r.passed]
    worst = max(results, key=lambda x: x[1].residual / x[1].tolerance if x[1].bound == "upper" else 0)[1]
    line = (f"CRITERION {number} {'PASS' if ok else 'FAIL'}  {title}: {len(results)} checks, "
            f"{elapsed:.1f}s of {budget:.0f}s"
            + (f", tightest {worst.name} {worst.residual:.1e} < {worst.tolerance:.0e}" if worst.bound == "upper" else "")
            + (f", failed {failed}" if failed else ""))
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line = evaluate(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    status = 0
    for n in sorted(CRITERIA):
        ok, line = evaluate(n)
        print(line)
        status |= not ok
    sys.exit(status)
