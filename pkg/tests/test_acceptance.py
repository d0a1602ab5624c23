"""Acceptance suite: one test per criterion, each at its stated tolerance and
time budget.

Every criterion prints a single ``PASS``/``FAIL`` line.  Under pytest the lines
are collected and shown in the terminal summary (so they survive output
capture); ``python tests/test_acceptance.py`` runs the same criteria directly.
The numbers come from :mod:`relcm.suites`, the same code behind
``relcm verify``.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from typing import Callable

import pytest

from relcm import suites
from relcm.suites import SuiteReport

RESULT_LINES: list[str] = []


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    run: Callable[[], SuiteReport]
    budget_s: float


CRITERIA = (
    Criterion(1, "G-laws at 200 strip points, rel < 1e-10", lambda: suites.gamma_laws(), 10.0),
    Criterion(2, "conical closed form < 1e-8, R_ren A-Delta-E < 1e-9",
              lambda: suites.ade(parts=("conical",)), 60.0),
    Criterion(3, "coefficient oracle, symmetries and identities",
              lambda: suites.ade(parts=("coefficients",)), 30.0),
    Criterion(4, "joint eigenfunction A-Delta-Es < 1e-9, psi_N vs psi < 1e-10",
              lambda: suites.ade(parts=("eigenfunction",)), 120.0),
    Criterion(5, "Yang-Baxter residuals < 1e-12 at 100 draws", lambda: suites.yang_baxter(), 5.0),
    Criterion(6, "isometry: forward Gram defect < 1e-6", lambda: suites.isometry(), 600.0),
    Criterion(7, "unitarity: adjoint Gram defect < 1e-6", lambda: suites.unitarity(), 600.0),
    Criterion(8, "bound state: rank 1, projector norm, L2 norm, energy", lambda: suites.bound_state_suite(), 300.0),
    Criterion(9, "breakdown ranks, entrywise defects, Fourier endpoint", lambda: suites.breakdown(), 900.0),
    Criterion(10, "example transforms", lambda: suites.example_transforms(), 600.0),
    Criterion(11, "scattering: wave operators, S-matrix, time reversal", lambda: suites.scattering_suite(), 600.0),
)


def evaluate(c: Criterion) -> tuple[bool, str]:
    """Run one criterion; return (passed, one-line verdict)."""
    t0 = time.perf_counter()
    report = c.run()
    elapsed = time.perf_counter() - t0
    in_budget = elapsed <= c.budget_s
    ok = report.passed and in_budget
    failed = [ch for ch in report.checks if not ch.passed]
    worst = max((ch for ch in report.checks if ch.kind == "max" and ch.tolerance > 0), key=lambda ch: ch.measured / ch.tolerance,
                default=None)
    parts = [f"{'PASS' if ok else 'FAIL'} criterion {c.number:2d}: {c.title}",
             f"{len(report.checks) - len(failed)}/{len(report.checks)} checks",
             f"{elapsed:.1f}s (budget {c.budget_s:.0f}s)"]
    if worst is not None:
        parts.append(f"worst {worst.name}={worst.measured:.2e} (tol {worst.tolerance:.0e})")
    if failed:
        parts.append("failed: " + ", ".join(ch.name for ch in failed))
    if not in_budget:
        parts.append("over time budget")
    return ok, "  ".join(parts)


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"criterion_{c.number:02d}")
def test_acceptance(criterion: Criterion):
    ok, line = evaluate(criterion)
    RESULT_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = []
    for c in CRITERIA:
        ok, line = evaluate(c)
        print(line, flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
