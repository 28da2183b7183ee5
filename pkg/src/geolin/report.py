"""Condition reports: ordered residual records with an overall verdict.

Every checker in this package produces the same shape of answer: a list
of labelled residual expressions, each classified by the zero test, plus
an overall verdict.  PASS requires every residual to be canonically
zero.  A single NONZERO residual makes the whole report FAIL.  Anything
short of that (an UNDECIDED residual and no NONZERO one) leaves the
report UNDECIDED; an inconclusive zero test never upgrades to PASS.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

from .kernel import (
    DEFAULT_CONFIG,
    Expr,
    Verdict,
    ZeroTestConfig,
    ZeroTestResult,
    is_zero,
)

PASS = "PASS"
FAIL = "FAIL"
UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class ConditionRecord:
    """One labelled residual together with its zero-test outcome."""

    condition_id: str
    residual: Expr
    result: ZeroTestResult

    @property
    def verdict(self) -> Verdict:
        return self.result.verdict


@dataclass(frozen=True)
class ConditionReport:
    """Ordered condition records for one system kind.

    facts carries side information that does not influence the verdict,
    e.g. a metric determinant and whether it degenerates.
    """

    kind: str
    records: Tuple[ConditionRecord, ...]
    facts: Tuple[Tuple[str, str], ...] = field(default=())

    @property
    def overall(self) -> str:
        verdicts = [r.verdict for r in self.records]
        if any(v is Verdict.NONZERO for v in verdicts):
            return FAIL
        if all(v is Verdict.ZERO for v in verdicts):
            return PASS
        return UNDECIDED

    def record(self, condition_id: str) -> ConditionRecord:
        for r in self.records:
            if r.condition_id == condition_id:
                return r
        raise KeyError(condition_id)

    def fact(self, key: str) -> Optional[str]:
        for k, v in self.facts:
            if k == key:
                return v
        return None


def evaluate_conditions(
    kind: str,
    labelled: list,
    config: ZeroTestConfig = DEFAULT_CONFIG,
    facts: Tuple[Tuple[str, str], ...] = (),
) -> ConditionReport:
    """Run the zero test over (condition_id, residual) pairs in order."""
    records = tuple(
        ConditionRecord(cid, residual, is_zero(residual, config))
        for cid, residual in labelled
    )
    return ConditionReport(kind=kind, records=records, facts=facts)


def combine_zero_results(results: list, labels: list) -> ZeroTestResult:
    """Conjunction of zero tests: ZERO only if every part is ZERO.

    The first NONZERO part decides the verdict and keeps its witness,
    with the part label folded into the detail.
    """
    if len(results) != len(labels):
        raise ValueError("results and labels must pair up")
    for res, label in zip(results, labels):
        if res.verdict is Verdict.NONZERO:
            return ZeroTestResult(
                Verdict.NONZERO,
                witness=res.witness,
                witness_value=res.witness_value,
                detail=f"{label}: {res.detail}",
            )
    for res, label in zip(results, labels):
        if res.verdict is Verdict.UNDECIDED:
            return ZeroTestResult(Verdict.UNDECIDED, detail=f"{label}: {res.detail}")
    return ZeroTestResult(Verdict.ZERO, detail="all parts canonically zero")
