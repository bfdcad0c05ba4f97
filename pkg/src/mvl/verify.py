"""Whole-program conformance checking and the verifier error panel."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .solver import BoundedChecker, ValidityStatus, Verdict
from .syntax import Program
from .vcgen import (
    FailingTrace,
    KIND_INTERMEDIATE,
    KIND_INV_ENTRY,
    KIND_INV_MAINTAIN,
    KIND_POSTCONDITION,
    VcPartition,
    WF_KINDS,
    generate_partitions,
)

REL_PROG_SPEC = "prog_spec"
REL_PROG_TEST = "prog_test"
REL_SPEC_TEST = "spec_test"


@dataclass
class PartitionOutcome:
    partition: VcPartition
    verdict: Verdict


@dataclass
class ConformanceVerdict:
    relation: str
    holds: bool
    failing_traces: List[FailingTrace] = field(default_factory=list)
    outcomes: List[PartitionOutcome] = field(default_factory=list)


def _trace_key(o: PartitionOutcome) -> Tuple[int, int]:
    return (len(o.partition.path) + 1, o.partition.seq)


def verify_program(program: Program, checker: Optional[BoundedChecker] = None,
                   method: Optional[str] = None,
                   relation: str = REL_PROG_SPEC) -> ConformanceVerdict:
    """Check every proof obligation; failing traces come back shortest
    first (earliest failure), invalid verdicts ahead of unknowns."""
    if checker is None:
        checker = BoundedChecker()
    outcomes = [
        PartitionOutcome(q, checker.check(q.vc, q.var_types))
        for q in generate_partitions(program, method)
    ]
    invalid = sorted((o for o in outcomes if o.verdict.is_invalid), key=_trace_key)
    unknown = sorted((o for o in outcomes
                      if o.verdict.status == ValidityStatus.UNKNOWN), key=_trace_key)
    traces = [FailingTrace(o.partition, o.verdict) for o in invalid + unknown]
    return ConformanceVerdict(relation, not traces, traces, outcomes)


def panel_messages(program: Program, trace: FailingTrace,
                   k: int) -> List[str]:
    """Verifier-style diagnostics for one failing trace, numbered `k`."""
    q = trace.partition
    line = q.target.span.line if q.target.span is not None else 0
    if q.kind in WF_KINDS:
        return ["line %d: Error %d: index out of range." % (line, k)]
    if q.kind == KIND_POSTCONDITION:
        body_line = line
        try:
            m = program.method(q.method)
            if m.body_line is not None:
                body_line = m.body_line
        except KeyError:
            pass
        return [
            "line %d: Error %d: A postcondition might not hold on this path."
            % (body_line, k),
            "line %d: This is the postcondition that might not hold." % line,
        ]
    if q.kind == KIND_INV_ENTRY:
        return ["line %d: Error %d: This loop invariant might not hold on entry."
                % (line, k)]
    if q.kind == KIND_INV_MAINTAIN:
        return ["line %d: Error %d: This loop invariant might not be maintained "
                "by the loop." % (line, k)]
    if q.kind == KIND_INTERMEDIATE:
        return ["line %d: Error %d: This assertion might not hold." % (line, k)]
    return ["line %d: Error %d: This proof obligation might not hold." % (line, k)]


def render_error_panel(program: Program, cv: ConformanceVerdict) -> str:
    lines: List[str] = []
    for k, trace in enumerate(cv.failing_traces, start=1):
        lines.extend(panel_messages(program, trace, k))
    n = len(cv.failing_traces)
    lines.append("%d errors" % n)
    return "\n".join(lines) + "\n"


__all__ = [
    "REL_PROG_SPEC", "REL_PROG_TEST", "REL_SPEC_TEST",
    "PartitionOutcome", "ConformanceVerdict", "verify_program",
    "panel_messages", "render_error_panel",
]
