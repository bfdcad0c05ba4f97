"""Verification-condition generation.

Each method is passified into acyclic paths; every assert on a path
becomes its own partition (earlier asserts downgrade to assumes), and
top-level conjunctions of user-level asserts split into one partition
per conjunct.  Well-formedness obligations for array accesses in
requires/ensures clauses are emitted as signature partitions ahead of
the body partitions.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

from .passify import (
    PStmt,
    PassifyResult,
    Role,
    SPLITTABLE_ROLES,
    passify_method,
    wf_obligations,
)
from .syntax import (
    Expr,
    Method,
    Program,
    Type,
    conjuncts_of,
    free_vars,
    implication_chain,
    normalize,
)

# Public partition-kind vocabulary.
KIND_POSTCONDITION = "postcondition"
KIND_INTERMEDIATE = "intermediate_assert"
KIND_WF = "wf_check"
KIND_INV_ENTRY = "invariant_entry"
KIND_INV_MAINTAIN = "invariant_maintain"
KIND_SIGNATURE_WF = "signature_wf"

_ROLE_KINDS = {
    Role.POSTCONDITION: KIND_POSTCONDITION,
    Role.ASSERT_USER: KIND_INTERMEDIATE,
    Role.CALL_REQUIRES: KIND_INTERMEDIATE,
    Role.WF_CHECK: KIND_WF,
    Role.INV_ENTRY: KIND_INV_ENTRY,
    Role.INV_MAINTAIN: KIND_INV_MAINTAIN,
    Role.SIGNATURE_WF: KIND_SIGNATURE_WF,
}

WF_KINDS = {KIND_WF, KIND_SIGNATURE_WF}


@dataclass
class VcPartition:
    """One (path, assertion) proof obligation with its closed formula."""

    pid: str
    seq: int
    method: str
    kind: str
    path: List[PStmt]
    target: PStmt
    vc: Expr
    var_types: Dict[str, Type] = field(default_factory=dict)

    def describe(self) -> str:
        where = ""
        if self.target.span is not None:
            where = " at line %d" % self.target.span.line
        return "%s[%s] %s%s" % (self.method, self.kind, self.pid, where)


@dataclass
class FailingTrace:
    """The statement sequence of a nonconforming partition, ending at
    the assertion that could not be proven."""

    partition: VcPartition
    verdict: Optional[object] = None

    @property
    def steps(self) -> List[PStmt]:
        return list(self.partition.path) + [self.partition.target]

    @property
    def length(self) -> int:
        return len(self.steps)


def _pid_of(kind: str, path: List[PStmt], target: PStmt, vc: Expr) -> str:
    parts = [kind]
    for s in path:
        parts.append("%s:%s" % (s.role.value, normalize(s.formula)))
    parts.append("@%s:%s" % (target.role.value, normalize(target.formula)))
    parts.append(normalize(vc))
    return hashlib.sha256("\n".join(parts).encode()).hexdigest()[:16]


def _restrict_types(vc: Expr, var_types: Dict[str, Type]) -> Dict[str, Type]:
    used = free_vars(vc)
    return {n: t for n, t in var_types.items() if n in used}


class _Gen:
    def __init__(self, program: Program):
        self.program = program
        self.partitions: List[VcPartition] = []
        self.seen: set = set()

    def add(self, method: str, kind: str, path: List[PStmt], target: PStmt,
            var_types: Dict[str, Type]) -> None:
        vc = implication_chain([s.formula for s in path], target.formula)
        pid = _pid_of(kind, path, target, vc)
        if pid in self.seen:
            return
        self.seen.add(pid)
        self.partitions.append(
            VcPartition(pid, len(self.partitions), method, kind, list(path),
                        target, vc, _restrict_types(vc, var_types))
        )

    def signature_wf(self, m: Method) -> None:
        base_types = m.symbol_types()
        for i, c in enumerate(m.requires):
            antecedent = [
                PStmt(False, prev.expr, Role.REQUIRES, prev, prev.expr,
                      prev.span, prev.sid, None, "requires")
                for prev in m.requires[:i]
            ]
            for _site, oblig in wf_obligations(c.expr):
                target = PStmt(True, oblig, Role.SIGNATURE_WF, c, oblig,
                               c.span, c.sid, None, "index in range in requires")
                self.add(m.name, KIND_SIGNATURE_WF, antecedent, target, base_types)
        requires_path = [
            PStmt(False, c.expr, Role.REQUIRES, c, c.expr, c.span, c.sid,
                  None, "requires")
            for c in m.requires
        ]
        for c in m.ensures:
            for _site, oblig in wf_obligations(c.expr):
                target = PStmt(True, oblig, Role.SIGNATURE_WF, c, oblig,
                               c.span, c.sid, None, "index in range in ensures")
                self.add(m.name, KIND_SIGNATURE_WF, requires_path, target, base_types)

    def body(self, m: Method, passified: PassifyResult) -> None:
        for path in passified.paths:
            prefix: List[PStmt] = []
            for s in path:
                if not s.is_assert:
                    prefix.append(s)
                    continue
                kind = _ROLE_KINDS[s.role]
                if s.role in SPLITTABLE_ROLES:
                    ssa_parts = conjuncts_of(s.formula)
                    src_parts = (conjuncts_of(s.source_formula)
                                 if s.source_formula is not None
                                 else [None] * len(ssa_parts))
                    if len(src_parts) != len(ssa_parts):
                        src_parts = [s.source_formula] * len(ssa_parts)
                    for ssa_c, src_c in zip(ssa_parts, src_parts):
                        target = replace(s, formula=ssa_c, source_formula=src_c)
                        self.add(m.name, kind, prefix, target, passified.var_types)
                else:
                    self.add(m.name, kind, prefix, s, passified.var_types)
                prefix.append(replace(s, is_assert=False))

    def method(self, m: Method) -> None:
        self.signature_wf(m)
        if m.body is not None:
            self.body(m, passify_method(self.program, m))


def generate_partitions(program: Program,
                        method: Optional[str] = None) -> List[VcPartition]:
    """All proof obligations of `program`, signature well-formedness
    first, in a deterministic order with content-identical duplicates
    collapsed."""
    gen = _Gen(program)
    for m in program.methods:
        if method is not None and m.name != method:
            continue
        gen.method(m)
    return gen.partitions


def trace_of(partition: VcPartition) -> FailingTrace:
    return FailingTrace(partition)


__all__ = [
    "VcPartition", "FailingTrace", "generate_partitions", "trace_of",
    "KIND_POSTCONDITION", "KIND_INTERMEDIATE", "KIND_WF", "KIND_INV_ENTRY",
    "KIND_INV_MAINTAIN", "KIND_SIGNATURE_WF", "WF_KINDS",
]
