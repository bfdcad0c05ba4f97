"""Hard/soft intent extraction from verification outcomes.

Facts from conforming partitions are agreed intent and go to the hard
set (one closed-formula fact per partition).  Facts implicated in a
nonconforming partition are soft — the legal repair surface — except
trusted-annotated facts and well-formedness obligations, which stay
hard; the latter are guarded by a statement-presence marker so that a
patch deleting the offending clause discharges them vacuously.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

from .passify import Role, passify_method, wf_obligations
from .printer import expr_text
from .solver import BoundedChecker
from .syntax import (
    Assert,
    Assign,
    Assume,
    Expr,
    For,
    If,
    Program,
    SpecClause,
    Span,
    Stmt,
    Type,
    VarDecl,
    While,
    conjuncts_of,
    free_vars,
    node_fingerprint,
    normalize,
    program_fingerprints,
    walk_stmts,
)
from .vcgen import VcPartition, WF_KINDS
from .verify import PartitionOutcome, verify_program


class FactOrigin(Enum):
    PROGRAM_STMT = "program_stmt"
    SPEC_CLAUSE = "spec_clause"
    WF_CHECK = "wf_check"
    TRUSTED = "trusted"


HARD = "hard"
SOFT = "soft"

FactId = Tuple[Optional[int], str]


@dataclass
class IntentFact:
    """One verification-condition fact with its source anchor."""

    fact_id: FactId
    formula: Expr
    origin_kind: FactOrigin
    origin_sid: Optional[int]
    classification: str
    node: object = None
    span: Optional[Span] = None
    var_types: Dict[str, Type] = field(default_factory=dict)
    presence_fp: Optional[str] = None
    clause_sid: Optional[int] = None
    is_vc_fact: bool = False
    priority: Optional[Tuple[int, int, int]] = None

    def render(self) -> str:
        text = expr_text(self.formula)
        if self.origin_kind == FactOrigin.WF_CHECK and self.presence_fp:
            text = "presence(sid=%s) ==> %s" % (self.origin_sid, text)
        return text


@dataclass
class IntentReport:
    hard: List[IntentFact]
    soft: List[IntentFact]
    partitions: Dict[str, bool]
    unknown_partitions: Set[str] = field(default_factory=set)
    method: Optional[str] = None


def transform_wf(fact: IntentFact) -> IntentFact:
    """Guard a well-formedness fact with a presence marker for the node
    that contains the array access: once that node is gone, the
    obligation is vacuously satisfied."""
    fact.origin_kind = FactOrigin.WF_CHECK
    fact.classification = HARD
    if fact.node is not None:
        fact.presence_fp = node_fingerprint(fact.node)
    return fact


def source_var_types(program: Program, method_name: str) -> Dict[str, Type]:
    """Types of all source-level symbols of a method (params, returns,
    locals — including inferred initialization types)."""
    m = program.method(method_name)
    out = dict(m.symbol_types())
    if m.body is not None:
        vt = passify_method(program, m).var_types
        for name, ty in vt.items():
            if "$" not in name:
                out.setdefault(name, ty)
    return out


def _restrict(formula: Expr, var_types: Dict[str, Type]) -> Dict[str, Type]:
    fv = free_vars(formula)
    return {n: t for n, t in var_types.items() if n in fv}


_CLAUSE_ROLES = {
    Role.REQUIRES, Role.INV_ENTRY, Role.INV_ASSUME, Role.INV_MAINTAIN,
    Role.POSTCONDITION,
}
_STMT_ROLES = {
    Role.ASSIGN, Role.BRANCH_THEN, Role.BRANCH_ELSE, Role.LOOP_GUARD,
    Role.LOOP_EXIT, Role.ASSUME_USER, Role.ASSERT_USER,
    Role.CALL_REQUIRES, Role.CALL_ENSURES,
}


class _Collector:
    def __init__(self, program: Program):
        self.program = program
        self.facts: Dict[FactId, IntentFact] = {}
        self.types_cache: Dict[str, Dict[str, Type]] = {}

    def method_types(self, name: str) -> Dict[str, Type]:
        got = self.types_cache.get(name)
        if got is None:
            got = source_var_types(self.program, name)
            self.types_cache[name] = got
        return got

    def add(self, fact: IntentFact) -> None:
        old = self.facts.get(fact.fact_id)
        if old is None:
            self.facts[fact.fact_id] = fact
            return
        if fact.classification == HARD and old.classification == SOFT:
            self.facts[fact.fact_id] = fact

    def vc_fact(self, q: VcPartition) -> None:
        t = q.target
        kind = (FactOrigin.SPEC_CLAUSE if isinstance(t.origin, SpecClause)
                else FactOrigin.PROGRAM_STMT)
        self.add(IntentFact(
            fact_id=(t.origin_sid, normalize(q.vc)),
            formula=q.vc,
            origin_kind=kind,
            origin_sid=t.origin_sid,
            classification=HARD,
            node=t.origin,
            span=t.span,
            var_types=dict(q.var_types),
            is_vc_fact=True,
        ))

    def constituent_facts(self, q: VcPartition) -> None:
        """Per-fact classification of a nonconforming partition: the
        target plus every path assume, trusted and wf facts hard, the
        rest soft."""
        vt = self.method_types(q.method)
        for s in list(q.path) + [q.target]:
            if s.source_formula is None:
                continue
            trusted = bool(getattr(getattr(s.origin, "trust", None), "trusted", False))
            is_wf = s.role in (Role.WF_CHECK, Role.SIGNATURE_WF)
            parts = ([s.source_formula] if is_wf
                     else conjuncts_of(s.source_formula))
            for conj in parts:
                fact = IntentFact(
                    fact_id=(s.origin_sid, normalize(conj)),
                    formula=conj,
                    origin_kind=(FactOrigin.SPEC_CLAUSE
                                 if isinstance(s.origin, SpecClause)
                                 else FactOrigin.PROGRAM_STMT),
                    origin_sid=s.origin_sid,
                    classification=SOFT,
                    node=s.origin,
                    span=s.span,
                    var_types=_restrict(conj, vt),
                    clause_sid=s.origin_sid,
                )
                if trusted:
                    fact.classification = HARD
                    fact.origin_kind = FactOrigin.TRUSTED
                    if s.origin is not None:
                        fact.presence_fp = node_fingerprint(s.origin)
                elif is_wf:
                    transform_wf(fact)
                self.add(fact)


def extract_hs_intent(program: Program, method: Optional[str] = None,
                      checker: Optional[BoundedChecker] = None,
                      outcomes: Optional[List[PartitionOutcome]] = None
                      ) -> IntentReport:
    """Classify every verification fact of `program` as hard or soft."""
    if outcomes is None:
        cv = verify_program(program, checker=checker, method=method)
        outcomes = cv.outcomes
    col = _Collector(program)
    partitions: Dict[str, bool] = {}
    unknown: Set[str] = set()
    for o in outcomes:
        conforming = o.verdict.is_valid
        partitions[o.partition.pid] = conforming
        if not conforming and not o.verdict.is_invalid:
            unknown.add(o.partition.pid)
        if conforming:
            col.vc_fact(o.partition)
        else:
            col.constituent_facts(o.partition)
    ordered = sorted(
        col.facts.values(),
        key=lambda f: (f.origin_sid if f.origin_sid is not None else 1 << 30,
                       f.fact_id[1]),
    )
    hard = [f for f in ordered if f.classification == HARD]
    soft = [f for f in ordered if f.classification == SOFT]
    return IntentReport(hard, soft, partitions, unknown, method)


def render_intent_report(report: IntentReport) -> str:
    lines: List[str] = []
    n_conf = sum(1 for v in report.partitions.values() if v)
    lines.append("partitions: %d conforming, %d nonconforming (%d unknown)"
                 % (n_conf, len(report.partitions) - n_conf,
                    len(report.unknown_partitions)))
    for title, facts in (("hard intent", report.hard), ("soft intent", report.soft)):
        lines.append("%s (%d):" % (title, len(facts)))
        for f in facts:
            prio = ""
            if f.priority is not None:
                prio = " priority=(h=%d, s=%d, strength=%d)" % f.priority
            lines.append("  [%s sid=%s]%s %s"
                         % (f.origin_kind.value, f.origin_sid, prio, f.render()))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Hard-intent preservation


def _nodes_by_fingerprint(program: Program) -> Dict[str, object]:
    out: Dict[str, object] = {}
    for m in program.methods:
        for c in m.spec_clauses():
            out[node_fingerprint(c)] = c
        if m.body is None:
            continue
        for st in walk_stmts(m.body):
            out[node_fingerprint(st)] = st
            if isinstance(st, (While, For)):
                for c in st.invariants:
                    out[node_fingerprint(c)] = c
    return out


def _node_expr(node: object) -> Optional[Expr]:
    if isinstance(node, SpecClause):
        return node.expr
    if isinstance(node, (Assert, Assume, Assign)):
        return node.expr
    if isinstance(node, VarDecl):
        return node.init
    if isinstance(node, (If, While)):
        return node.cond
    return None


def hard_violations(report: IntentReport, patched: Program,
                    checker: Optional[BoundedChecker] = None) -> List[str]:
    """Check that a patched program still honors every hard fact.

    Closed verification facts must stay valid; trusted facts must
    survive verbatim; well-formedness facts are presence-guarded — an
    absent node discharges them, a surviving node must still carry the
    same obligation.
    """
    if checker is None:
        checker = BoundedChecker()
    nodes = _nodes_by_fingerprint(patched)
    out: List[str] = []
    for f in report.hard:
        if f.is_vc_fact:
            v = checker.check(f.formula, f.var_types)
            if not v.is_valid:
                out.append("verified fact no longer valid: %s" % f.render())
        elif f.origin_kind == FactOrigin.TRUSTED:
            if f.presence_fp is not None and f.presence_fp not in nodes:
                out.append("trusted fact removed: %s" % f.render())
        elif f.origin_kind == FactOrigin.WF_CHECK:
            if f.presence_fp is None or f.presence_fp not in nodes:
                continue  # node gone: obligation vacuous
            expr = _node_expr(nodes[f.presence_fp])
            if expr is None:
                continue
            obligations = {normalize(o) for _s, o in wf_obligations(expr)}
            if normalize(f.formula) not in obligations:
                out.append("well-formedness obligation lost: %s" % f.render())
    return out


__all__ = [
    "FactOrigin", "HARD", "SOFT", "IntentFact", "IntentReport",
    "extract_hs_intent", "transform_wf", "render_intent_report",
    "source_var_types", "hard_violations",
]
