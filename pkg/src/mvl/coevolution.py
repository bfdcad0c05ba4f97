"""Co-evolution of programs, specifications, and tests.

The engine keeps a FIFO pool of candidate programs.  Each campaign pops
one candidate, extracts its hard/soft intent, asks a synthesizer for
patches against the earliest failing trace, and admits children that
discharge that trace while preserving every hard fact.  A fully
conforming candidate ends the search (first-solution mode) or joins the
solution set.  Assurance then aligns each solution's specification with
the static tests, translating patches made against a stub/harness pair
back onto the original method and recursing when the enriched
specification no longer holds of the program.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field, replace
from random import Random
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from .errors import (
    MvlError,
    PluginFailureError,
    ShapeError,
)
from .intent import IntentReport, extract_hs_intent, hard_violations
from .parser import parse_program
from .printer import program_text
from .solver import BoundedChecker
from .syntax import (
    ArrayLit,
    Assert,
    Binary,
    BinaryOp,
    BoolLit,
    CallStmt,
    ClauseKind,
    Expr,
    Index,
    IntLit,
    Length,
    Method,
    Param,
    Program,
    SpecClause,
    Stmt,
    Test,
    TrustOrigin,
    TrustTag,
    Type,
    Unary,
    UnaryOp,
    Var,
    VarDecl,
    conjoin,
    substitute,
)
from .synthesis import (
    AlignmentContext,
    Patch,
    SynthPlugin,
    apply_patch,
    build_request,
    synthesize,
    top_priority_class,
)
from .verify import ConformanceVerdict, REL_PROG_TEST, REL_SPEC_TEST, verify_program

TRUSTED_USER = TrustTag(True, TrustOrigin.USER)

STATUS_CONFORMING = "conforming"
STATUS_BUDGET_EXHAUSTED = "budget_exhausted"
STATUS_NO_PATCHES = "no_patches"


# ---------------------------------------------------------------------------
# Tests


def _literal_type(e: Expr) -> Type:
    if isinstance(e, ArrayLit):
        return Type.ARRAY_INT
    if isinstance(e, BoolLit):
        return Type.BOOL
    return Type.INT


def _is_literal(e: Expr) -> bool:
    if isinstance(e, (IntLit, BoolLit)):
        return True
    if isinstance(e, Unary) and e.op == UnaryOp.NEG:
        return isinstance(e.operand, IntLit)
    if isinstance(e, ArrayLit):
        return all(_is_literal(el) for el in e.elements)
    return False


def extract_test(m: Method) -> Test:
    """Read a test out of a method shaped as literal declarations, one
    result-declaring call, and trailing oracle asserts."""
    if m.params or m.returns or m.requires or m.ensures:
        raise ShapeError("test %s must have no signature spec" % m.name)
    inputs: List[Tuple[str, Expr]] = []
    call: Optional[CallStmt] = None
    oracle: List[Expr] = []
    for st in m.body or []:
        if isinstance(st, VarDecl) and call is None:
            if st.init is None or not _is_literal(st.init):
                raise ShapeError("test %s: input %s needs a literal initializer"
                                 % (m.name, st.name))
            inputs.append((st.name, st.init))
        elif isinstance(st, CallStmt) and call is None:
            call = st
        elif isinstance(st, Assert) and call is not None:
            oracle.append(st.expr)
        else:
            raise ShapeError("test %s: unexpected statement %r"
                             % (m.name, type(st).__name__))
    if call is None:
        raise ShapeError("test %s: no method call" % m.name)
    return Test(name=m.name, inputs=inputs, call_method=call.method,
                call_args=tuple(call.args), results=tuple(call.targets),
                oracle=oracle, source_name=m.name)


def load_test(path: str) -> Test:
    with open(path) as fh:
        prog = parse_program(fh.read())
    if len(prog.methods) != 1:
        raise ShapeError("test file %s must contain exactly one method" % path)
    t = extract_test(prog.methods[0])
    t.source_name = path
    return t


def _input_equalities(name: str, lit: Expr) -> List[Expr]:
    if isinstance(lit, ArrayLit):
        eqs: List[Expr] = [Binary(BinaryOp.EQ, Length(name),
                                  IntLit(len(lit.elements)))]
        for i, el in enumerate(lit.elements):
            eqs.append(Binary(BinaryOp.EQ, Index(name, IntLit(i)), el))
        return eqs
    return [Binary(BinaryOp.EQ, Var(name), lit)]


def _maps_for(test: Test, m: Method) -> Tuple[Dict[str, str], Dict[str, str]]:
    if len(test.call_args) != len(m.params):
        raise ShapeError("test %s passes %d args to %s which takes %d"
                         % (test.name, len(test.call_args), m.name, len(m.params)))
    if len(test.results) != len(m.returns):
        raise ShapeError("test %s binds %d results from %s which returns %d"
                         % (test.name, len(test.results), m.name, len(m.returns)))
    param_map: Dict[str, str] = {}
    for arg, p in zip(test.call_args, m.params):
        if isinstance(arg, Var):
            param_map[arg.name] = p.name
    result_map = {r: ret.name for r, ret in zip(test.results, m.returns)}
    return param_map, result_map


def test_to_spec(test: Test, m: Method) -> Tuple[List[SpecClause], List[SpecClause]]:
    """Translate a test into a signature spec for `m`: input equalities
    as requires, the oracle (renamed positionally) as ensures."""
    param_map, result_map = _maps_for(test, m)
    mapping: Dict[str, Expr] = {n: Var(t) for n, t in param_map.items()}
    mapping.update({n: Var(t) for n, t in result_map.items()})
    requires: List[SpecClause] = []
    for arg, p in zip(test.call_args, m.params):
        if isinstance(arg, Var):
            lit = dict(test.inputs).get(arg.name)
            if lit is None:
                continue
            eqs = _input_equalities(p.name, lit)
        else:
            eqs = _input_equalities(p.name, arg)
        requires.append(SpecClause(ClauseKind.REQUIRES, conjoin(eqs), TRUSTED_USER))
    ensures = [SpecClause(ClauseKind.ENSURES, substitute(o, mapping), TRUSTED_USER)
               for o in test.oracle]
    return requires, ensures


def with_spec(program: Program, method_name: str,
              requires: Sequence[SpecClause],
              ensures: Sequence[SpecClause]) -> Program:
    """A copy of the program whose named method carries the given
    signature spec (body and annotations untouched)."""
    methods = []
    for m in program.methods:
        if m.name == method_name:
            m = replace(m, requires=list(requires), ensures=list(ensures))
        methods.append(m)
    return Program(methods, program.source_name)


def _reparse(program: Program) -> Tuple[Program, str]:
    text = program_text(program)
    return parse_program(text), text


def conforms_prog_test(program: Program, method_name: str, test: Test,
                       checker: BoundedChecker) -> ConformanceVerdict:
    """Does the method body satisfy the test directly: assuming the
    test's inputs, is the oracle provable as a postcondition?"""
    m = program.method(method_name)
    requires, ensures = test_to_spec(test, m)
    prog2, _text = _reparse(with_spec(program, method_name, requires, ensures))
    return verify_program(prog2, checker, method=method_name,
                          relation=REL_PROG_TEST)


def spec_to_program(m: Method) -> Method:
    """An opaque stub with m's signature and spec; callers verify
    against it modularly."""
    return replace(m, body=None, body_line=None)


def harness_of(test: Test, callee: Method) -> Method:
    """The test reshaped as a method: inputs become parameters pinned by
    trusted requires, the oracle becomes trusted ensures, the body is
    the single call."""
    _pm, _rm = _maps_for(test, callee)
    params = [Param(name, _literal_type(lit)) for name, lit in test.inputs]
    returns = [Param(r, ret.type) for r, ret in zip(test.results, callee.returns)]
    requires = [SpecClause(ClauseKind.REQUIRES, conjoin(_input_equalities(n, lit)),
                           TRUSTED_USER)
                for n, lit in test.inputs]
    ensures = [SpecClause(ClauseKind.ENSURES, o, TRUSTED_USER) for o in test.oracle]
    body: List[Stmt] = [CallStmt(targets=tuple(test.results), method=callee.name,
                                 args=tuple(test.call_args), declares=False)]
    return Method(name=test.name, params=params, returns=returns,
                  requires=requires, ensures=ensures, body=body)


def make_pair(m: Method, test: Test) -> Tuple[Program, str]:
    """Stub + harness program used to co-evolve a spec against a test."""
    pair = Program([spec_to_program(m), harness_of(test, m)])
    return _reparse(pair)


def conforms_spec_test(m: Method, test: Test,
                       checker: BoundedChecker) -> Tuple[ConformanceVerdict, Program, str]:
    prog, text = make_pair(m, test)
    verdict = verify_program(prog, checker, relation=REL_SPEC_TEST)
    return verdict, prog, text


# ---------------------------------------------------------------------------
# Engine


@dataclass
class Budget:
    """Search limits; every field must be non-negative."""

    wall_clock_s: float = 1200.0
    max_campaigns: int = 5
    k: int = 5
    max_candidates: int = 32

    def __post_init__(self) -> None:
        for name in ("wall_clock_s", "max_campaigns", "k", "max_candidates"):
            if getattr(self, name) < 0:
                raise ShapeError("budget field %s must be non-negative" % name)


@dataclass
class Candidate:
    source: str
    program: Program
    patches: List[Patch] = field(default_factory=list)
    campaign_born: int = 0
    verdict: Optional[ConformanceVerdict] = None
    label: str = ""


@dataclass
class CoEvolveOutcome:
    v_p: List[Candidate]
    status: str
    campaigns_used: int


@dataclass
class Triple:
    candidate: Candidate
    tests: List[Test]


@dataclass
class AssuranceOutcome:
    triples: List[Triple]
    status: str
    campaigns_used: int


PluginFactory = Callable[[Optional[AlignmentContext]], SynthPlugin]


class CoEvolutionEngine:
    """Runs repair campaigns under a shared budget.  The campaign
    counter spans direct repair, alignment, and assurance recursion."""

    def __init__(self, checker: BoundedChecker, plugin_factory: PluginFactory,
                 budget: Optional[Budget] = None, rng: Optional[Random] = None,
                 filename: str = "input.mvl", first_solution: bool = True,
                 explain: bool = False):
        self.checker = checker
        self.plugin_factory = plugin_factory
        self.budget = budget if budget is not None else Budget()
        self.rng = rng if rng is not None else Random(0)
        self.filename = filename
        self.first_solution = first_solution
        self.explain = explain
        self.campaigns_used = 0
        self.started = time.monotonic()
        self.events: List[Dict[str, object]] = []
        self._label_counter = 0

    # -- bookkeeping -----------------------------------------------------

    def _log(self, event: str, **detail: object) -> None:
        entry: Dict[str, object] = {"campaign": self.campaigns_used,
                                    "event": event}
        entry.update(detail)
        self.events.append(entry)

    def _budget_open(self) -> bool:
        if self.campaigns_used >= self.budget.max_campaigns:
            return False
        if time.monotonic() - self.started > self.budget.wall_clock_s:
            return False
        return True

    def _next_label(self) -> str:
        self._label_counter += 1
        return "candidate-%03d" % self._label_counter

    # -- core loop -------------------------------------------------------

    def co_evolve(self, program: Program, source: str,
                  alignment: Optional[AlignmentContext] = None) -> CoEvolveOutcome:
        root = Candidate(source, program, label=self._next_label())
        root.verdict = verify_program(program, self.checker)
        if root.verdict.holds:
            self._log("root_conforming", candidate=root.label)
            return CoEvolveOutcome([root], STATUS_CONFORMING, self.campaigns_used)

        pool = deque([root])
        seen: Set[str] = {source}
        v_p: List[Candidate] = []
        saw_budget_stop = False

        while pool:
            if not self._budget_open():
                saw_budget_stop = True
                break
            cand = pool.popleft()
            verdict = cand.verdict
            if verdict is None:
                verdict = verify_program(cand.program, self.checker)
                cand.verdict = verdict
            if verdict.holds:
                v_p.append(cand)
                if self.first_solution:
                    break
                continue

            self.campaigns_used += 1
            trace = verdict.failing_traces[0]
            self._log("campaign_start", candidate=cand.label,
                      trace_kind=trace.partition.kind,
                      trace_seq=trace.partition.seq,
                      trace_pid=trace.partition.pid)
            report = extract_hs_intent(cand.program, checker=self.checker,
                                       outcomes=verdict.outcomes)
            if self.explain:
                from .intent import render_intent_report
                self._log("intent_report", text=render_intent_report(report))
            req = build_request(cand.program, cand.source, report, trace,
                                self.budget.k, self.checker, self.rng,
                                filename=self.filename)
            self._log("priority_class",
                      facts=[f.render() for f in
                             top_priority_class(req.priority_facts)])
            plugin = self.plugin_factory(alignment)
            try:
                patches, _reply, dropped = synthesize(req, plugin)
            except PluginFailureError as e:
                self._log("plugin_failure", error=str(e))
                continue
            for reason in dropped:
                self._log("hunk_dropped", reason=reason)
            self._log("patches_proposed", count=len(patches))

            stop = False
            for patch in patches:
                patch.campaign = self.campaigns_used
                admitted, child = self._admit(cand, patch, trace, report, seen)
                if not admitted or child is None:
                    continue
                if child.verdict is not None and child.verdict.holds:
                    v_p.append(child)
                    self._log("solution", candidate=child.label,
                              patch=patch.patch_id)
                    if self.first_solution:
                        stop = True
                        break
                else:
                    pool.append(child)
            if stop:
                break

        if v_p:
            status = STATUS_CONFORMING
        elif saw_budget_stop or not self._budget_open():
            status = STATUS_BUDGET_EXHAUSTED
        else:
            status = STATUS_NO_PATCHES
        return CoEvolveOutcome(v_p, status, self.campaigns_used)

    def _admit(self, parent: Candidate, patch: Patch, trace, report: IntentReport,
               seen: Set[str]) -> Tuple[bool, Optional[Candidate]]:
        try:
            new_source = apply_patch(parent.source, patch)
        except MvlError as e:
            self._log("patch_rejected", patch=patch.patch_id,
                      reason=type(e).__name__)
            return False, None
        try:
            canon_prog, canon = _reparse(parse_program(new_source))
        except MvlError as e:
            self._log("patch_rejected", patch=patch.patch_id,
                      reason="canonicalize: %s" % type(e).__name__)
            return False, None
        if canon in seen:
            self._log("patch_rejected", patch=patch.patch_id, reason="duplicate")
            return False, None
        verdict = verify_program(canon_prog, self.checker)
        if any(t.partition.pid == trace.partition.pid
               for t in verdict.failing_traces):
            self._log("patch_rejected", patch=patch.patch_id,
                      reason="failing trace persists")
            return False, None
        violations = hard_violations(report, canon_prog, self.checker)
        if violations:
            self._log("patch_rejected", patch=patch.patch_id,
                      reason="hard intent violated", facts=list(violations))
            return False, None
        if not verdict.holds and len(seen) - 1 >= self.budget.max_candidates:
            self._log("patch_rejected", patch=patch.patch_id, reason="pool full")
            return False, None
        seen.add(canon)
        child = Candidate(canon, canon_prog,
                          parent.patches + [patch],
                          campaign_born=self.campaigns_used,
                          verdict=verdict, label=self._next_label())
        self._log("patch_admitted", patch=patch.patch_id,
                  candidate=child.label, conforming=verdict.holds)
        return True, child

    # -- assurance -------------------------------------------------------

    def align(self, cand: Candidate, test: Test,
              method_name: str) -> Optional[Candidate]:
        """Make the candidate's spec subsume the test, patching the spec
        via a stub/harness pair and recursing if the enriched spec no
        longer holds of the program.  Returns the (possibly evolved)
        candidate, or None when the budget runs out first."""
        m = cand.program.method(method_name)
        verdict, pair_prog, pair_text = conforms_spec_test(m, test, self.checker)
        current = cand
        if not verdict.holds:
            param_map, result_map = _maps_for(test, m)
            ctx = AlignmentContext(test=test, stub_method=m.name,
                                   param_map=param_map, result_map=result_map)
            out = self.co_evolve(pair_prog, pair_text, alignment=ctx)
            if not out.v_p:
                self._log("align_failed", test=test.name, status=out.status)
                return None
            pair_best = out.v_p[0]
            stub2 = pair_best.program.method(m.name)
            back = with_spec(cand.program, method_name,
                             stub2.requires, stub2.ensures)
            back_prog, back_text = _reparse(back)
            back_verdict = verify_program(back_prog, self.checker)
            current = Candidate(back_text, back_prog,
                                cand.patches + pair_best.patches,
                                campaign_born=self.campaigns_used,
                                verdict=back_verdict, label=self._next_label())
            self._log("spec_translated", test=test.name, candidate=current.label,
                      conforming=back_verdict.holds)
            if not back_verdict.holds:
                rec = self.co_evolve(back_prog, back_text)
                if not rec.v_p:
                    self._log("align_failed", test=test.name, status=rec.status)
                    return None
                evolved = rec.v_p[0]
                return self.align(evolved, test, method_name)
        pv = conforms_prog_test(current.program, method_name, test, self.checker)
        if not pv.holds:
            self._log("program_test_gap", test=test.name,
                      candidate=current.label)
            return None
        self._log("aligned", test=test.name, candidate=current.label)
        return current

    def automated_assurance(self, v_p: Sequence[Candidate], tests: Sequence[Test],
                            method_name: str) -> AssuranceOutcome:
        if not tests:
            triples = [Triple(c, []) for c in v_p]
            return AssuranceOutcome(triples, STATUS_CONFORMING if triples
                                    else STATUS_NO_PATCHES, self.campaigns_used)
        triples: List[Triple] = []
        for cand in v_p:
            current: Optional[Candidate] = cand
            for test in tests:
                current = self.align(current, test, method_name)
                if current is None:
                    break
            if current is not None:
                triples.append(Triple(current, list(tests)))
                if self.first_solution:
                    break
        if triples:
            status = STATUS_CONFORMING
        elif not self._budget_open():
            status = STATUS_BUDGET_EXHAUSTED
        else:
            status = STATUS_NO_PATCHES
        return AssuranceOutcome(triples, status, self.campaigns_used)


__all__ = [
    "TRUSTED_USER", "STATUS_CONFORMING", "STATUS_BUDGET_EXHAUSTED",
    "STATUS_NO_PATCHES",
    "extract_test", "load_test", "test_to_spec", "with_spec",
    "conforms_prog_test", "spec_to_program", "harness_of", "make_pair",
    "conforms_spec_test",
    "Budget", "Candidate", "CoEvolveOutcome", "Triple", "AssuranceOutcome",
    "CoEvolutionEngine",
]
