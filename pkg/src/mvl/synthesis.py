"""Patch synthesis: soft-fact prioritization, repair-request
construction, pluggable synthesizers, and patch hunk handling.

A synthesizer (builtin enumerative, or an external subprocess) receives
a structured-text request and answers in the patch wire format:

    # modification 1
    <file>
    name.mvl
    </file>
    <original>
    ...exact lines from the file...
    </original>
    <patched>
    ...replacement lines, each ending in `// pr {:trusted}`...
    </patched>

Several hunks may share a modification number; they form one candidate
patch.  Hunks touching frozen lines (trusted attributes or previous
patch markers) are dropped unless they reproduce those lines verbatim.
"""

from __future__ import annotations

import hashlib
import re
import shlex
import subprocess
from dataclasses import dataclass, field
from random import Random
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from .errors import (
    AmbiguousOriginalError,
    MvlError,
    OriginalNotFoundError,
    PluginFailureError,
    ReparseFailureError,
)
from .intent import FactOrigin, IntentFact, IntentReport
from .lexer import PATCH_MARKER, tokenize
from .parser import parse_program
from .printer import clause_text, expr_text, stmt_lines
from .solver import BoundedChecker, BoundedDomain
from .syntax import (
    ArrayLit,
    Assign,
    Binary,
    BinaryOp,
    ClauseKind,
    Expr,
    Index,
    IntLit,
    Length,
    Method,
    Program,
    Quantifier,
    QuantKind,
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
    free_vars,
    mk_implies,
    mk_not,
    normalize,
    walk_stmts,
)
from .vcgen import FailingTrace, WF_KINDS

PATCHED_TRUST = TrustTag(True, TrustOrigin.PATCHED)


# ---------------------------------------------------------------------------
# Prioritization


def _merged_types(f: IntentFact, g: IntentFact) -> Dict[str, Type]:
    out = dict(g.var_types)
    out.update(f.var_types)
    return out


def _joint_unsat(f: IntentFact, g: IntentFact, checker: BoundedChecker) -> bool:
    formula = mk_not(Binary(BinaryOp.AND, f.formula, g.formula))
    return checker.check(formula, _merged_types(f, g)).is_valid


def _conflicts_hard(f: IntentFact, h: IntentFact, checker: BoundedChecker) -> bool:
    """A soft fact conflicts with a hard well-formedness fact when the
    fact's own clause contains the offending access and the obligation
    is not valid; any other pair conflicts when jointly unsatisfiable."""
    if (h.origin_kind == FactOrigin.WF_CHECK and h.clause_sid is not None
            and h.clause_sid == f.origin_sid):
        return not checker.check(h.formula, h.var_types).is_valid
    if h.is_vc_fact:
        # h is a verified obligation, hence valid: f /\ h is unsat
        # exactly when f alone is, which is far cheaper to decide.
        return checker.check(mk_not(f.formula), f.var_types).is_valid
    return _joint_unsat(f, h, checker)


def _stronger(g: IntentFact, f: IntentFact, checker: BoundedChecker) -> bool:
    types = _merged_types(g, f)
    fwd = checker.check(mk_implies(g.formula, f.formula), types)
    if not fwd.is_valid:
        return False
    back = checker.check(mk_implies(f.formula, g.formula), types)
    return not back.is_valid


def prioritize(soft: Sequence[IntentFact], hard: Sequence[IntentFact],
               checker: BoundedChecker, rng: Random) -> List[IntentFact]:
    """Order repair targets: most hard-intent conflicts first, then most
    soft conflicts, then logical strength; remaining ties are broken by
    the seeded RNG."""
    facts = sorted(soft, key=lambda f: (f.origin_sid if f.origin_sid is not None
                                        else 1 << 30, f.fact_id[1]))
    keyed: List[Tuple[Tuple[int, int, int, float], IntentFact]] = []
    for f in facts:
        h_conf = sum(1 for h in hard if _conflicts_hard(f, h, checker))
        s_conf = sum(1 for g in facts if g is not f and _joint_unsat(f, g, checker))
        rank = sum(1 for g in facts if g is not f and _stronger(g, f, checker))
        f.priority = (h_conf, s_conf, rank)
        keyed.append(((-h_conf, -s_conf, rank, rng.random()), f))
    keyed.sort(key=lambda kv: kv[0])
    return [f for _k, f in keyed]


def top_priority_class(ordered: Sequence[IntentFact]) -> List[IntentFact]:
    if not ordered:
        return []
    top = ordered[0].priority
    return [f for f in ordered if f.priority == top]


# ---------------------------------------------------------------------------
# Requests


DEFAULT_CONTEXT = (
    "Programs are written in a small Dafny-like verification language. "
    "Array reads outside the bounds evaluate to 0, so unguarded "
    "specification accesses can be satisfied vacuously; guard them with "
    "explicit bounds. Loops need invariants to prove their "
    "postconditions."
)


@dataclass
class SynthRequest:
    filename: str
    annotated_program: str
    error_trace: str
    error: str
    trace_assertions: str
    context: str
    priority: str
    k: int
    # In-process conveniences; not part of the wire document.
    program: Optional[Program] = None
    source: str = ""
    report: Optional[IntentReport] = None
    trace: Optional[FailingTrace] = None
    priority_facts: List[IntentFact] = field(default_factory=list)


REQUEST_FIELDS = ["filename", "k", "program", "error_trace", "error",
                  "trace_assertions", "context", "priority"]


def serialize_request(req: SynthRequest) -> str:
    values = {
        "filename": req.filename,
        "k": str(req.k),
        "program": req.annotated_program,
        "error_trace": req.error_trace,
        "error": req.error,
        "trace_assertions": req.trace_assertions,
        "context": req.context,
        "priority": req.priority,
    }
    chunks = []
    for name in REQUEST_FIELDS:
        chunks.append("%s <<<\n%s\n>>>" % (name, values[name]))
    return "\n".join(chunks) + "\n"


def parse_request(text: str) -> Dict[str, str]:
    """Parse the serialized request document back into a field map."""
    out: Dict[str, str] = {}
    lines = text.split("\n")
    i = 0
    while i < len(lines):
        line = lines[i]
        if line.endswith(" <<<"):
            name = line[:-4]
            body: List[str] = []
            i += 1
            while i < len(lines) and lines[i] != ">>>":
                body.append(lines[i])
                i += 1
            if i >= len(lines):
                raise PluginFailureError("unterminated request field %r" % name)
            out[name] = "\n".join(body)
        i += 1
    missing = [f for f in REQUEST_FIELDS if f not in out]
    if missing:
        raise PluginFailureError("request missing fields: %s" % ", ".join(missing))
    return out


def _wf_annotations(report: IntentReport, program: Program) -> Dict[int, List[str]]:
    """Comment texts describing presence-guarded obligations, keyed by
    the source line of the node that carries the access."""
    out: Dict[int, List[str]] = {}
    for f in report.hard:
        if f.origin_kind != FactOrigin.WF_CHECK or f.node is None:
            continue
        span = getattr(f.node, "span", None)
        if span is None:
            continue
        node_expr = getattr(f.node, "expr", None)
        head = expr_text(node_expr) if node_expr is not None else "statement"
        note = "// {:trusted} [[ %s --> %s ]]" % (head, expr_text(f.formula))
        out.setdefault(span.line, []).append(note)
    return out


def annotated_program_text(source: str, program: Program,
                           report: IntentReport) -> str:
    """The program text with hard-intent obligations written as trusted
    comments above the lines that carry them."""
    notes = _wf_annotations(report, program)
    lines = source.split("\n")
    out: List[str] = []
    for no, line in enumerate(lines, start=1):
        for note in notes.get(no, []):
            indent = line[:len(line) - len(line.lstrip())]
            out.append(indent + note)
        out.append(line)
    return "\n".join(out)


def _step_text(s) -> str:
    formula = s.source_formula if s.source_formula is not None else s.formula
    head = "assert" if s.is_assert else "assume"
    where = " (line %d)" % s.span.line if s.span is not None else ""
    return "%s %s%s" % (head, expr_text(formula), where)


def build_request(program: Program, source: str, report: IntentReport,
                  trace: FailingTrace, k: int, checker: BoundedChecker,
                  rng: Random, filename: str = "input.mvl",
                  extra_context: str = "") -> SynthRequest:
    ordered = prioritize(report.soft, report.hard, checker, rng)
    top = top_priority_class(ordered)
    q = trace.partition
    target_formula = (q.target.source_formula if q.target.source_formula is not None
                      else q.target.formula)

    from .verify import panel_messages
    error_lines = panel_messages(program, trace, 1)
    error_lines.append("failing assert `%s`" % expr_text(target_formula))

    trace_lines = [_step_text(s) for s in trace.steps]
    proven = [
        _step_text(s) for s in q.path
        if s.role.value in ("inv_entry", "inv_maintain", "assert_user",
                            "call_requires", "wf_check")
    ]
    prio_lines = []
    for f in top:
        prio_lines.append("[%s sid=%s, conflicts h=%d s=%d, strength %d] %s"
                          % (f.origin_kind.value, f.origin_sid,
                             f.priority[0], f.priority[1], f.priority[2],
                             f.render()))
    context = DEFAULT_CONTEXT if not extra_context else (
        DEFAULT_CONTEXT + "\n" + extra_context)

    req = SynthRequest(
        filename=filename,
        annotated_program=annotated_program_text(source, program, report),
        error_trace="\n".join(trace_lines),
        error="\n".join(error_lines),
        trace_assertions="\n".join(proven) if proven else "(none)",
        context=context,
        priority="\n".join(prio_lines) if prio_lines else "(none)",
        k=k,
        program=program,
        source=source,
        report=report,
        trace=trace,
        priority_facts=ordered,
    )
    return req


# ---------------------------------------------------------------------------
# Patches: wire format, parsing, freezing, application


@dataclass
class Hunk:
    file: str
    original: str
    patched: str


@dataclass
class Patch:
    hunks: List[Hunk]
    synthesizer_id: str = ""
    campaign: int = 0

    @property
    def patch_id(self) -> str:
        blob = "\n::\n".join("%s\n%s\n%s" % (h.file, h.original, h.patched)
                             for h in self.hunks)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def render_reply(candidates: Sequence[Sequence[Hunk]]) -> str:
    """Render candidate hunk groups in the patch wire format."""
    chunks: List[str] = []
    for n, hunks in enumerate(candidates, start=1):
        for h in hunks:
            chunks.append(
                "# modification %d\n"
                "<file>\n%s\n</file>\n"
                "<original>\n%s\n</original>\n"
                "<patched>\n%s\n</patched>\n" % (n, h.file, h.original, h.patched)
            )
    return "\n".join(chunks)


_MOD_RE = re.compile(r"(?m)^#\s*modification\s+(\d+)\s*$")
_TAG_RES = {
    "file": re.compile(r"<file>(.*?)</file>", re.S),
    "original": re.compile(r"<original>(.*?)</original>", re.S),
    "patched": re.compile(r"<patched>(.*?)</patched>", re.S),
}


def _strip_block(s: str) -> str:
    if s.startswith("\n"):
        s = s[1:]
    if s.endswith("\n"):
        s = s[:-1]
    return s


def parse_reply(text: str) -> List[Patch]:
    """Parse a synthesizer reply; hunks sharing a modification number
    form one candidate patch."""
    headers = list(_MOD_RE.finditer(text))
    grouped: Dict[int, List[Hunk]] = {}
    for idx, m in enumerate(headers):
        start = m.end()
        end = headers[idx + 1].start() if idx + 1 < len(headers) else len(text)
        seg = text[start:end]
        files = _TAG_RES["file"].findall(seg)
        originals = _TAG_RES["original"].findall(seg)
        patched = _TAG_RES["patched"].findall(seg)
        if not (len(files) == len(originals) == len(patched)):
            raise PluginFailureError(
                "malformed modification %s: tag counts differ" % m.group(1))
        if not files:
            raise PluginFailureError(
                "malformed modification %s: no hunk" % m.group(1))
        n = int(m.group(1))
        for f, o, p in zip(files, originals, patched):
            grouped.setdefault(n, []).append(
                Hunk(_strip_block(f).strip(), _strip_block(o), _strip_block(p)))
    return [Patch(grouped[n]) for n in sorted(grouped)]


def frozen_line_numbers(source: str, program: Optional[Program] = None) -> Set[int]:
    """Lines that synthesis may not alter: previously patched lines
    (trailing marker) and lines holding a user `{:trusted}` attribute."""
    _tokens, markers = tokenize(source)
    frozen = set(markers)
    if program is None:
        program = parse_program(source)
    for m in program.methods:
        nodes = list(m.spec_clauses())
        if m.body is not None:
            for st in walk_stmts(m.body):
                nodes.append(st)
                if hasattr(st, "invariants"):
                    nodes.extend(st.invariants)
        for node in nodes:
            trust = getattr(node, "trust", None)
            if (trust is not None and trust.trusted
                    and trust.origin == TrustOrigin.USER
                    and getattr(node, "span", None) is not None):
                frozen.add(node.span.line)
    return frozen


def _find_block(lines: List[str], block: List[str]) -> List[int]:
    n = len(block)
    return [i for i in range(len(lines) - n + 1) if lines[i:i + n] == block]


def _locate(lines: List[str], original: str) -> Tuple[int, List[str]]:
    block = original.split("\n")
    matches = _find_block(lines, block)
    if not matches:
        stripped = [l.replace("{:trusted} ", "") for l in block]
        if stripped != block:
            matches = _find_block(lines, stripped)
            block = stripped
    if len(matches) > 1:
        raise AmbiguousOriginalError(
            "original block occurs %d times:\n%s" % (len(matches), original))
    if not matches:
        raise OriginalNotFoundError("original block not found:\n%s" % original)
    return matches[0], block


def apply_patch(source: str, patch: Patch) -> str:
    """Replace each hunk's original lines with its patched lines; the
    result must reparse."""
    lines = source.split("\n")
    for h in patch.hunks:
        at, block = _locate(lines, h.original)
        replacement = h.patched.split("\n") if h.patched else []
        lines[at:at + len(block)] = replacement
    out = "\n".join(lines)
    try:
        parse_program(out)
    except MvlError as e:
        raise ReparseFailureError("patched source no longer parses: %s" % e)
    return out


def _hunk_ok(hunk: Hunk, source_lines: List[str], frozen: Set[int],
             reasons: List[str]) -> bool:
    try:
        at, block = _locate(source_lines, hunk.original)
    except AmbiguousOriginalError:
        reasons.append("ambiguous original")
        return False
    except OriginalNotFoundError:
        reasons.append("original not found")
        return False
    patched_lines = hunk.patched.split("\n") if hunk.patched else []
    for off, text in enumerate(block):
        if (at + off + 1) in frozen and text not in patched_lines:
            reasons.append("frozen line modified: %s" % text.strip())
            return False
    for text in patched_lines:
        if text in block:
            continue
        if text.strip() and not text.rstrip().endswith(PATCH_MARKER):
            reasons.append("patched line missing marker: %s" % text.strip())
            return False
    return True


def synthesize(req: SynthRequest, plugin: "SynthPlugin") -> Tuple[List[Patch], str, List[str]]:
    """Run the plugin and return (validated patches, raw reply,
    dropped-hunk reasons)."""
    reply = plugin.synthesize(req)
    patches = parse_reply(reply)
    source_lines = req.source.split("\n")
    frozen = frozen_line_numbers(req.source, req.program)
    kept: List[Patch] = []
    reasons: List[str] = []
    for p in patches:
        ok = True
        for h in p.hunks:
            if h.file and h.file != req.filename:
                reasons.append("hunk targets %r, expected %r" % (h.file, req.filename))
                ok = False
                break
            if not _hunk_ok(h, source_lines, frozen, reasons):
                ok = False
                break
        if ok:
            p.synthesizer_id = plugin.plugin_id
            kept.append(p)
        if len(kept) >= req.k:
            break
    return kept, reply, reasons


# ---------------------------------------------------------------------------
# Plugins


class SynthPlugin:
    plugin_id = "abstract"

    def synthesize(self, req: SynthRequest) -> str:
        raise NotImplementedError


class SubprocessPlugin(SynthPlugin):
    """External synthesizer: one request document on stdin, wire-format
    reply on stdout, one process per request."""

    def __init__(self, cmd: Union[str, List[str]], timeout_s: float = 120.0):
        self.cmd = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
        self.timeout_s = timeout_s
        self.plugin_id = "subprocess:%s" % (self.cmd[0] if self.cmd else "?")

    def synthesize(self, req: SynthRequest) -> str:
        doc = serialize_request(req)
        try:
            proc = subprocess.Popen(
                self.cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.PIPE, text=True)
        except OSError as e:
            raise PluginFailureError("cannot start synthesizer %r: %s"
                                     % (self.cmd, e))
        try:
            out, err = proc.communicate(doc, timeout=self.timeout_s)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
            raise PluginFailureError("synthesizer timed out")
        if proc.returncode != 0:
            raise PluginFailureError("synthesizer exited %d: %s"
                                     % (proc.returncode, err.strip()[:200]))
        return out


@dataclass
class AlignmentContext:
    """Extra knowledge available while co-evolving a spec stub against a
    test harness: the test literals and the positional name maps from
    harness variables to stub parameters/returns."""

    test: Test
    stub_method: str
    param_map: Dict[str, str]
    result_map: Dict[str, str]


def _int_expr(n: int) -> Expr:
    return IntLit(n) if n >= 0 else Unary(UnaryOp.NEG, IntLit(-n))


def _literal_value(e: Expr) -> Optional[int]:
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, Unary) and e.op == UnaryOp.NEG and isinstance(e.operand, IntLit):
        return -e.operand.value
    return None


class _LiteralSites:
    """Enumerate and rewrite integer-literal occurrences of an
    expression, treating a negated literal as one site."""

    @staticmethod
    def collect(e: Expr) -> List[int]:
        out: List[int] = []

        def visit(x: Expr) -> None:
            v = _literal_value(x)
            if v is not None:
                out.append(v)
                return
            if isinstance(x, Unary):
                visit(x.operand)
            elif isinstance(x, Binary):
                visit(x.left)
                visit(x.right)
            elif isinstance(x, Index):
                visit(x.index)
            elif isinstance(x, Quantifier):
                visit(x.lo)
                visit(x.hi)
                visit(x.body)
            elif isinstance(x, ArrayLit):
                for el in x.elements:
                    visit(el)

        visit(e)
        return out

    @staticmethod
    def replace(e: Expr, occurrence: int, new: Expr) -> Expr:
        count = [0]

        def rebuild(x: Expr) -> Expr:
            v = _literal_value(x)
            if v is not None:
                idx = count[0]
                count[0] += 1
                return new if idx == occurrence else x
            if isinstance(x, Unary):
                return Unary(x.op, rebuild(x.operand))
            if isinstance(x, Binary):
                return Binary(x.op, rebuild(x.left), rebuild(x.right))
            if isinstance(x, Index):
                return Index(x.base, rebuild(x.index))
            if isinstance(x, Quantifier):
                return Quantifier(x.kind, x.var, rebuild(x.lo), rebuild(x.hi),
                                  rebuild(x.body))
            if isinstance(x, ArrayLit):
                return ArrayLit(tuple(rebuild(el) for el in x.elements))
            return x

        return rebuild(e)


class EnumerativePlugin(SynthPlugin):
    """Builtin synthesizer: deterministic mutation classes over the
    failing target and the prioritized soft facts.

    Classes, in order: bounds-guard weakening of the implicated spec
    clause; test-driven ensures addition (only when aligning a stub
    against a test harness); constant and variable replacement at
    relevant sites; clause deletion; boolean-guard insertion on failing
    invariants.
    """

    plugin_id = "enumerative"

    def __init__(self, domain: Optional[BoundedDomain] = None,
                 alignment: Optional[AlignmentContext] = None):
        self.domain = domain if domain is not None else BoundedDomain()
        self.alignment = alignment

    # -- helpers ---------------------------------------------------------

    def _line_of(self, req: SynthRequest, node) -> Optional[str]:
        span = getattr(node, "span", None)
        if span is None:
            return None
        lines = req.source.split("\n")
        if not (1 <= span.line <= len(lines)):
            return None
        return lines[span.line - 1]

    def _clause_hunk(self, req: SynthRequest, clause: SpecClause,
                     new_expr: Expr) -> Optional[Hunk]:
        text = self._line_of(req, clause)
        if text is None:
            return None
        indent = text[:len(text) - len(text.lstrip())]
        new_clause = SpecClause(clause.kind, new_expr, PATCHED_TRUST)
        return Hunk(req.filename, text, indent + clause_text(new_clause))

    def _stmt_hunk(self, req: SynthRequest, st: Stmt, new_stmt: Stmt) -> Optional[Hunk]:
        text = self._line_of(req, st)
        if text is None:
            return None
        indent = text[:len(text) - len(text.lstrip())]
        rendered = stmt_lines(new_stmt, 0)
        if len(rendered) != 1:
            return None
        return Hunk(req.filename, text, indent + rendered[0])

    def _guards(self, clause_expr: Expr, method: Method) -> List[Expr]:
        fv = free_vars(clause_expr)
        int_syms = [p.name for p in list(method.params) + list(method.returns)
                    if p.type == Type.INT and p.name in fv]
        arrays = [p.name for p in method.params if p.type == Type.ARRAY_INT]
        out: List[Expr] = []
        seen: Set[str] = set()
        for v in int_syms:
            for a in arrays:
                cands = [
                    Binary(BinaryOp.AND,
                           Binary(BinaryOp.LE, IntLit(0), Var(v)),
                           Binary(BinaryOp.LT, Var(v), Length(a))),
                    Binary(BinaryOp.LE, IntLit(0), Var(v)),
                    Binary(BinaryOp.LT, Var(v), Length(a)),
                ]
                for g in cands:
                    key = normalize(g)
                    if key not in seen:
                        seen.add(key)
                        out.append(g)
        return out

    def _replacements(self, original: int, method: Method) -> List[Expr]:
        arrays = [p.name for p in method.params if p.type == Type.ARRAY_INT]
        out: List[Expr] = []
        seen: Set[str] = set()

        def push(e: Expr) -> None:
            key = normalize(e)
            if key in seen:
                return
            v = _literal_value(e)
            if v is not None and v == original:
                return
            seen.add(key)
            out.append(e)

        for a in arrays:
            push(Unary(UnaryOp.NEG, Length(a)))
            push(Length(a))
        push(IntLit(0))
        for c in range(self.domain.int_lo, self.domain.int_hi + 1):
            push(_int_expr(c))
        return out

    def _rhs_replacements(self, rhs: Var, method: Method,
                          var_types: Dict[str, Type]) -> List[Expr]:
        out: List[Expr] = [Unary(UnaryOp.NEG, rhs)]
        rtype = var_types.get(rhs.name, Type.INT)
        for p in method.params:
            if p.name != rhs.name and p.type == rtype:
                out.append(Var(p.name))
        return out

    # -- candidate classes -----------------------------------------------

    def _class_guard_weaken(self, req: SynthRequest, method: Method,
                            frozen: Set[int]) -> List[Hunk]:
        q = req.trace.partition
        clause = None
        if q.kind in WF_KINDS and isinstance(q.target.origin, SpecClause):
            clause = q.target.origin
        elif isinstance(q.target.origin, SpecClause):
            target_fact_soft = any(
                f.origin_sid == q.target.origin.sid for f in req.report.soft)
            if target_fact_soft:
                clause = q.target.origin
        if clause is None or clause.trust.trusted:
            return []
        span = getattr(clause, "span", None)
        if span is not None and span.line in frozen:
            return []
        out: List[Hunk] = []
        for g in self._guards(clause.expr, method):
            h = self._clause_hunk(req, clause, mk_implies(g, clause.expr))
            if h is not None:
                out.append(h)
        return out

    def _class_test_ensures(self, req: SynthRequest) -> List[Hunk]:
        ctx = self.alignment
        if ctx is None or req.program is None:
            return []
        if not req.program.has_method(ctx.stub_method):
            return []
        stub = req.program.method(ctx.stub_method)

        consequents: List[Expr] = []
        oracle_parts = []
        for o in ctx.test.oracle:
            mapping = {name: Var(tgt) for name, tgt in ctx.result_map.items()}
            mapping.update({name: Var(tgt) for name, tgt in ctx.param_map.items()})
            from .syntax import substitute
            oracle_parts.append(substitute(o, mapping))
        if oracle_parts:
            consequents.append(conjoin(oracle_parts))
        if not consequents:
            return []

        antecedents: List[Expr] = []
        for name, lit in ctx.test.inputs:
            param = ctx.param_map.get(name)
            if param is None:
                continue
            if isinstance(lit, ArrayLit):
                values = [_literal_value(el) for el in lit.elements]
                if values and all(v is not None and v % 2 == 0 for v in values):
                    antecedents.append(self._all_parity(param, even=True))
                if values and all(v is not None and v % 2 != 0 for v in values):
                    antecedents.append(self._all_parity(param, even=False))
                antecedents.append(Binary(BinaryOp.EQ, Length(param),
                                          IntLit(len(lit.elements))))
                eqs: List[Expr] = [Binary(BinaryOp.EQ, Length(param),
                                          IntLit(len(lit.elements)))]
                for i, el in enumerate(lit.elements):
                    eqs.append(Binary(BinaryOp.EQ, Index(param, IntLit(i)), el))
                antecedents.append(conjoin(eqs))
            else:
                antecedents.append(Binary(BinaryOp.EQ, Var(param), lit))

        anchor = None
        for c in stub.spec_clauses():
            if c.span is not None and (anchor is None or c.span.line > anchor.span.line):
                anchor = c
        anchor_line = self._line_of(req, anchor if anchor is not None else stub)
        if anchor_line is None:
            return []
        indent = (anchor_line[:len(anchor_line) - len(anchor_line.lstrip())]
                  or "  ")
        out: List[Hunk] = []
        for ante in antecedents:
            for cons in consequents:
                clause = SpecClause(ClauseKind.ENSURES, mk_implies(ante, cons),
                                    PATCHED_TRUST)
                patched = anchor_line + "\n" + indent + clause_text(clause)
                out.append(Hunk(req.filename, anchor_line, patched))
        return out

    def _all_parity(self, param: str, even: bool) -> Expr:
        op = BinaryOp.EQ if even else BinaryOp.NE
        body = Binary(op, Binary(BinaryOp.MOD, Index(param, Var("i")), IntLit(2)),
                      IntLit(0))
        return Quantifier(QuantKind.FORALL, "i", IntLit(0), Length(param), body)

    def _sites(self, req: SynthRequest) -> List[object]:
        """Replacement sites: the failing clause itself (when it is a
        legal repair target), then assignments from the prioritized
        facts that share a variable with the failing formula."""
        q = req.trace.partition
        target_formula = (q.target.source_formula
                          if q.target.source_formula is not None
                          else q.target.formula)
        target_vars = free_vars(target_formula)
        sites: List[object] = []
        seen: Set[int] = set()

        def push(node) -> None:
            sid = getattr(node, "sid", None)
            if node is None or sid is None or sid in seen:
                return
            seen.add(sid)
            sites.append(node)

        target_soft = any(f.origin_sid == getattr(q.target.origin, "sid", None)
                          for f in req.report.soft)
        if target_soft and isinstance(q.target.origin, (SpecClause, Assign, VarDecl)):
            push(q.target.origin)
        for f in req.priority_facts:
            if not isinstance(f.node, (Assign, VarDecl)):
                continue
            site_vars = {f.node.name} | free_vars(f.formula)
            if site_vars & target_vars:
                push(f.node)
        return sites

    def _class_replacement(self, req: SynthRequest, method: Method,
                           frozen: Set[int]) -> List[Hunk]:
        out: List[Hunk] = []
        var_types: Dict[str, Type] = {}
        from .intent import source_var_types
        try:
            var_types = source_var_types(req.program, method.name)
        except Exception:
            var_types = method.symbol_types()
        for node in self._sites(req):
            span = getattr(node, "span", None)
            if span is not None and span.line in frozen:
                continue
            if isinstance(node, SpecClause):
                if node.trust.trusted:
                    continue
                literals = _LiteralSites.collect(node.expr)
                for occ, value in enumerate(literals):
                    for repl in self._replacements(value, method):
                        new_expr = _LiteralSites.replace(node.expr, occ, repl)
                        h = self._clause_hunk(req, node, new_expr)
                        if h is not None:
                            out.append(h)
            elif isinstance(node, (Assign, VarDecl)):
                if node.trust.trusted:
                    continue
                rhs = node.expr if isinstance(node, Assign) else node.init
                if rhs is None:
                    continue
                lit = _literal_value(rhs)
                if lit is not None:
                    repls = self._replacements(lit, method)
                elif isinstance(rhs, Var):
                    repls = self._rhs_replacements(rhs, method, var_types)
                else:
                    literals = _LiteralSites.collect(rhs)
                    repls = []
                    for occ, value in enumerate(literals):
                        for r in self._replacements(value, method):
                            new_rhs = _LiteralSites.replace(rhs, occ, r)
                            repls.append(new_rhs)
                    repls = repls[:self.domain.int_hi - self.domain.int_lo + 3]
                for repl in repls:
                    if isinstance(node, Assign):
                        new_stmt: Stmt = Assign(node.name, repl, PATCHED_TRUST)
                    else:
                        new_stmt = VarDecl(node.name, node.type, repl, PATCHED_TRUST)
                    h = self._stmt_hunk(req, node, new_stmt)
                    if h is not None:
                        out.append(h)
        return out

    def _class_deletion(self, req: SynthRequest) -> List[Hunk]:
        q = req.trace.partition
        node = q.target.origin
        if not isinstance(node, SpecClause) or node.trust.trusted:
            return []
        target_soft = any(f.origin_sid == node.sid for f in req.report.soft)
        if not target_soft and q.kind not in WF_KINDS:
            return []
        text = self._line_of(req, node)
        if text is None:
            return []
        return [Hunk(req.filename, text, "")]

    def _class_invariant_guard(self, req: SynthRequest, method: Method) -> List[Hunk]:
        q = req.trace.partition
        node = q.target.origin
        if not isinstance(node, SpecClause) or node.kind != ClauseKind.INVARIANT:
            return []
        if node.trust.trusted:
            return []
        bools: List[str] = []
        if method.body is not None:
            for st in walk_stmts(method.body):
                if isinstance(st, VarDecl) and st.type == Type.BOOL:
                    bools.append(st.name)
                elif (isinstance(st, VarDecl) and st.type is None
                      and st.init is not None
                      and getattr(st.init, "value", None) in (True, False)):
                    bools.append(st.name)
        out: List[Hunk] = []
        for b in bools:
            for guard in (Var(b), mk_not(Var(b))):
                h = self._clause_hunk(req, node, mk_implies(guard, node.expr))
                if h is not None:
                    out.append(h)
        return out

    # -- entry point -----------------------------------------------------

    def synthesize(self, req: SynthRequest) -> str:
        if req.program is None or req.trace is None or req.report is None:
            raise PluginFailureError(
                "enumerative synthesizer needs in-process request context")
        method = req.program.method(req.trace.partition.method)
        frozen = frozen_line_numbers(req.source, req.program)
        hunks: List[Hunk] = []
        hunks.extend(self._class_guard_weaken(req, method, frozen))
        hunks.extend(self._class_test_ensures(req))
        hunks.extend(self._class_replacement(req, method, frozen))
        hunks.extend(self._class_deletion(req))
        hunks.extend(self._class_invariant_guard(req, method))
        seen: Set[Tuple[str, str]] = set()
        unique: List[Hunk] = []
        for h in hunks:
            key = (h.original, h.patched)
            if key in seen or h.original == h.patched:
                continue
            seen.add(key)
            unique.append(h)
        return render_reply([[h] for h in unique[:req.k]])


__all__ = [
    "PATCHED_TRUST", "prioritize", "top_priority_class",
    "SynthRequest", "serialize_request", "parse_request", "build_request",
    "annotated_program_text", "DEFAULT_CONTEXT",
    "Hunk", "Patch", "render_reply", "parse_reply",
    "frozen_line_numbers", "apply_patch", "synthesize",
    "SynthPlugin", "SubprocessPlugin", "EnumerativePlugin", "AlignmentContext",
]
