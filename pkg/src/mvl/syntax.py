"""AST definitions for the mini verification language (MVL).

Programs, specifications, and tests share one expression language:
integer/boolean literals, variables, arithmetic, comparisons, boolean
connectives, implication, array length/indexing, array literals, and
bounded quantifiers.  All nodes are plain dataclasses; source spans and
statement ids never participate in structural equality.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterator, List, Optional, Set, Tuple, Union

from .errors import UnsupportedConstruct


@dataclass(frozen=True)
class Span:
    """1-based source position of a node (start line/column)."""

    line: int
    col: int
    end_line: int = 0

    def __post_init__(self):
        if self.end_line == 0:
            object.__setattr__(self, "end_line", self.line)


class Type(Enum):
    INT = "int"
    BOOL = "bool"
    ARRAY_INT = "array<int>"


class TrustOrigin(Enum):
    USER = "user"
    PATCHED = "patched"


@dataclass(frozen=True)
class TrustTag:
    """Marks a statement or clause as frozen hard intent.

    ``user`` tags come from the `{:trusted}` attribute, ``patched`` tags
    from the trailing `// pr {:trusted}` line marker left by applied
    patches.  Untrusted nodes carry the default tag.
    """

    trusted: bool = False
    origin: TrustOrigin = TrustOrigin.USER


UNTRUSTED = TrustTag(False, TrustOrigin.USER)


class UnaryOp(Enum):
    NOT = "!"
    NEG = "-"


class BinaryOp(Enum):
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"
    MOD = "%"
    EQ = "=="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    AND = "&&"
    OR = "||"
    IMPLIES = "==>"


COMPARISON_OPS = {BinaryOp.EQ, BinaryOp.NE, BinaryOp.LT, BinaryOp.LE, BinaryOp.GT, BinaryOp.GE}
ARITH_OPS = {BinaryOp.ADD, BinaryOp.SUB, BinaryOp.MUL, BinaryOp.DIV, BinaryOp.MOD}
COMMUTATIVE_OPS = {BinaryOp.ADD, BinaryOp.MUL, BinaryOp.AND, BinaryOp.OR, BinaryOp.EQ, BinaryOp.NE}


class QuantKind(Enum):
    FORALL = "forall"
    EXISTS = "exists"


class Expr:
    """Base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Length(Expr):
    """`base.Length` for an array-typed variable."""

    base: str


@dataclass(frozen=True)
class Index(Expr):
    """`base[index]` for an array-typed variable."""

    base: str
    index: Expr


@dataclass(frozen=True)
class ArrayLit(Expr):
    """`new int[]{e1, ..., en}` — a fresh array with listed elements."""

    elements: Tuple[Expr, ...]


@dataclass(frozen=True)
class Unary(Expr):
    op: UnaryOp
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: BinaryOp
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Quantifier(Expr):
    """Bounded quantifier `kind var :: lo <= var < hi (==>|&&) body`."""

    kind: QuantKind
    var: str
    lo: Expr
    hi: Expr
    body: Expr


TRUE = BoolLit(True)
FALSE = BoolLit(False)


# ---------------------------------------------------------------------------
# Expression constructors and small helpers


def mk_not(e: Expr) -> Expr:
    if isinstance(e, BoolLit):
        return BoolLit(not e.value)
    if isinstance(e, Unary) and e.op == UnaryOp.NOT:
        return e.operand
    return Unary(UnaryOp.NOT, e)


def mk_and(a: Expr, b: Expr) -> Expr:
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    return Binary(BinaryOp.AND, a, b)


def mk_implies(a: Expr, b: Expr) -> Expr:
    if a == TRUE:
        return b
    return Binary(BinaryOp.IMPLIES, a, b)


def conjoin(parts: List[Expr]) -> Expr:
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = mk_and(out, p)
    return out


def implication_chain(antecedents: List[Expr], target: Expr) -> Expr:
    """Right-nested implication A1 ==> (A2 ==> (... ==> target))."""
    out = target
    for a in reversed(antecedents):
        out = Binary(BinaryOp.IMPLIES, a, out)
    return out


def conjuncts_of(e: Expr) -> List[Expr]:
    """Flatten a top-level `&&` chain into its conjuncts."""
    if isinstance(e, Binary) and e.op == BinaryOp.AND:
        return conjuncts_of(e.left) + conjuncts_of(e.right)
    return [e]


def walk_expr(e: Expr) -> Iterator[Expr]:
    yield e
    if isinstance(e, Unary):
        yield from walk_expr(e.operand)
    elif isinstance(e, Binary):
        yield from walk_expr(e.left)
        yield from walk_expr(e.right)
    elif isinstance(e, Index):
        yield from walk_expr(e.index)
    elif isinstance(e, ArrayLit):
        for el in e.elements:
            yield from walk_expr(el)
    elif isinstance(e, Quantifier):
        yield from walk_expr(e.lo)
        yield from walk_expr(e.hi)
        yield from walk_expr(e.body)


def free_vars(e: Expr) -> Set[str]:
    if isinstance(e, (IntLit, BoolLit)):
        return set()
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Length):
        return {e.base}
    if isinstance(e, Index):
        return {e.base} | free_vars(e.index)
    if isinstance(e, ArrayLit):
        out: Set[str] = set()
        for el in e.elements:
            out |= free_vars(el)
        return out
    if isinstance(e, Unary):
        return free_vars(e.operand)
    if isinstance(e, Binary):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Quantifier):
        return free_vars(e.lo) | free_vars(e.hi) | (free_vars(e.body) - {e.var})
    raise UnsupportedConstruct("unknown expression node %r" % (e,))


def _fresh_name(base: str, taken: Set[str]) -> str:
    i = 2
    while True:
        cand = "%s$%d" % (base, i)
        if cand not in taken:
            return cand
        i += 1


def substitute(e: Expr, mapping: Dict[str, Expr]) -> Expr:
    """Capture-avoiding substitution of variables by expressions.

    Array-typed positions (index/length bases) only accept variable
    replacements; anything else there raises UnsupportedConstruct.
    """
    if not mapping:
        return e
    if isinstance(e, (IntLit, BoolLit)):
        return e
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, Length):
        rep = mapping.get(e.base)
        if rep is None:
            return e
        if isinstance(rep, Var):
            return Length(rep.name)
        if isinstance(rep, ArrayLit):
            return IntLit(len(rep.elements))
        raise UnsupportedConstruct("cannot substitute %r for array %s" % (rep, e.base))
    if isinstance(e, Index):
        idx = substitute(e.index, mapping)
        rep = mapping.get(e.base)
        if rep is None:
            return Index(e.base, idx)
        if isinstance(rep, Var):
            return Index(rep.name, idx)
        raise UnsupportedConstruct("cannot substitute %r for array %s" % (rep, e.base))
    if isinstance(e, ArrayLit):
        return ArrayLit(tuple(substitute(el, mapping) for el in e.elements))
    if isinstance(e, Unary):
        return Unary(e.op, substitute(e.operand, mapping))
    if isinstance(e, Binary):
        return Binary(e.op, substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, Quantifier):
        inner = {k: v for k, v in mapping.items() if k != e.var}
        lo = substitute(e.lo, inner)
        hi = substitute(e.hi, inner)
        clash = any(e.var in free_vars(v) for v in inner.values())
        var = e.var
        body = e.body
        if clash:
            taken = set(inner) | free_vars(body)
            for v in inner.values():
                taken |= free_vars(v)
            var = _fresh_name(e.var, taken)
            body = substitute(body, {e.var: Var(var)})
        return Quantifier(e.kind, var, lo, hi, substitute(body, inner))
    raise UnsupportedConstruct("unknown expression node %r" % (e,))


# ---------------------------------------------------------------------------
# Canonical normalization (used for fact identity, caching, dedup)


def normalize(e: Expr) -> str:
    """Render an expression to a canonical s-expression string.

    Quantifier binders are alpha-renamed by depth and the operands of
    commutative operators are sorted, so semantically re-ordered but
    equal-by-commutation formulas share one normal form.
    """
    return _norm(e, {})


def _norm(e: Expr, bound: Dict[str, str]) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return bound.get(e.name, e.name)
    if isinstance(e, Length):
        return "(len %s)" % bound.get(e.base, e.base)
    if isinstance(e, Index):
        return "(at %s %s)" % (bound.get(e.base, e.base), _norm(e.index, bound))
    if isinstance(e, ArrayLit):
        return "(arr %s)" % " ".join(_norm(el, bound) for el in e.elements)
    if isinstance(e, Unary):
        return "(%s %s)" % (e.op.value, _norm(e.operand, bound))
    if isinstance(e, Binary):
        if e.op in (BinaryOp.AND, BinaryOp.OR, BinaryOp.ADD, BinaryOp.MUL):
            parts = sorted(_norm(p, bound) for p in _flatten(e, e.op))
            return "(%s %s)" % (e.op.value, " ".join(parts))
        if e.op in (BinaryOp.EQ, BinaryOp.NE):
            parts = sorted([_norm(e.left, bound), _norm(e.right, bound)])
            return "(%s %s)" % (e.op.value, " ".join(parts))
        return "(%s %s %s)" % (e.op.value, _norm(e.left, bound), _norm(e.right, bound))
    if isinstance(e, Quantifier):
        fresh = "q%d" % len(bound)
        inner = dict(bound)
        inner[e.var] = fresh
        return "(%s %s %s %s %s)" % (
            e.kind.value,
            fresh,
            _norm(e.lo, bound),
            _norm(e.hi, bound),
            _norm(e.body, inner),
        )
    raise UnsupportedConstruct("unknown expression node %r" % (e,))


def _flatten(e: Expr, op: BinaryOp) -> List[Expr]:
    if isinstance(e, Binary) and e.op == op:
        return _flatten(e.left, op) + _flatten(e.right, op)
    return [e]


# ---------------------------------------------------------------------------
# Specification clauses and statements


class ClauseKind(Enum):
    REQUIRES = "requires"
    ENSURES = "ensures"
    INVARIANT = "invariant"
    DECREASES = "decreases"


@dataclass
class SpecClause:
    kind: ClauseKind
    expr: Expr
    trust: TrustTag = UNTRUSTED
    span: Optional[Span] = field(default=None, compare=False, repr=False)
    sid: Optional[int] = field(default=None, compare=False, repr=False)


class Stmt:
    """Base class for statement nodes."""


@dataclass
class VarDecl(Stmt):
    name: str
    type: Optional[Type] = None
    init: Optional[Expr] = None
    trust: TrustTag = UNTRUSTED
    span: Optional[Span] = field(default=None, compare=False, repr=False)
    sid: Optional[int] = field(default=None, compare=False, repr=False)


@dataclass
class Assign(Stmt):
    name: str
    expr: Expr
    trust: TrustTag = UNTRUSTED
    span: Optional[Span] = field(default=None, compare=False, repr=False)
    sid: Optional[int] = field(default=None, compare=False, repr=False)


@dataclass
class CallStmt(Stmt):
    """`[var] t1, ..., tn := Method(args);`"""

    targets: Tuple[str, ...]
    method: str
    args: Tuple[Expr, ...]
    declares: bool = False
    trust: TrustTag = UNTRUSTED
    span: Optional[Span] = field(default=None, compare=False, repr=False)
    sid: Optional[int] = field(default=None, compare=False, repr=False)


@dataclass
class If(Stmt):
    cond: Expr
    then_body: List[Stmt] = field(default_factory=list)
    else_body: List[Stmt] = field(default_factory=list)
    trust: TrustTag = UNTRUSTED
    span: Optional[Span] = field(default=None, compare=False, repr=False)
    sid: Optional[int] = field(default=None, compare=False, repr=False)


@dataclass
class While(Stmt):
    cond: Expr
    invariants: List[SpecClause] = field(default_factory=list)
    decreases: Optional[SpecClause] = None
    body: List[Stmt] = field(default_factory=list)
    trust: TrustTag = UNTRUSTED
    span: Optional[Span] = field(default=None, compare=False, repr=False)
    sid: Optional[int] = field(default=None, compare=False, repr=False)


@dataclass
class For(Stmt):
    """`for v := lo to hi` iterates v over [lo, hi)."""

    var: str
    lo: Expr
    hi: Expr
    invariants: List[SpecClause] = field(default_factory=list)
    body: List[Stmt] = field(default_factory=list)
    trust: TrustTag = UNTRUSTED
    span: Optional[Span] = field(default=None, compare=False, repr=False)
    sid: Optional[int] = field(default=None, compare=False, repr=False)


@dataclass
class Assert(Stmt):
    expr: Expr
    trust: TrustTag = UNTRUSTED
    span: Optional[Span] = field(default=None, compare=False, repr=False)
    sid: Optional[int] = field(default=None, compare=False, repr=False)


@dataclass
class Assume(Stmt):
    expr: Expr
    trust: TrustTag = UNTRUSTED
    span: Optional[Span] = field(default=None, compare=False, repr=False)
    sid: Optional[int] = field(default=None, compare=False, repr=False)


@dataclass
class Break(Stmt):
    trust: TrustTag = UNTRUSTED
    span: Optional[Span] = field(default=None, compare=False, repr=False)
    sid: Optional[int] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Param:
    name: str
    type: Type


@dataclass
class Method:
    name: str
    params: List[Param] = field(default_factory=list)
    returns: List[Param] = field(default_factory=list)
    requires: List[SpecClause] = field(default_factory=list)
    ensures: List[SpecClause] = field(default_factory=list)
    body: Optional[List[Stmt]] = None
    span: Optional[Span] = field(default=None, compare=False, repr=False)
    body_line: Optional[int] = field(default=None, compare=False, repr=False)
    sid: Optional[int] = field(default=None, compare=False, repr=False)

    def spec_clauses(self) -> List[SpecClause]:
        return list(self.requires) + list(self.ensures)

    def symbol_types(self) -> Dict[str, Type]:
        table = {p.name: p.type for p in self.params}
        table.update({r.name: r.type for r in self.returns})
        if self.body is not None:
            for st in walk_stmts(self.body):
                if isinstance(st, VarDecl) and st.type is not None:
                    table.setdefault(st.name, st.type)
        return table


@dataclass
class Program:
    methods: List[Method] = field(default_factory=list)
    source_name: str = field(default="", compare=False)

    def method(self, name: str) -> Method:
        for m in self.methods:
            if m.name == name:
                return m
        raise KeyError(name)

    def has_method(self, name: str) -> bool:
        return any(m.name == name for m in self.methods)


@dataclass
class Test:
    """A static test: literal inputs I, one call, oracle asserts O."""

    name: str
    inputs: List[Tuple[str, Expr]]
    call_method: str
    call_args: Tuple[Expr, ...]
    results: Tuple[str, ...]
    oracle: List[Expr]
    source_name: str = ""


def walk_stmts(body: List[Stmt]) -> Iterator[Stmt]:
    for st in body:
        yield st
        if isinstance(st, If):
            yield from walk_stmts(st.then_body)
            yield from walk_stmts(st.else_body)
        elif isinstance(st, (While, For)):
            yield from walk_stmts(st.body)


def assign_ids(program: Program) -> None:
    """Number every statement, clause, and method in textual order."""
    counter = 0

    def nxt() -> int:
        nonlocal counter
        counter += 1
        return counter

    def visit_body(body: List[Stmt]) -> None:
        for st in body:
            st.sid = nxt()
            if isinstance(st, If):
                visit_body(st.then_body)
                visit_body(st.else_body)
            elif isinstance(st, While):
                for c in st.invariants:
                    c.sid = nxt()
                if st.decreases is not None:
                    st.decreases.sid = nxt()
                visit_body(st.body)
            elif isinstance(st, For):
                for c in st.invariants:
                    c.sid = nxt()
                visit_body(st.body)

    for m in program.methods:
        m.sid = nxt()
        for c in m.requires:
            c.sid = nxt()
        for c in m.ensures:
            c.sid = nxt()
        if m.body is not None:
            visit_body(m.body)


# ---------------------------------------------------------------------------
# Fingerprints — content identity for presence tracking


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def clause_signature(c: SpecClause) -> str:
    return "(clause %s %s)" % (c.kind.value, normalize(c.expr))


def stmt_signature(st: Stmt) -> str:
    if isinstance(st, VarDecl):
        init = normalize(st.init) if st.init is not None else "_"
        ty = st.type.value if st.type is not None else "_"
        return "(vardecl %s %s %s)" % (st.name, ty, init)
    if isinstance(st, Assign):
        return "(assign %s %s)" % (st.name, normalize(st.expr))
    if isinstance(st, CallStmt):
        return "(call %s (%s) %s)" % (
            st.method,
            " ".join(st.targets),
            " ".join(normalize(a) for a in st.args),
        )
    if isinstance(st, Assert):
        return "(assert %s)" % normalize(st.expr)
    if isinstance(st, Assume):
        return "(assume %s)" % normalize(st.expr)
    if isinstance(st, Break):
        return "(break)"
    if isinstance(st, If):
        return "(if %s)" % normalize(st.cond)
    if isinstance(st, While):
        return "(while %s %s)" % (
            normalize(st.cond),
            " ".join(clause_signature(c) for c in st.invariants),
        )
    if isinstance(st, For):
        return "(for %s %s %s)" % (st.var, normalize(st.lo), normalize(st.hi))
    raise UnsupportedConstruct("unknown statement node %r" % (st,))


def node_fingerprint(node: Union[Stmt, SpecClause]) -> str:
    if isinstance(node, SpecClause):
        return _digest(clause_signature(node))
    return _digest(stmt_signature(node))


def program_fingerprints(program: Program) -> Set[str]:
    """Fingerprints of every statement and clause in the program."""
    out: Set[str] = set()
    for m in program.methods:
        for c in m.spec_clauses():
            out.add(node_fingerprint(c))
        if m.body is None:
            continue
        for st in walk_stmts(m.body):
            out.add(node_fingerprint(st))
            if isinstance(st, (While, For)):
                for c in st.invariants:
                    out.add(node_fingerprint(c))
    return out


__all__ = [
    "Span", "Type", "TrustOrigin", "TrustTag", "UNTRUSTED",
    "UnaryOp", "BinaryOp", "QuantKind",
    "COMPARISON_OPS", "ARITH_OPS", "COMMUTATIVE_OPS",
    "Expr", "IntLit", "BoolLit", "Var", "Length", "Index", "ArrayLit",
    "Unary", "Binary", "Quantifier", "TRUE", "FALSE",
    "mk_not", "mk_and", "mk_implies", "conjoin", "implication_chain",
    "conjuncts_of", "walk_expr", "free_vars", "substitute", "normalize",
    "ClauseKind", "SpecClause", "Stmt", "VarDecl", "Assign", "CallStmt",
    "If", "While", "For", "Assert", "Assume", "Break",
    "Param", "Method", "Program", "Test",
    "walk_stmts", "assign_ids",
    "clause_signature", "stmt_signature", "node_fingerprint", "program_fingerprints",
]
