"""Passification: lower a method into an acyclic assume/assert block graph.

Loops are desugared with the invariant havoc encoding: invariants are
asserted on entry, modified variables get fresh incarnations, the body
arm assumes invariants plus the guard and re-asserts the invariants at
the back edge (then cuts with assume false), and the exit arm assumes
invariants plus the negated guard.  A `break` asserts the invariants at
the break point and cuts; statements after it are unreachable.

All assignments become single-assignment equations (`x`, then `x$2`,
`x$3`, ...), so every resulting block is side-effect free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple, Union

from .errors import MvlTypeError, PathLimitError, UnsupportedConstruct
from .printer import expr_text
from .syntax import (
    Assert,
    Assign,
    Assume,
    Binary,
    BinaryOp,
    Break,
    CallStmt,
    ClauseKind,
    Expr,
    FALSE,
    For,
    If,
    Index,
    IntLit,
    Length,
    Method,
    Program,
    Quantifier,
    QuantKind,
    SpecClause,
    Span,
    Stmt,
    TRUE,
    Type,
    UNTRUSTED,
    Unary,
    UnaryOp,
    Var,
    VarDecl,
    While,
    conjuncts_of,
    free_vars,
    mk_not,
    node_fingerprint,
    substitute,
    walk_stmts,
)


class Role(Enum):
    REQUIRES = "requires"
    ASSIGN = "assign"
    PHI = "phi"
    BRANCH_THEN = "branch_then"
    BRANCH_ELSE = "branch_else"
    LOOP_GUARD = "loop_guard"
    LOOP_EXIT = "loop_exit"
    INV_ASSUME = "inv_assume"
    INV_ENTRY = "inv_entry"
    INV_MAINTAIN = "inv_maintain"
    ASSUME_USER = "assume_user"
    ASSERT_USER = "assert_user"
    POSTCONDITION = "postcondition"
    WF_CHECK = "wf_check"
    SIGNATURE_WF = "signature_wf"
    CALL_REQUIRES = "call_requires"
    CALL_ENSURES = "call_ensures"
    CUT = "cut"


ASSERT_ROLES = {
    Role.INV_ENTRY, Role.INV_MAINTAIN, Role.ASSERT_USER, Role.POSTCONDITION,
    Role.WF_CHECK, Role.SIGNATURE_WF, Role.CALL_REQUIRES,
}

# Assert roles whose top-level conjunctions are decomposed into separate
# verification obligations.  Well-formedness obligations stay whole.
SPLITTABLE_ROLES = {
    Role.INV_ENTRY, Role.INV_MAINTAIN, Role.ASSERT_USER,
    Role.POSTCONDITION, Role.CALL_REQUIRES,
}

OriginNode = Union[Stmt, SpecClause, None]


@dataclass
class PStmt:
    """One passified assume/assert with its link back to source."""

    is_assert: bool
    formula: Expr
    role: Role
    origin: OriginNode = None
    source_formula: Optional[Expr] = None
    span: Optional[Span] = None
    origin_sid: Optional[int] = None
    fingerprint: Optional[str] = None
    label: str = ""

    def render(self) -> str:
        head = "assert" if self.is_assert else "assume"
        return "%s %s" % (head, expr_text(self.formula))


@dataclass
class Block:
    bid: int
    stmts: List[PStmt] = field(default_factory=list)
    succs: List[int] = field(default_factory=list)


@dataclass
class PassifyResult:
    blocks: List[Block]
    paths: List[List[PStmt]]
    var_types: Dict[str, Type]


# ---------------------------------------------------------------------------
# Well-formedness obligations for array accesses


def wf_obligations(e: Expr) -> List[Tuple[Index, Expr]]:
    """Collect every array-index site in `e` with its bounds obligation.

    Obligations respect the evaluation context of the site: the left
    operand of `==>`, earlier `&&` conjuncts, and the negation of
    earlier `||` disjuncts guard the obligation, and sites under a
    quantifier are closed by a universal wrapper over the binder range.
    """
    sites: List[Tuple[Index, Expr]] = []

    def close(frames, core: Expr) -> Expr:
        out = core
        for frame in reversed(frames):
            if frame[0] == "ctx":
                out = Binary(BinaryOp.IMPLIES, frame[1], out)
            else:
                _, var, lo, hi = frame
                out = Quantifier(QuantKind.FORALL, var, lo, hi, out)
        return out

    def visit(e: Expr, frames) -> None:
        if isinstance(e, Index):
            core = Binary(
                BinaryOp.AND,
                Binary(BinaryOp.LE, IntLit(0), e.index),
                Binary(BinaryOp.LT, e.index, Length(e.base)),
            )
            sites.append((e, close(frames, core)))
            visit(e.index, frames)
        elif isinstance(e, Unary):
            visit(e.operand, frames)
        elif isinstance(e, Binary):
            if e.op == BinaryOp.AND or e.op == BinaryOp.IMPLIES:
                visit(e.left, frames)
                visit(e.right, frames + [("ctx", e.left)])
            elif e.op == BinaryOp.OR:
                visit(e.left, frames)
                visit(e.right, frames + [("ctx", mk_not(e.left))])
            else:
                visit(e.left, frames)
                visit(e.right, frames)
        elif isinstance(e, Quantifier):
            visit(e.lo, frames)
            visit(e.hi, frames)
            visit(e.body, frames + [("forall", e.var, e.lo, e.hi)])
        elif hasattr(e, "elements"):
            for el in e.elements:
                visit(el, frames)

    visit(e, [])
    return sites


# ---------------------------------------------------------------------------
# The passifier


class _Passifier:
    def __init__(self, program: Program, method: Method):
        self.program = program
        self.method = method
        self.blocks: List[Block] = []
        self.counts: Dict[str, int] = {}
        self.var_types: Dict[str, Type] = {}

    # -- naming ------------------------------------------------------------

    def fresh(self, name: str, ty: Optional[Type]) -> str:
        c = self.counts.get(name, 0) + 1
        self.counts[name] = c
        ssa = name if c == 1 else "%s$%d" % (name, c)
        self.var_types[ssa] = ty if ty is not None else Type.INT
        return ssa

    def rename(self, e: Expr, env: Dict[str, str]) -> Expr:
        mapping = {n: Var(s) for n, s in env.items() if n != s}
        needed = free_vars(e)
        mapping = {n: v for n, v in mapping.items() if n in needed}
        return substitute(e, mapping)

    # -- blocks ------------------------------------------------------------

    def new_block(self) -> Block:
        b = Block(len(self.blocks))
        self.blocks.append(b)
        return b

    def emit(self, block: Block, is_assert: bool, formula: Expr, role: Role,
             origin: OriginNode, source_formula: Optional[Expr], label: str) -> None:
        span = getattr(origin, "span", None) if origin is not None else None
        sid = getattr(origin, "sid", None) if origin is not None else None
        fp = node_fingerprint(origin) if origin is not None else None
        block.stmts.append(
            PStmt(is_assert, formula, role, origin, source_formula, span, sid, fp, label)
        )

    def emit_wf(self, block: Block, expr: Expr, env: Dict[str, str],
                origin: OriginNode, label: str) -> None:
        for _site, oblig in wf_obligations(expr):
            self.emit(block, True, self.rename(oblig, env), Role.WF_CHECK,
                      origin, oblig, "index in range for " + label)

    # -- lowering ----------------------------------------------------------

    def run(self) -> PassifyResult:
        m = self.method
        entry = self.new_block()
        env: Dict[str, str] = {}
        src_types: Dict[str, Type] = {}
        for p in list(m.params) + list(m.returns):
            env[p.name] = self.fresh(p.name, p.type)
            src_types[p.name] = p.type

        if m.requires:
            for c in m.requires:
                self.emit(entry, False, self.rename(c.expr, env), Role.REQUIRES,
                          c, c.expr, "requires")
        else:
            self.emit(entry, False, TRUE, Role.REQUIRES, None, None, "requires")

        def finish(block: Block, env: Dict[str, str]) -> None:
            for c in m.ensures:
                self.emit(block, True, self.rename(c.expr, env), Role.POSTCONDITION,
                          c, c.expr, "ensures")

        if m.body is not None:
            self.lower_body(m.body, entry, env, src_types, [], finish)
        else:
            finish(entry, env)

        paths = self.enumerate_paths()
        return PassifyResult(self.blocks, paths, self.var_types)

    def lower_body(self, stmts: List[Stmt], block: Block, env: Dict[str, str],
                   src_types: Dict[str, Type], loop_stack: List,
                   cont: Callable[[Block, Dict[str, str]], None]) -> None:
        """Lower `stmts` into `block`; `cont` receives each live exit."""
        if not stmts:
            cont(block, env)
            return
        st, rest = stmts[0], stmts[1:]
        tail = lambda b, e: self.lower_body(rest, b, e, src_types, loop_stack, cont)

        if isinstance(st, VarDecl):
            ty = st.type
            if st.init is not None:
                self.emit_wf(block, st.init, env, st, "var %s" % st.name)
                rhs = self.rename(st.init, env)
                if ty is None:
                    ty = self._infer(st.init, src_types)
                ssa = self.fresh(st.name, ty)
                src = self._assign_fact(st.name, st.init)
                self.emit(block, False, Binary(BinaryOp.EQ, Var(ssa), rhs),
                          Role.ASSIGN, st, src, "%s := %s" % (st.name, expr_text(st.init)))
            else:
                ssa = self.fresh(st.name, ty)
            env = dict(env)
            env[st.name] = ssa
            src_types = dict(src_types)
            src_types[st.name] = ty if ty is not None else Type.INT
            self.lower_body(rest, block, env, src_types, loop_stack, cont)
            return

        if isinstance(st, Assign):
            self.emit_wf(block, st.expr, env, st, "%s := ..." % st.name)
            rhs = self.rename(st.expr, env)
            ssa = self.fresh(st.name, src_types.get(st.name))
            src = self._assign_fact(st.name, st.expr)
            env = dict(env)
            env[st.name] = ssa
            self.emit(block, False, Binary(BinaryOp.EQ, Var(ssa), rhs),
                      Role.ASSIGN, st, src, "%s := %s" % (st.name, expr_text(st.expr)))
            tail(block, env)
            return

        if isinstance(st, CallStmt):
            self.lower_call(st, block, env, src_types, tail)
            return

        if isinstance(st, (Assert, Assume)):
            self.emit_wf(block, st.expr, env, st, "assert" if isinstance(st, Assert) else "assume")
            formula = self.rename(st.expr, env)
            if isinstance(st, Assert):
                self.emit(block, True, formula, Role.ASSERT_USER, st, st.expr, "assert")
            else:
                self.emit(block, False, formula, Role.ASSUME_USER, st, st.expr, "assume")
            tail(block, env)
            return

        if isinstance(st, Break):
            if not loop_stack:
                raise UnsupportedConstruct("break outside of a loop")
            invariants, _loop = loop_stack[-1]
            for c in invariants:
                self.emit(block, True, self.rename(c.expr, env), Role.INV_MAINTAIN,
                          c, c.expr, "invariant at break")
            self.emit(block, False, FALSE, Role.CUT, st, None, "break cuts path")
            # Statements after a break are unreachable; drop them.
            return

        if isinstance(st, If):
            self.emit_wf(block, st.cond, env, st, "if guard")
            then_b, else_b = self.new_block(), self.new_block()
            block.succs = [then_b.bid, else_b.bid]
            cond = self.rename(st.cond, env)
            self.emit(then_b, False, cond, Role.BRANCH_THEN, st, st.cond, "then branch")
            self.emit(else_b, False, mk_not(cond), Role.BRANCH_ELSE, st,
                      mk_not(st.cond), "else branch")
            exits: List[Tuple[Block, Dict[str, str]]] = []
            collect = lambda b, e: exits.append((b, e))
            self.lower_body(st.then_body, then_b, dict(env), dict(src_types),
                            loop_stack, collect)
            self.lower_body(st.else_body, else_b, dict(env), dict(src_types),
                            loop_stack, collect)
            if not exits:
                return
            if len(exits) == 1:
                b, e = exits[0]
                self.lower_body(rest, b, e, src_types, loop_stack, cont)
                return
            join = self.new_block()
            joined_env = dict(env)
            for name in env:
                incarnations = {e.get(name) for _, e in exits}
                if len(incarnations) > 1:
                    joined_env[name] = self.fresh(name, src_types.get(name))
            for b, e in exits:
                for name, joined in joined_env.items():
                    if e.get(name) != joined:
                        self.emit(b, False,
                                  Binary(BinaryOp.EQ, Var(joined), Var(e[name])),
                                  Role.PHI, st, None, "join %s" % name)
                b.succs = [join.bid]
            self.lower_body(rest, join, joined_env, src_types, loop_stack, cont)
            return

        if isinstance(st, While):
            self.lower_while(st, rest, block, env, src_types, loop_stack, cont)
            return

        if isinstance(st, For):
            self.lower_for(st, rest, block, env, src_types, loop_stack, cont)
            return

        raise UnsupportedConstruct("cannot passify %r" % (st,))

    def lower_call(self, st: CallStmt, block: Block, env: Dict[str, str],
                   src_types: Dict[str, Type],
                   tail: Callable[[Block, Dict[str, str]], None]) -> None:
        if not self.program.has_method(st.method):
            raise MvlTypeError("call to unknown method %r" % st.method)
        callee = self.program.method(st.method)
        if callee.name == self.method.name:
            raise UnsupportedConstruct("recursive call to %r" % st.method)
        for a in st.args:
            self.emit_wf(block, a, env, st, "call argument")
        ssa_args = [self.rename(a, env) for a in st.args]
        sigma = {p.name: a for p, a in zip(callee.params, ssa_args)}
        src_sigma = {p.name: a for p, a in zip(callee.params, st.args)}
        for c in callee.requires:
            self.emit(block, True, substitute(c.expr, sigma), Role.CALL_REQUIRES,
                      st, substitute(c.expr, src_sigma), "requires of %s" % callee.name)
        env = dict(env)
        src_types = dict(src_types)
        for t, r in zip(st.targets, callee.returns):
            env[t] = self.fresh(t, r.type)
            src_types[t] = r.type
        post_sigma = dict(sigma)
        src_post_sigma = dict(src_sigma)
        for t, r in zip(st.targets, callee.returns):
            post_sigma[r.name] = Var(env[t])
            src_post_sigma[r.name] = Var(t)
        for c in callee.ensures:
            self.emit(block, False, substitute(c.expr, post_sigma), Role.CALL_ENSURES,
                      st, substitute(c.expr, src_post_sigma), "ensures of %s" % callee.name)
        tail(block, env)

    def lower_while(self, st: While, rest: List[Stmt], block: Block,
                    env: Dict[str, str], src_types: Dict[str, Type],
                    loop_stack: List, cont) -> None:
        # Well-formedness of invariants, then their entry asserts, in the
        # pre-havoc state.
        for c in st.invariants:
            self.emit_wf(block, c.expr, env, c, "invariant")
            self.emit(block, True, self.rename(c.expr, env), Role.INV_ENTRY,
                      c, c.expr, "invariant on entry")
        modified = self._modified_names(st.body, set(env))
        havoc_env = dict(env)
        for name in modified:
            havoc_env[name] = self.fresh(name, src_types.get(name))

        body_b, exit_b = self.new_block(), self.new_block()
        block.succs = [body_b.bid, exit_b.bid]

        guard = self.rename(st.cond, havoc_env)
        for arm, polarity in ((body_b, True), (exit_b, False)):
            for c in st.invariants:
                self.emit(arm, False, self.rename(c.expr, havoc_env), Role.INV_ASSUME,
                          c, c.expr, "invariant inside loop")
            self.emit_wf(arm, st.cond, havoc_env, st, "loop guard")
            if polarity:
                self.emit(arm, False, guard, Role.LOOP_GUARD, st, st.cond, "loop guard")
            else:
                self.emit(arm, False, mk_not(guard), Role.LOOP_EXIT, st,
                          mk_not(st.cond), "loop exit")

        def backedge(b: Block, e: Dict[str, str]) -> None:
            for c in st.invariants:
                self.emit(b, True, self.rename(c.expr, e), Role.INV_MAINTAIN,
                          c, c.expr, "invariant maintained")
            self.emit(b, False, FALSE, Role.CUT, st, None, "back edge cuts path")

        self.lower_body(st.body, body_b, dict(havoc_env), dict(src_types),
                        loop_stack + [(st.invariants, st)], backedge)
        self.lower_body(rest, exit_b, havoc_env, src_types, loop_stack, cont)

    def lower_for(self, st: For, rest: List[Stmt], block: Block,
                  env: Dict[str, str], src_types: Dict[str, Type],
                  loop_stack: List, cont) -> None:
        """Desugar `for v := lo to hi` into init plus a while loop over
        [lo, hi) with an implicit bounds invariant."""
        bounds = SpecClause(
            ClauseKind.INVARIANT,
            Binary(BinaryOp.AND,
                   Binary(BinaryOp.LE, st.lo, Var(st.var)),
                   Binary(BinaryOp.LE, Var(st.var), st.hi)),
            UNTRUSTED,
            st.span,
        )
        bounds.sid = st.sid
        init = VarDecl(st.var, Type.INT, st.lo, UNTRUSTED, st.span)
        init.sid = st.sid
        loop = While(
            cond=Binary(BinaryOp.LT, Var(st.var), st.hi),
            invariants=[bounds] + list(st.invariants),
            decreases=None,
            body=st.body,
            trust=st.trust,
            span=st.span,
        )
        loop.sid = st.sid
        self.lower_body([init, loop] + rest, block, env, src_types, loop_stack, cont)

    # -- helpers -----------------------------------------------------------

    def _assign_fact(self, name: str, rhs: Expr) -> Expr:
        if name in free_vars(rhs):
            return TRUE
        return Binary(BinaryOp.EQ, Var(name), rhs)

    def _modified_names(self, body: List[Stmt], visible: set) -> List[str]:
        out: List[str] = []
        for s in walk_stmts(body):
            targets: List[str] = []
            if isinstance(s, Assign):
                targets = [s.name]
            elif isinstance(s, VarDecl):
                targets = [s.name]
            elif isinstance(s, CallStmt):
                targets = list(s.targets)
            elif isinstance(s, For):
                targets = [s.var]
            for t in targets:
                if t in visible and t not in out:
                    out.append(t)
        return out

    def _infer(self, e: Expr, src_types: Dict[str, Type]) -> Optional[Type]:
        if isinstance(e, IntLit):
            return Type.INT
        if isinstance(e, (Length, Index)):
            return Type.INT
        if isinstance(e, Var):
            return src_types.get(e.name)
        if isinstance(e, Unary):
            return Type.BOOL if e.op == UnaryOp.NOT else Type.INT
        if isinstance(e, Binary):
            if e.op in (BinaryOp.ADD, BinaryOp.SUB, BinaryOp.MUL,
                        BinaryOp.DIV, BinaryOp.MOD):
                return Type.INT
            return Type.BOOL
        if isinstance(e, Quantifier):
            return Type.BOOL
        if hasattr(e, "elements"):
            return Type.ARRAY_INT
        if hasattr(e, "value"):
            return Type.BOOL
        return None

    # -- path enumeration --------------------------------------------------

    def enumerate_paths(self, limit: int = 256) -> List[List[PStmt]]:
        counts: Dict[int, int] = {}

        def count(bid: int) -> int:
            if bid in counts:
                return counts[bid]
            b = self.blocks[bid]
            n = 1 if not b.succs else sum(count(s) for s in b.succs)
            counts[bid] = n
            return n

        total = count(0)
        if total > limit:
            raise PathLimitError(
                "method %s has %d verification paths (limit %d)"
                % (self.method.name, total, limit)
            )
        paths: List[List[PStmt]] = []

        def walk(bid: int, acc: List[PStmt]) -> None:
            b = self.blocks[bid]
            acc = acc + b.stmts
            if not b.succs:
                paths.append(acc)
                return
            for s in b.succs:
                walk(s, acc)

        walk(0, [])
        return paths


def passify_method(program: Program, method: Method) -> PassifyResult:
    return _Passifier(program, method).run()


def dump_blocks(blocks: List[Block]) -> str:
    """Render blocks in the verification-language surface form:
    `id: stmt; ...; goto id*`."""
    lines = []
    for b in blocks:
        stmts = "; ".join(s.render() for s in b.stmts) or "skip"
        gotos = " ".join("b%d" % s for s in b.succs)
        lines.append("b%d: %s; goto %s" % (b.bid, stmts, gotos) if gotos
                     else "b%d: %s" % (b.bid, stmts))
    return "\n".join(lines) + "\n"


__all__ = [
    "Role", "ASSERT_ROLES", "SPLITTABLE_ROLES", "PStmt", "Block",
    "PassifyResult", "wf_obligations", "passify_method", "dump_blocks",
]
