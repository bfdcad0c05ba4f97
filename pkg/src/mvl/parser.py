"""Recursive-descent parser for MVL programs and tests."""

from __future__ import annotations

from typing import List, Optional, Set, Tuple

from .errors import MvlSyntaxError, MvlTypeError, ShapeError
from .lexer import Token, tokenize
from .syntax import (
    Assert,
    Assign,
    Assume,
    ArrayLit,
    Binary,
    BinaryOp,
    BoolLit,
    Break,
    CallStmt,
    ClauseKind,
    Expr,
    For,
    If,
    Index,
    IntLit,
    Length,
    Method,
    Param,
    Program,
    Quantifier,
    QuantKind,
    SpecClause,
    Span,
    Stmt,
    Test,
    TrustOrigin,
    TrustTag,
    Type,
    UNTRUSTED,
    Unary,
    UnaryOp,
    Var,
    VarDecl,
    While,
    assign_ids,
    conjoin,
    free_vars,
    mk_implies,
    walk_stmts,
)

_CLAUSE_KEYWORDS = {
    "requires": ClauseKind.REQUIRES,
    "ensures": ClauseKind.ENSURES,
    "invariant": ClauseKind.INVARIANT,
    "decreases": ClauseKind.DECREASES,
}

_COMPARE_TOKENS = {
    "==": BinaryOp.EQ,
    "!=": BinaryOp.NE,
    "<": BinaryOp.LT,
    "<=": BinaryOp.LE,
    ">": BinaryOp.GT,
    ">=": BinaryOp.GE,
}


class _Parser:
    def __init__(self, source: str, source_name: str = ""):
        self.tokens, self.marker_lines = tokenize(source)
        self.pos = 0
        self.source_name = source_name

    # -- token plumbing ----------------------------------------------------

    def cur(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, ahead: int = 1) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        tok = self.cur()
        return tok.kind == kind and (value is None or tok.value == value)

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        tok = self.cur()
        if not self.at(kind, value):
            want = value if value is not None else kind
            raise MvlSyntaxError(
                "expected %r but found %r" % (want, tok.value or tok.kind), tok.line, tok.col
            )
        return self.advance()

    def accept(self, kind: str, value: Optional[str] = None) -> Optional[Token]:
        if self.at(kind, value):
            return self.advance()
        return None

    def last_line(self) -> int:
        if self.pos == 0:
            return 1
        return self.tokens[self.pos - 1].line

    def fail(self, message: str) -> MvlSyntaxError:
        tok = self.cur()
        return MvlSyntaxError(message, tok.line, tok.col)

    # -- trust tags --------------------------------------------------------

    def try_attribute(self) -> bool:
        """Parse an optional `{:trusted}` attribute."""
        if self.at("op", "{") and self.peek().kind == "op" and self.peek().value == ":":
            self.advance()
            self.advance()
            name = self.expect("ident")
            if name.value != "trusted":
                raise MvlSyntaxError("unknown attribute %r" % name.value, name.line, name.col)
            self.expect("op", "}")
            return True
        return False

    def trust_for(self, start_line: int, has_attr: bool) -> TrustTag:
        if has_attr:
            return TrustTag(True, TrustOrigin.USER)
        end_line = self.last_line()
        for ln in range(start_line, end_line + 1):
            if ln in self.marker_lines:
                return TrustTag(True, TrustOrigin.PATCHED)
        return UNTRUSTED

    # -- program structure -------------------------------------------------

    def parse_program(self) -> Program:
        methods: List[Method] = []
        while not self.at("eof"):
            methods.append(self.parse_method())
        program = Program(methods, self.source_name)
        seen = set()
        for m in program.methods:
            if m.name in seen:
                raise MvlSyntaxError("duplicate method name %r" % m.name,
                                     m.span.line if m.span else 1, 1)
            seen.add(m.name)
        assign_ids(program)
        _typecheck(program)
        return program

    def parse_method(self) -> Method:
        kw = self.expect("keyword", "method")
        name = self.expect("ident")
        self.expect("op", "(")
        params = self.parse_params()
        self.expect("op", ")")
        returns: List[Param] = []
        if self.accept("keyword", "returns"):
            self.expect("op", "(")
            returns = self.parse_params()
            self.expect("op", ")")
        requires: List[SpecClause] = []
        ensures: List[SpecClause] = []
        while self.at("keyword") and self.cur().value in ("requires", "ensures"):
            clause = self.parse_clause()
            if clause.kind == ClauseKind.REQUIRES:
                requires.append(clause)
            else:
                ensures.append(clause)
        if self.at("keyword") and self.cur().value in ("invariant", "decreases"):
            raise self.fail("%r clauses are only allowed on loops" % self.cur().value)
        body: Optional[List[Stmt]] = None
        body_line: Optional[int] = None
        if self.at("op", "{"):
            body_line = self.cur().line
            self.advance()
            body = self.parse_stmts_until_brace()
        return Method(
            name=name.value,
            params=params,
            returns=returns,
            requires=requires,
            ensures=ensures,
            body=body,
            span=Span(kw.line, kw.col),
            body_line=body_line,
        )

    def parse_params(self) -> List[Param]:
        params: List[Param] = []
        if self.at("op", ")"):
            return params
        while True:
            name = self.expect("ident")
            self.expect("op", ":")
            params.append(Param(name.value, self.parse_type()))
            if not self.accept("op", ","):
                break
        return params

    def parse_type(self) -> Type:
        if self.accept("keyword", "int"):
            return Type.INT
        if self.accept("keyword", "bool"):
            return Type.BOOL
        if self.accept("keyword", "array"):
            self.expect("op", "<")
            self.expect("keyword", "int")
            self.expect("op", ">")
            return Type.ARRAY_INT
        raise self.fail("expected a type")

    def parse_clause(self) -> SpecClause:
        kw = self.advance()
        kind = _CLAUSE_KEYWORDS[kw.value]
        has_attr = self.try_attribute()
        expr = self.parse_expr()
        self.accept("op", ";")
        trust = self.trust_for(kw.line, has_attr)
        return SpecClause(kind, expr, trust, Span(kw.line, kw.col, self.last_line()))

    # -- statements --------------------------------------------------------

    def parse_stmts_until_brace(self) -> List[Stmt]:
        stmts: List[Stmt] = []
        while not self.at("op", "}"):
            if self.at("eof"):
                raise self.fail("unexpected end of input inside a block")
            stmts.append(self.parse_stmt())
        self.expect("op", "}")
        return stmts

    def parse_stmt(self) -> Stmt:
        tok = self.cur()
        if tok.kind == "keyword":
            if tok.value == "var":
                return self.parse_var_decl()
            if tok.value == "if":
                return self.parse_if()
            if tok.value == "while":
                return self.parse_while()
            if tok.value == "for":
                return self.parse_for()
            if tok.value in ("assert", "assume"):
                return self.parse_assert_assume()
            if tok.value == "break":
                self.advance()
                self.expect("op", ";")
                return Break(trust=self.trust_for(tok.line, False), span=Span(tok.line, tok.col))
            raise self.fail("unexpected keyword %r" % tok.value)
        if tok.kind == "ident":
            return self.parse_assign_or_call()
        raise self.fail("expected a statement")

    def _is_call_ahead(self) -> bool:
        return self.at("ident") and self.peek().kind == "op" and self.peek().value == "("

    def parse_call_tail(self, targets: Tuple[str, ...], declares: bool,
                        start: Token, has_attr: bool) -> CallStmt:
        method = self.expect("ident")
        self.expect("op", "(")
        args: List[Expr] = []
        if not self.at("op", ")"):
            while True:
                args.append(self.parse_expr())
                if not self.accept("op", ","):
                    break
        self.expect("op", ")")
        self.expect("op", ";")
        return CallStmt(
            targets=targets,
            method=method.value,
            args=tuple(args),
            declares=declares,
            trust=self.trust_for(start.line, has_attr),
            span=Span(start.line, start.col, self.last_line()),
        )

    def parse_var_decl(self) -> Stmt:
        start = self.expect("keyword", "var")
        has_attr = self.try_attribute()
        names = [self.expect("ident").value]
        while self.accept("op", ","):
            names.append(self.expect("ident").value)
        if len(names) > 1:
            self.expect("op", ":=")
            return self.parse_call_tail(tuple(names), True, start, has_attr)
        ty: Optional[Type] = None
        if self.accept("op", ":"):
            ty = self.parse_type()
        init: Optional[Expr] = None
        if self.accept("op", ":="):
            if self._is_call_ahead():
                return self.parse_call_tail((names[0],), True, start, has_attr)
            init = self.parse_expr()
        self.expect("op", ";")
        return VarDecl(
            name=names[0],
            type=ty,
            init=init,
            trust=self.trust_for(start.line, has_attr),
            span=Span(start.line, start.col, self.last_line()),
        )

    def parse_assign_or_call(self) -> Stmt:
        start = self.cur()
        names = [self.expect("ident").value]
        while self.accept("op", ","):
            names.append(self.expect("ident").value)
        self.expect("op", ":=")
        if len(names) > 1 or self._is_call_ahead():
            return self.parse_call_tail(tuple(names), False, start, False)
        expr = self.parse_expr()
        self.expect("op", ";")
        return Assign(
            name=names[0],
            expr=expr,
            trust=self.trust_for(start.line, False),
            span=Span(start.line, start.col, self.last_line()),
        )

    def parse_if(self) -> If:
        start = self.expect("keyword", "if")
        cond = self.parse_expr()
        self.expect("op", "{")
        then_body = self.parse_stmts_until_brace()
        else_body: List[Stmt] = []
        if self.accept("keyword", "else"):
            if self.at("keyword", "if"):
                else_body = [self.parse_if()]
            else:
                self.expect("op", "{")
                else_body = self.parse_stmts_until_brace()
        return If(cond, then_body, else_body, span=Span(start.line, start.col))

    def parse_loop_clauses(self) -> Tuple[List[SpecClause], Optional[SpecClause]]:
        invariants: List[SpecClause] = []
        decreases: Optional[SpecClause] = None
        while self.at("keyword") and self.cur().value in ("invariant", "decreases"):
            clause = self.parse_clause()
            if clause.kind == ClauseKind.INVARIANT:
                invariants.append(clause)
            else:
                if decreases is not None:
                    raise self.fail("at most one decreases clause per loop")
                decreases = clause
        return invariants, decreases

    def parse_while(self) -> While:
        start = self.expect("keyword", "while")
        cond = self.parse_expr()
        invariants, decreases = self.parse_loop_clauses()
        self.expect("op", "{")
        body = self.parse_stmts_until_brace()
        return While(cond, invariants, decreases, body, span=Span(start.line, start.col))

    def parse_for(self) -> For:
        start = self.expect("keyword", "for")
        var = self.expect("ident")
        self.expect("op", ":=")
        lo = self.parse_expr()
        self.expect("keyword", "to")
        hi = self.parse_expr()
        invariants, _ = self.parse_loop_clauses()
        self.expect("op", "{")
        body = self.parse_stmts_until_brace()
        return For(var.value, lo, hi, invariants, body, span=Span(start.line, start.col))

    def parse_assert_assume(self) -> Stmt:
        start = self.advance()
        has_attr = self.try_attribute()
        expr = self.parse_expr()
        self.expect("op", ";")
        trust = self.trust_for(start.line, has_attr)
        span = Span(start.line, start.col, self.last_line())
        if start.value == "assert":
            return Assert(expr, trust, span)
        return Assume(expr, trust, span)

    # -- expressions -------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_implies()

    def parse_implies(self) -> Expr:
        left = self.parse_or()
        if self.accept("op", "==>"):
            right = self.parse_implies()
            return Binary(BinaryOp.IMPLIES, left, right)
        return left

    def parse_or(self) -> Expr:
        left = self.parse_and()
        while self.accept("op", "||"):
            left = Binary(BinaryOp.OR, left, self.parse_and())
        return left

    def parse_and(self) -> Expr:
        left = self.parse_cmp()
        while self.accept("op", "&&"):
            left = Binary(BinaryOp.AND, left, self.parse_cmp())
        return left

    def parse_cmp(self) -> Expr:
        first = self.parse_add()
        links: List[Tuple[BinaryOp, Expr]] = []
        while self.at("op") and self.cur().value in _COMPARE_TOKENS:
            op_tok = self.advance()
            links.append((_COMPARE_TOKENS[op_tok.value], self.parse_add()))
        if not links:
            return first
        if len(links) == 1:
            return Binary(links[0][0], first, links[0][1])
        ops = {op for op, _ in links}
        if not (ops <= {BinaryOp.LT, BinaryOp.LE} or ops <= {BinaryOp.GT, BinaryOp.GE}):
            raise self.fail("comparison chains must point in one direction")
        out: Optional[Expr] = None
        prev = first
        for op, operand in links:
            link = Binary(op, prev, operand)
            out = link if out is None else Binary(BinaryOp.AND, out, link)
            prev = operand
        return out  # type: ignore[return-value]

    def parse_add(self) -> Expr:
        left = self.parse_mul()
        while self.at("op") and self.cur().value in ("+", "-"):
            op = BinaryOp.ADD if self.advance().value == "+" else BinaryOp.SUB
            left = Binary(op, left, self.parse_mul())
        return left

    def parse_mul(self) -> Expr:
        left = self.parse_unary()
        while self.at("op") and self.cur().value in ("*", "/", "%"):
            tok = self.advance().value
            op = {"*": BinaryOp.MUL, "/": BinaryOp.DIV, "%": BinaryOp.MOD}[tok]
            left = Binary(op, left, self.parse_unary())
        return left

    def parse_unary(self) -> Expr:
        if self.accept("op", "!"):
            return Unary(UnaryOp.NOT, self.parse_unary())
        if self.accept("op", "-"):
            return Unary(UnaryOp.NEG, self.parse_unary())
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        expr = self.parse_primary()
        while True:
            if self.at("op", "."):
                dot = self.advance()
                member = self.expect("ident")
                if member.value != "Length":
                    raise MvlSyntaxError("unknown member %r" % member.value,
                                         member.line, member.col)
                if not isinstance(expr, Var):
                    raise MvlSyntaxError(".Length requires an array variable",
                                         dot.line, dot.col)
                expr = Length(expr.name)
            elif self.at("op", "["):
                bracket = self.advance()
                index = self.parse_expr()
                self.expect("op", "]")
                if not isinstance(expr, Var):
                    raise MvlSyntaxError("indexing requires an array variable",
                                         bracket.line, bracket.col)
                expr = Index(expr.name, index)
            else:
                return expr

    def parse_primary(self) -> Expr:
        tok = self.cur()
        if tok.kind == "int":
            self.advance()
            return IntLit(int(tok.value))
        if tok.kind == "keyword" and tok.value in ("true", "false"):
            self.advance()
            return BoolLit(tok.value == "true")
        if tok.kind == "keyword" and tok.value == "new":
            return self.parse_array_literal()
        if tok.kind == "keyword" and tok.value in ("forall", "exists"):
            return self.parse_quantifier()
        if tok.kind == "ident":
            self.advance()
            return Var(tok.value)
        if self.accept("op", "("):
            expr = self.parse_expr()
            self.expect("op", ")")
            return expr
        raise self.fail("expected an expression")

    def parse_array_literal(self) -> Expr:
        self.expect("keyword", "new")
        self.expect("keyword", "int")
        self.expect("op", "[")
        self.expect("op", "]")
        self.expect("op", "{")
        elements: List[Expr] = []
        if not self.at("op", "}"):
            while True:
                elements.append(self.parse_expr())
                if not self.accept("op", ","):
                    break
        self.expect("op", "}")
        return ArrayLit(tuple(elements))

    def parse_quantifier(self) -> Expr:
        kw = self.advance()
        kind = QuantKind.FORALL if kw.value == "forall" else QuantKind.EXISTS
        var = self.expect("ident")
        self.expect("op", "::")
        raw = self.parse_expr()
        return self._shape_quantifier(kind, var.value, raw, kw)

    def _shape_quantifier(self, kind: QuantKind, var: str, raw: Expr, kw: Token) -> Expr:
        def bad() -> MvlSyntaxError:
            shape = "lo <= %s < hi %s body" % (var, "==>" if kind == QuantKind.FORALL else "&&")
            return MvlSyntaxError(
                "%s must have the form %s :: %s" % (kw.value, var, shape), kw.line, kw.col
            )

        if kind == QuantKind.FORALL:
            if not (isinstance(raw, Binary) and raw.op == BinaryOp.IMPLIES):
                raise bad()
            range_part, body = raw.left, raw.right
            extra, lo, hi = self._split_range(range_part, var)
            if lo is None:
                raise bad()
            if extra is not None:
                body = mk_implies(extra, body)
            return Quantifier(kind, var, lo, hi, body)
        # exists: range conjuncts then body conjuncts
        parts = _and_chain(raw)
        if len(parts) < 3:
            raise bad()
        range_expr = Binary(BinaryOp.AND, parts[0], parts[1])
        extra, lo, hi = self._split_range(range_expr, var)
        if lo is None or extra is not None:
            raise bad()
        body = conjoin(parts[2:])
        return Quantifier(kind, var, lo, hi, body)

    def _split_range(self, range_part: Expr, var: str):
        """Match `lo <= var` and `var < hi` among leading conjuncts.

        Returns (extra_conjuncts, lo, hi); lo is None when the shape
        does not match.
        """
        parts = _and_chain(range_part)
        if len(parts) < 2:
            return None, None, None
        lower, upper = parts[0], parts[1]
        ok = (
            isinstance(lower, Binary)
            and lower.op == BinaryOp.LE
            and lower.right == Var(var)
            and isinstance(upper, Binary)
            and upper.op == BinaryOp.LT
            and upper.left == Var(var)
        )
        if not ok:
            return None, None, None
        extra = conjoin(parts[2:]) if len(parts) > 2 else None
        return extra, lower.left, upper.right


def _and_chain(e: Expr) -> List[Expr]:
    if isinstance(e, Binary) and e.op == BinaryOp.AND:
        return _and_chain(e.left) + _and_chain(e.right)
    return [e]


# ---------------------------------------------------------------------------
# Light typechecking / scoping


def _typecheck(program: Program) -> None:
    for m in program.methods:
        _check_method(program, m)


def _check_method(program: Program, m: Method) -> None:
    params = {p.name: p.type for p in m.params}
    rets = {r.name: r.type for r in m.returns}
    for c in m.requires:
        bad = free_vars(c.expr) - set(params)
        if bad:
            raise MvlTypeError(
                "requires of %s mentions non-parameter %r" % (m.name, sorted(bad)[0])
            )
    for c in m.ensures:
        bad = free_vars(c.expr) - set(params) - set(rets)
        if bad:
            raise MvlTypeError(
                "ensures of %s mentions unknown name %r" % (m.name, sorted(bad)[0])
            )
    if m.body is None:
        return
    scope = dict(params)
    scope.update(rets)
    _check_body(program, m, m.body, scope)


def _check_body(program: Program, m: Method, body: List[Stmt], scope) -> None:
    for st in body:
        if isinstance(st, VarDecl):
            ty = st.type
            if st.init is not None:
                _check_scope(st.init, scope, st)
                if ty is None:
                    ty = _infer_type(st.init, scope)
            scope[st.name] = ty
        elif isinstance(st, Assign):
            if st.name not in scope:
                raise MvlTypeError("assignment to undeclared variable %r" % st.name)
            _check_scope(st.expr, scope, st)
        elif isinstance(st, CallStmt):
            for a in st.args:
                _check_scope(a, scope, st)
            callee = None
            if program.has_method(st.method):
                callee = program.method(st.method)
            if callee is not None and len(callee.returns) != len(st.targets):
                raise MvlTypeError(
                    "call to %s expects %d targets" % (st.method, len(callee.returns))
                )
            if callee is not None and len(callee.params) != len(st.args):
                raise MvlTypeError(
                    "call to %s expects %d arguments" % (st.method, len(callee.params))
                )
            for i, t in enumerate(st.targets):
                if st.declares:
                    ty = callee.returns[i].type if callee is not None else None
                    scope[t] = ty
                elif t not in scope:
                    raise MvlTypeError("assignment to undeclared variable %r" % t)
        elif isinstance(st, If):
            _check_scope(st.cond, scope, st)
            _check_body(program, m, st.then_body, dict(scope))
            _check_body(program, m, st.else_body, dict(scope))
        elif isinstance(st, While):
            _check_scope(st.cond, scope, st)
            for c in st.invariants:
                _check_scope(c.expr, scope, st)
            if st.decreases is not None:
                _check_scope(st.decreases.expr, scope, st)
            _check_body(program, m, st.body, dict(scope))
        elif isinstance(st, For):
            _check_scope(st.lo, scope, st)
            _check_scope(st.hi, scope, st)
            inner = dict(scope)
            inner[st.var] = Type.INT
            for c in st.invariants:
                _check_scope(c.expr, inner, st)
            _check_body(program, m, st.body, inner)
        elif isinstance(st, (Assert, Assume)):
            _check_scope(st.expr, scope, st)
        elif isinstance(st, Break):
            pass


def _check_scope(e: Expr, scope, st: Stmt) -> None:
    line = st.span.line if st.span else 0
    for name in sorted(free_vars(e)):
        if name not in scope:
            raise MvlTypeError("line %d: use of undeclared variable %r" % (line, name))


def _infer_type(e: Expr, scope) -> Optional[Type]:
    if isinstance(e, IntLit):
        return Type.INT
    if isinstance(e, BoolLit):
        return Type.BOOL
    if isinstance(e, ArrayLit):
        return Type.ARRAY_INT
    if isinstance(e, Var):
        return scope.get(e.name)
    if isinstance(e, Length):
        return Type.INT
    if isinstance(e, Index):
        return Type.INT
    if isinstance(e, Unary):
        return Type.BOOL if e.op == UnaryOp.NOT else Type.INT
    if isinstance(e, Binary):
        if e.op in (BinaryOp.ADD, BinaryOp.SUB, BinaryOp.MUL, BinaryOp.DIV, BinaryOp.MOD):
            return Type.INT
        return Type.BOOL
    if isinstance(e, Quantifier):
        return Type.BOOL
    return None


# ---------------------------------------------------------------------------
# Public entry points


def parse_program(source: str, source_name: str = "") -> Program:
    return _Parser(source, source_name).parse_program()


def parse_expr(source: str) -> Expr:
    """Parse a standalone expression; the whole input must be consumed."""
    p = _Parser(source)
    expr = p.parse_expr()
    p.expect("eof")
    return expr


def _is_literal(e: Expr) -> bool:
    if isinstance(e, (IntLit, BoolLit)):
        return True
    if isinstance(e, Unary) and e.op == UnaryOp.NEG:
        return _is_literal(e.operand)
    if isinstance(e, ArrayLit):
        return all(_is_literal(el) for el in e.elements)
    return False


def parse_test(source: str, source_name: str = "") -> Test:
    """Parse a test file: a single parameterless method whose body is
    literal variable setup, exactly one call, then oracle asserts."""
    program = parse_program(source, source_name)
    if len(program.methods) != 1:
        raise ShapeError("a test file must contain exactly one method")
    m = program.methods[0]
    if m.params or m.returns or m.requires or m.ensures:
        raise ShapeError("test method %s must be parameterless and unspecified" % m.name)
    if m.body is None:
        raise ShapeError("test method %s must have a body" % m.name)

    inputs: List[Tuple[str, Expr]] = []
    call: Optional[CallStmt] = None
    oracle: List[Expr] = []
    for st in m.body:
        if isinstance(st, CallStmt):
            if call is not None:
                raise ShapeError("exactly one call expected in test %s" % m.name)
            call = st
            continue
        if call is None:
            if not isinstance(st, VarDecl) or st.init is None:
                raise ShapeError("test %s setup must be literal var declarations" % m.name)
            if not _is_literal(st.init):
                raise ShapeError("test %s input %r must be a literal" % (m.name, st.name))
            inputs.append((st.name, st.init))
        else:
            if not isinstance(st, Assert):
                raise ShapeError("statements after the call in test %s must be asserts" % m.name)
            oracle.append(st.expr)
    if call is None:
        raise ShapeError("test %s must call a method" % m.name)
    known = {name for name, _ in inputs} | set(call.targets)
    for o in oracle:
        bad = free_vars(o) - known
        if bad:
            raise ShapeError("oracle of %s mentions unknown name %r" % (m.name, sorted(bad)[0]))
    return Test(
        name=m.name,
        inputs=inputs,
        call_method=call.method,
        call_args=call.args,
        results=call.targets,
        oracle=oracle,
        source_name=source_name,
    )


__all__ = ["parse_program", "parse_expr", "parse_test"]
