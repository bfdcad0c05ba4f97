"""Canonical pretty-printer for MVL ASTs.

Printing then reparsing yields a structurally equal AST (including trust
tags); the printed text is also the canonical form used to deduplicate
candidate sources.
"""

from __future__ import annotations

from typing import List

from .lexer import PATCH_MARKER
from .syntax import (
    ArrayLit,
    Assert,
    Assign,
    Assume,
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
    Program,
    Quantifier,
    QuantKind,
    SpecClause,
    Stmt,
    TrustOrigin,
    TrustTag,
    Unary,
    UnaryOp,
    Var,
    VarDecl,
    While,
)

_PREC = {
    BinaryOp.IMPLIES: 1,
    BinaryOp.OR: 2,
    BinaryOp.AND: 3,
    BinaryOp.EQ: 4, BinaryOp.NE: 4, BinaryOp.LT: 4,
    BinaryOp.LE: 4, BinaryOp.GT: 4, BinaryOp.GE: 4,
    BinaryOp.ADD: 5, BinaryOp.SUB: 5,
    BinaryOp.MUL: 6, BinaryOp.DIV: 6, BinaryOp.MOD: 6,
}
_UNARY_PREC = 7


def expr_text(e: Expr, min_prec: int = 0) -> str:
    """Render an expression, parenthesizing where the context binds
    tighter than the expression itself."""
    text, prec = _render(e)
    if prec < min_prec:
        return "(" + text + ")"
    return text


def _render(e: Expr):
    if isinstance(e, IntLit):
        return str(e.value), 9
    if isinstance(e, BoolLit):
        return ("true" if e.value else "false"), 9
    if isinstance(e, Var):
        return e.name, 9
    if isinstance(e, Length):
        return "%s.Length" % e.base, 8
    if isinstance(e, Index):
        return "%s[%s]" % (e.base, expr_text(e.index)), 8
    if isinstance(e, ArrayLit):
        return "new int[]{%s}" % ", ".join(expr_text(el) for el in e.elements), 8
    if isinstance(e, Unary):
        op = "!" if e.op == UnaryOp.NOT else "-"
        return op + expr_text(e.operand, _UNARY_PREC), _UNARY_PREC
    if isinstance(e, Binary):
        prec = _PREC[e.op]
        if e.op == BinaryOp.IMPLIES:
            # right-associative
            left = expr_text(e.left, prec + 1)
            right = expr_text(e.right, prec)
        elif e.op in (BinaryOp.EQ, BinaryOp.NE, BinaryOp.LT, BinaryOp.LE,
                      BinaryOp.GT, BinaryOp.GE):
            # non-associative
            left = expr_text(e.left, prec + 1)
            right = expr_text(e.right, prec + 1)
        else:
            left = expr_text(e.left, prec)
            right = expr_text(e.right, prec + 1)
        return "%s %s %s" % (left, e.op.value, right), prec
    if isinstance(e, Quantifier):
        lo = expr_text(e.lo, _PREC[BinaryOp.LE] + 1)
        hi = expr_text(e.hi, _PREC[BinaryOp.LT] + 1)
        rng = "%s <= %s < %s" % (lo, e.var, hi)
        if e.kind == QuantKind.FORALL:
            body = expr_text(e.body, 0)
            return "forall %s :: %s ==> %s" % (e.var, rng, body), 0
        body = expr_text(e.body, _PREC[BinaryOp.AND])
        return "exists %s :: %s && %s" % (e.var, rng, body), 0
    raise TypeError("cannot print %r" % (e,))


def _suffix(trust: TrustTag) -> str:
    if trust.trusted and trust.origin == TrustOrigin.PATCHED:
        return " " + PATCH_MARKER
    return ""


def _attr(trust: TrustTag) -> str:
    if trust.trusted and trust.origin == TrustOrigin.USER:
        return "{:trusted} "
    return ""


def clause_text(c: SpecClause) -> str:
    return "%s %s%s%s" % (c.kind.value, _attr(c.trust), expr_text(c.expr), _suffix(c.trust))


def stmt_lines(st: Stmt, indent: int) -> List[str]:
    pad = "  " * indent
    if isinstance(st, VarDecl):
        parts = ["var ", _attr(st.trust), st.name]
        if st.type is not None:
            parts.append(": %s" % st.type.value)
        if st.init is not None:
            parts.append(" := %s" % expr_text(st.init))
        return [pad + "".join(parts) + ";" + _suffix(st.trust)]
    if isinstance(st, Assign):
        return [pad + "%s := %s;%s" % (st.name, expr_text(st.expr), _suffix(st.trust))]
    if isinstance(st, CallStmt):
        head = "var " if st.declares else ""
        args = ", ".join(expr_text(a) for a in st.args)
        return [pad + "%s%s := %s(%s);%s" % (head, ", ".join(st.targets),
                                             st.method, args, _suffix(st.trust))]
    if isinstance(st, Assert):
        return [pad + "assert %s%s;%s" % (_attr(st.trust), expr_text(st.expr), _suffix(st.trust))]
    if isinstance(st, Assume):
        return [pad + "assume %s%s;%s" % (_attr(st.trust), expr_text(st.expr), _suffix(st.trust))]
    if isinstance(st, Break):
        return [pad + "break;" + _suffix(st.trust)]
    if isinstance(st, If):
        lines = [pad + "if %s {" % expr_text(st.cond)]
        for s in st.then_body:
            lines.extend(stmt_lines(s, indent + 1))
        if st.else_body:
            if len(st.else_body) == 1 and isinstance(st.else_body[0], If):
                nested = stmt_lines(st.else_body[0], indent)
                nested[0] = pad + "} else " + nested[0].lstrip()
                lines.extend(nested)
                return lines
            lines.append(pad + "} else {")
            for s in st.else_body:
                lines.extend(stmt_lines(s, indent + 1))
        lines.append(pad + "}")
        return lines
    if isinstance(st, While):
        lines = [pad + "while %s" % expr_text(st.cond)]
        for c in st.invariants:
            lines.append(pad + "  " + clause_text(c))
        if st.decreases is not None:
            lines.append(pad + "  " + clause_text(st.decreases))
        lines.append(pad + "{")
        for s in st.body:
            lines.extend(stmt_lines(s, indent + 1))
        lines.append(pad + "}")
        return lines
    if isinstance(st, For):
        lines = [pad + "for %s := %s to %s" % (st.var, expr_text(st.lo), expr_text(st.hi))]
        for c in st.invariants:
            lines.append(pad + "  " + clause_text(c))
        lines.append(pad + "{")
        for s in st.body:
            lines.extend(stmt_lines(s, indent + 1))
        lines.append(pad + "}")
        return lines
    raise TypeError("cannot print %r" % (st,))


def method_lines(m: Method) -> List[str]:
    sig = "method %s(%s)" % (
        m.name,
        ", ".join("%s: %s" % (p.name, p.type.value) for p in m.params),
    )
    if m.returns:
        sig += " returns (%s)" % ", ".join(
            "%s: %s" % (r.name, r.type.value) for r in m.returns
        )
    lines = [sig]
    for c in m.requires:
        lines.append("  " + clause_text(c))
    for c in m.ensures:
        lines.append("  " + clause_text(c))
    if m.body is not None:
        lines.append("{")
        for st in m.body:
            lines.extend(stmt_lines(st, 1))
        lines.append("}")
    return lines


def program_text(p: Program) -> str:
    chunks: List[str] = []
    for m in p.methods:
        chunks.append("\n".join(method_lines(m)))
    if not chunks:
        return ""
    return "\n\n".join(chunks) + "\n"


__all__ = ["expr_text", "clause_text", "stmt_lines", "method_lines", "program_text"]
