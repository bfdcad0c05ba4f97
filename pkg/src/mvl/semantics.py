"""Concrete evaluation of MVL expressions.

The evaluator is total over in-domain values: out-of-bounds array reads
return 0, and division/modulus follow the Euclidean convention (the
remainder is always non-negative).  Division by zero raises.
"""

from __future__ import annotations

from typing import Dict, Tuple, Union

from .errors import DivisionByZeroError, UnboundVariableError, UnsupportedConstruct
from .syntax import (
    ArrayLit,
    Binary,
    BinaryOp,
    BoolLit,
    Expr,
    Index,
    IntLit,
    Length,
    Quantifier,
    QuantKind,
    Unary,
    UnaryOp,
    Var,
)

Value = Union[int, bool, Tuple[int, ...]]
Env = Dict[str, Value]


def euclidean_div(a: int, b: int) -> int:
    if b == 0:
        raise DivisionByZeroError("division by zero")
    r = a % abs(b)
    return (a - r) // b


def euclidean_mod(a: int, b: int) -> int:
    if b == 0:
        raise DivisionByZeroError("modulus by zero")
    return a % abs(b)


def _lookup(env: Env, name: str) -> Value:
    try:
        return env[name]
    except KeyError:
        raise UnboundVariableError("unbound variable %r" % name) from None


def eval_expr(e: Expr, env: Env) -> Value:
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, Var):
        return _lookup(env, e.name)
    if isinstance(e, Length):
        arr = _lookup(env, e.base)
        return len(arr)  # type: ignore[arg-type]
    if isinstance(e, Index):
        arr = _lookup(env, e.base)
        i = eval_expr(e.index, env)
        if isinstance(arr, tuple) and 0 <= i < len(arr):  # type: ignore[operator]
            return arr[i]  # type: ignore[index]
        return 0
    if isinstance(e, ArrayLit):
        return tuple(int(eval_expr(el, env)) for el in e.elements)
    if isinstance(e, Unary):
        v = eval_expr(e.operand, env)
        if e.op == UnaryOp.NOT:
            return not v
        return -v  # type: ignore[operator]
    if isinstance(e, Binary):
        return _eval_binary(e, env)
    if isinstance(e, Quantifier):
        lo = eval_expr(e.lo, env)
        hi = eval_expr(e.hi, env)
        inner = dict(env)
        if e.kind == QuantKind.FORALL:
            for v in range(lo, hi):  # type: ignore[arg-type]
                inner[e.var] = v
                if not eval_expr(e.body, inner):
                    return False
            return True
        for v in range(lo, hi):  # type: ignore[arg-type]
            inner[e.var] = v
            if eval_expr(e.body, inner):
                return True
        return False
    raise UnsupportedConstruct("cannot evaluate %r" % (e,))


def _eval_binary(e: Binary, env: Env) -> Value:
    op = e.op
    # Short-circuit forms first so the other side may stay partial.
    if op == BinaryOp.AND:
        return bool(eval_expr(e.left, env)) and bool(eval_expr(e.right, env))
    if op == BinaryOp.OR:
        return bool(eval_expr(e.left, env)) or bool(eval_expr(e.right, env))
    if op == BinaryOp.IMPLIES:
        return (not eval_expr(e.left, env)) or bool(eval_expr(e.right, env))
    l = eval_expr(e.left, env)
    r = eval_expr(e.right, env)
    if op == BinaryOp.ADD:
        return l + r  # type: ignore[operator]
    if op == BinaryOp.SUB:
        return l - r  # type: ignore[operator]
    if op == BinaryOp.MUL:
        return l * r  # type: ignore[operator]
    if op == BinaryOp.DIV:
        return euclidean_div(l, r)  # type: ignore[arg-type]
    if op == BinaryOp.MOD:
        return euclidean_mod(l, r)  # type: ignore[arg-type]
    if op == BinaryOp.EQ:
        return l == r
    if op == BinaryOp.NE:
        return l != r
    if op == BinaryOp.LT:
        return l < r  # type: ignore[operator]
    if op == BinaryOp.LE:
        return l <= r  # type: ignore[operator]
    if op == BinaryOp.GT:
        return l > r  # type: ignore[operator]
    if op == BinaryOp.GE:
        return l >= r  # type: ignore[operator]
    raise UnsupportedConstruct("unknown operator %r" % op)


def compile_expr(e: Expr):
    """Compile an expression to a Python closure env -> value.

    Compiled closures skip the AST dispatch on every evaluation, which
    matters inside the brute-force enumeration loops.
    """
    if isinstance(e, IntLit):
        v = e.value
        return lambda env: v
    if isinstance(e, BoolLit):
        b = e.value
        return lambda env: b
    if isinstance(e, Var):
        name = e.name
        def f_var(env, name=name):
            try:
                return env[name]
            except KeyError:
                raise UnboundVariableError("unbound variable %r" % name) from None
        return f_var
    if isinstance(e, Length):
        base = e.base
        def f_len(env, base=base):
            try:
                return len(env[base])
            except KeyError:
                raise UnboundVariableError("unbound variable %r" % base) from None
        return f_len
    if isinstance(e, Index):
        base = e.base
        idx = compile_expr(e.index)
        def f_at(env, base=base, idx=idx):
            try:
                arr = env[base]
            except KeyError:
                raise UnboundVariableError("unbound variable %r" % base) from None
            i = idx(env)
            if 0 <= i < len(arr):
                return arr[i]
            return 0
        return f_at
    if isinstance(e, ArrayLit):
        els = [compile_expr(el) for el in e.elements]
        return lambda env: tuple(int(el(env)) for el in els)
    if isinstance(e, Unary):
        inner = compile_expr(e.operand)
        if e.op == UnaryOp.NOT:
            return lambda env: not inner(env)
        return lambda env: -inner(env)
    if isinstance(e, Binary):
        return _compile_binary(e)
    if isinstance(e, Quantifier):
        lo = compile_expr(e.lo)
        hi = compile_expr(e.hi)
        body = compile_expr(e.body)
        var = e.var
        if e.kind == QuantKind.FORALL:
            def f_forall(env, lo=lo, hi=hi, body=body, var=var):
                inner = dict(env)
                for v in range(lo(env), hi(env)):
                    inner[var] = v
                    if not body(inner):
                        return False
                return True
            return f_forall
        def f_exists(env, lo=lo, hi=hi, body=body, var=var):
            inner = dict(env)
            for v in range(lo(env), hi(env)):
                inner[var] = v
                if body(inner):
                    return True
            return False
        return f_exists
    raise UnsupportedConstruct("cannot compile %r" % (e,))


def _compile_binary(e: Binary):
    op = e.op
    l = compile_expr(e.left)
    r = compile_expr(e.right)
    if op == BinaryOp.AND:
        return lambda env: bool(l(env)) and bool(r(env))
    if op == BinaryOp.OR:
        return lambda env: bool(l(env)) or bool(r(env))
    if op == BinaryOp.IMPLIES:
        return lambda env: (not l(env)) or bool(r(env))
    if op == BinaryOp.ADD:
        return lambda env: l(env) + r(env)
    if op == BinaryOp.SUB:
        return lambda env: l(env) - r(env)
    if op == BinaryOp.MUL:
        return lambda env: l(env) * r(env)
    if op == BinaryOp.DIV:
        return lambda env: euclidean_div(l(env), r(env))
    if op == BinaryOp.MOD:
        return lambda env: euclidean_mod(l(env), r(env))
    if op == BinaryOp.EQ:
        return lambda env: l(env) == r(env)
    if op == BinaryOp.NE:
        return lambda env: l(env) != r(env)
    if op == BinaryOp.LT:
        return lambda env: l(env) < r(env)
    if op == BinaryOp.LE:
        return lambda env: l(env) <= r(env)
    if op == BinaryOp.GT:
        return lambda env: l(env) > r(env)
    if op == BinaryOp.GE:
        return lambda env: l(env) >= r(env)
    raise UnsupportedConstruct("unknown operator %r" % op)


__all__ = ["Value", "Env", "euclidean_div", "euclidean_mod", "eval_expr", "compile_expr"]
