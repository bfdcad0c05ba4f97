"""Validity checking for closed verification formulas.

Two backends: a builtin bounded enumerator that brute-forces every
assignment inside a finite domain (ints in a small range, arrays up to
a small length), and an external SMT-LIB2 solver driven over a
subprocess pipe.  The bounded verdict "valid" means valid within the
enumerated bounds.
"""

from __future__ import annotations

import shlex
import subprocess
import time
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import (
    BackendUnavailableError,
    DivisionByZeroError,
    MalformedModelError,
    ShapeError,
    UnboundVariableError,
)
from .semantics import Value, compile_expr, eval_expr
from .syntax import (
    Binary,
    BinaryOp,
    BoolLit,
    Expr,
    Index,
    IntLit,
    Length,
    Quantifier,
    QuantKind,
    Type,
    Unary,
    UnaryOp,
    Var,
    free_vars,
    normalize,
)


class ValidityStatus(Enum):
    VALID = "valid"
    INVALID = "invalid"
    UNKNOWN = "unknown"


@dataclass
class Verdict:
    status: ValidityStatus
    witness: Optional[Dict[str, Value]] = None
    backend: str = "bounded"
    elapsed: float = 0.0
    reason: str = ""

    @property
    def is_valid(self) -> bool:
        return self.status == ValidityStatus.VALID

    @property
    def is_invalid(self) -> bool:
        return self.status == ValidityStatus.INVALID


@dataclass(frozen=True)
class BoundedDomain:
    """Finite search space: ints in [int_lo, int_hi], arrays of length
    up to max_array_len with elements from the same range."""

    int_lo: int = -4
    int_hi: int = 4
    max_array_len: int = 3

    def __post_init__(self):
        if self.int_lo > self.int_hi:
            raise ShapeError("empty int range")
        if self.max_array_len < 0:
            raise ShapeError("negative max_array_len")

    def ints(self) -> range:
        return range(self.int_lo, self.int_hi + 1)

    def arrays(self) -> List[Tuple[int, ...]]:
        out: List[Tuple[int, ...]] = []
        for n in range(self.max_array_len + 1):
            out.extend(product(self.ints(), repeat=n))
        return out

    def values_for(self, ty: Type) -> Sequence[Value]:
        if ty == Type.BOOL:
            return (False, True)
        if ty == Type.ARRAY_INT:
            return _arrays_cache(self)
        return self.ints()

    def default_for(self, ty: Type) -> Value:
        if ty == Type.BOOL:
            return False
        if ty == Type.ARRAY_INT:
            return ()
        return self.int_lo


_ARRAYS: Dict[BoundedDomain, List[Tuple[int, ...]]] = {}


def _arrays_cache(domain: BoundedDomain) -> List[Tuple[int, ...]]:
    got = _ARRAYS.get(domain)
    if got is None:
        got = domain.arrays()
        _ARRAYS[domain] = got
    return got


def _implication_spine(vc: Expr) -> Tuple[List[Expr], Expr]:
    antecedents: List[Expr] = []
    e = vc
    while isinstance(e, Binary) and e.op == BinaryOp.IMPLIES:
        antecedents.append(e.left)
        e = e.right
    return antecedents, e


def _ordered_vars(parts: List[Expr]) -> List[str]:
    order: List[str] = []
    seen = set()

    def visit(e: Expr, bound: frozenset) -> None:
        if isinstance(e, Var):
            if e.name not in bound and e.name not in seen:
                seen.add(e.name)
                order.append(e.name)
        elif isinstance(e, (Length, Index)):
            if e.base not in bound and e.base not in seen:
                seen.add(e.base)
                order.append(e.base)
            if isinstance(e, Index):
                visit(e.index, bound)
        elif isinstance(e, Unary):
            visit(e.operand, bound)
        elif isinstance(e, Binary):
            visit(e.left, bound)
            visit(e.right, bound)
        elif isinstance(e, Quantifier):
            visit(e.lo, bound)
            visit(e.hi, bound)
            visit(e.body, bound | {e.var})
        elif hasattr(e, "elements"):
            for el in e.elements:
                visit(el, bound)

    for p in parts:
        visit(p, frozenset())
    return order


class BoundedChecker:
    """Backtracking enumerator over a BoundedDomain.

    The implication spine of the formula is split into antecedents and a
    target; each antecedent is evaluated as soon as its variables are
    assigned, pruning the whole subtree when one is false.
    """

    def __init__(self, domain: Optional[BoundedDomain] = None):
        self.domain = domain if domain is not None else BoundedDomain()
        self._cache: Dict[str, Verdict] = {}

    def check(self, vc: Expr, var_types: Dict[str, Type]) -> Verdict:
        key = normalize(vc)
        got = self._cache.get(key)
        if got is not None:
            return got
        t0 = time.monotonic()
        verdict = self._check(vc, var_types)
        verdict.elapsed = time.monotonic() - t0
        self._cache[key] = verdict
        return verdict

    def _check(self, vc: Expr, var_types: Dict[str, Type]) -> Verdict:
        antecedents, target = _implication_spine(vc)
        parts = antecedents + [target]
        order = _ordered_vars(parts)
        index = {v: i for i, v in enumerate(order)}

        fns = [compile_expr(p) for p in parts]
        ready_at: List[int] = []
        for p in parts:
            fv = free_vars(p)
            ready_at.append(max((index[v] for v in fv), default=-1))
        target_depth = max(ready_at, default=-1)

        by_depth: Dict[int, List[int]] = {}
        for i in range(len(antecedents)):
            by_depth.setdefault(ready_at[i], []).append(i)

        unknown = False
        env: Dict[str, Value] = {}

        def eval_part(i: int) -> Optional[bool]:
            nonlocal unknown
            try:
                return bool(fns[i](env))
            except (DivisionByZeroError, UnboundVariableError):
                unknown = True
                return None

        # Antecedents and possibly the target with no free variables.
        for i in by_depth.get(-1, []):
            r = eval_part(i)
            if r is False:
                return Verdict(ValidityStatus.VALID)
            if r is None:
                return Verdict(ValidityStatus.UNKNOWN,
                               reason="evaluation error in closed antecedent")
        if target_depth == -1:
            r = eval_part(len(parts) - 1)
            if r is False:
                return Verdict(ValidityStatus.INVALID, witness={})
            if r is None:
                return Verdict(ValidityStatus.UNKNOWN,
                               reason="evaluation error in closed target")
            return Verdict(ValidityStatus.VALID)

        domains = [self.domain.values_for(var_types.get(v, Type.INT))
                   for v in order]

        def search(d: int) -> Optional[Dict[str, Value]]:
            name = order[d]
            checks = by_depth.get(d, [])
            at_target = d == target_depth
            for val in domains[d]:
                env[name] = val
                ok = True
                for i in checks:
                    r = eval_part(i)
                    if r is not True:
                        ok = False
                        break
                if not ok:
                    continue
                if at_target:
                    r = eval_part(len(parts) - 1)
                    if r is False:
                        return dict(env)
                else:
                    w = search(d + 1)
                    if w is not None:
                        return w
            del env[name]
            return None

        witness = search(0)
        if witness is not None:
            for v in order:
                if v not in witness:
                    witness[v] = self.domain.default_for(var_types.get(v, Type.INT))
            return Verdict(ValidityStatus.INVALID, witness=witness)
        if unknown:
            return Verdict(ValidityStatus.UNKNOWN,
                           reason="evaluation error on some assignments")
        return Verdict(ValidityStatus.VALID)


# ---------------------------------------------------------------------------
# SMT-LIB2 subprocess backend


_SMT_OPS = {
    BinaryOp.ADD: "+", BinaryOp.SUB: "-", BinaryOp.MUL: "*",
    BinaryOp.DIV: "div", BinaryOp.MOD: "mod",
    BinaryOp.EQ: "=", BinaryOp.LT: "<", BinaryOp.LE: "<=",
    BinaryOp.GT: ">", BinaryOp.GE: ">=",
    BinaryOp.AND: "and", BinaryOp.OR: "or", BinaryOp.IMPLIES: "=>",
}


def _smt_int(n: int) -> str:
    return str(n) if n >= 0 else "(- %d)" % -n


def expr_to_smt(e: Expr) -> str:
    if isinstance(e, IntLit):
        return _smt_int(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Length):
        return "%s$len" % e.base
    if isinstance(e, Index):
        return "(%s$elem %s)" % (e.base, expr_to_smt(e.index))
    if isinstance(e, Unary):
        if e.op == UnaryOp.NOT:
            return "(not %s)" % expr_to_smt(e.operand)
        return "(- %s)" % expr_to_smt(e.operand)
    if isinstance(e, Binary):
        if e.op == BinaryOp.NE:
            return "(not (= %s %s))" % (expr_to_smt(e.left), expr_to_smt(e.right))
        return "(%s %s %s)" % (_SMT_OPS[e.op], expr_to_smt(e.left),
                               expr_to_smt(e.right))
    if isinstance(e, Quantifier):
        rng = "(and (<= %s %s) (< %s %s))" % (
            expr_to_smt(e.lo), e.var, e.var, expr_to_smt(e.hi))
        if e.kind == QuantKind.FORALL:
            return "(forall ((%s Int)) (=> %s %s))" % (
                e.var, rng, expr_to_smt(e.body))
        return "(exists ((%s Int)) (and %s %s))" % (
            e.var, rng, expr_to_smt(e.body))
    raise ValueError("cannot translate %r to SMT" % (e,))


def smt_script(vc: Expr, var_types: Dict[str, Type]) -> str:
    lines = ["(set-logic ALL)"]
    for name in sorted(var_types):
        ty = var_types[name]
        if ty == Type.ARRAY_INT:
            lines.append("(declare-const %s$len Int)" % name)
            lines.append("(declare-fun %s$elem (Int) Int)" % name)
            lines.append("(assert (>= %s$len 0))" % name)
            lines.append(
                "(assert (forall ((i Int)) (=> (or (< i 0) (>= i %s$len)) "
                "(= (%s$elem i) 0))))" % (name, name))
        elif ty == Type.BOOL:
            lines.append("(declare-const %s Bool)" % name)
        else:
            lines.append("(declare-const %s Int)" % name)
    lines.append("(assert (not %s))" % expr_to_smt(vc))
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def _tokenize_sexpr(text: str) -> List[str]:
    out: List[str] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in "()":
            out.append(c)
            i += 1
        elif c.isspace():
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        else:
            j = i
            while j < n and text[j] not in "() \t\r\n;":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def _parse_sexprs(tokens: List[str]):
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise MalformedModelError("unbalanced model s-expression")
        t = tokens[pos]
        pos += 1
        if t == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(parse())
            if pos >= len(tokens):
                raise MalformedModelError("unbalanced model s-expression")
            pos += 1
            return items
        if t == ")":
            raise MalformedModelError("unexpected ')' in model")
        return t

    out = []
    while pos < len(tokens):
        out.append(parse())
    return out


def _eval_model_expr(sx, env: Dict[str, Value]) -> Value:
    if isinstance(sx, str):
        if sx == "true":
            return True
        if sx == "false":
            return False
        try:
            return int(sx)
        except ValueError:
            if sx in env:
                return env[sx]
            raise MalformedModelError("unbound symbol %r in model" % sx)
    if not sx:
        raise MalformedModelError("empty model expression")
    head = sx[0]
    args = [_eval_model_expr(a, env) for a in sx[1:]]
    if head == "ite":
        return args[1] if args[0] else args[2]
    if head == "=":
        return args[0] == args[1]
    if head == "not":
        return not args[0]
    if head == "and":
        return all(args)
    if head == "or":
        return any(args)
    if head == "+":
        return sum(args)
    if head == "-":
        return -args[0] if len(args) == 1 else args[0] - args[1]
    if head == "*":
        r = 1
        for a in args:
            r *= a
        return r
    if head == "<=":
        return args[0] <= args[1]
    if head == "<":
        return args[0] < args[1]
    if head == ">=":
        return args[0] >= args[1]
    if head == ">":
        return args[0] > args[1]
    if head == "div":
        from .semantics import euclidean_div
        return euclidean_div(args[0], args[1])
    if head == "mod":
        from .semantics import euclidean_mod
        return euclidean_mod(args[0], args[1])
    raise MalformedModelError("unsupported model operator %r" % head)


_MAX_MODEL_ARRAY_LEN = 10000


def parse_model(text: str, var_types: Dict[str, Type]) -> Dict[str, Value]:
    """Reconstruct a witness assignment from a `(get-model)` reply."""
    forms = _parse_sexprs(_tokenize_sexpr(text))
    defs: Dict[str, Tuple[List, object]] = {}

    def collect(form) -> None:
        if not isinstance(form, list):
            return
        if form and form[0] == "model":
            for f in form[1:]:
                collect(f)
            return
        if form and form[0] == "define-fun" and len(form) >= 5:
            name, params, _ret, body = form[1], form[2], form[3], form[4]
            defs[name] = (params if isinstance(params, list) else [], body)
            return
        for f in form:
            collect(f)

    for form in forms:
        collect(form)

    witness: Dict[str, Value] = {}
    for name, ty in var_types.items():
        if ty == Type.ARRAY_INT:
            len_def = defs.get("%s$len" % name)
            if len_def is None:
                witness[name] = ()
                continue
            n = _eval_model_expr(len_def[1], {})
            if not isinstance(n, int) or n < 0:
                raise MalformedModelError("bad array length for %r" % name)
            if n > _MAX_MODEL_ARRAY_LEN:
                raise MalformedModelError("model array %r too long (%d)" % (name, n))
            elem_def = defs.get("%s$elem" % name)
            if elem_def is None:
                witness[name] = (0,) * n
                continue
            params, body = elem_def
            if len(params) != 1 or not isinstance(params[0], list):
                raise MalformedModelError("bad element function for %r" % name)
            pname = params[0][0]
            elems = []
            for i in range(n):
                v = _eval_model_expr(body, {pname: i})
                if not isinstance(v, int):
                    raise MalformedModelError("non-integer element in %r" % name)
                elems.append(v)
            witness[name] = tuple(elems)
        else:
            d = defs.get(name)
            if d is None:
                witness[name] = False if ty == Type.BOOL else 0
            else:
                v = _eval_model_expr(d[1], {})
                witness[name] = bool(v) if ty == Type.BOOL else v
    return witness


class SmtBackend:
    """One-shot SMT-LIB2 client: writes a script to the solver's stdin
    and reads the sat result plus model from stdout."""

    def __init__(self, cmd: Union[str, List[str]], timeout_ms: int = 5000):
        self.cmd = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
        self.timeout_ms = timeout_ms

    def check(self, vc: Expr, var_types: Dict[str, Type]) -> Verdict:
        script = smt_script(vc, var_types)
        t0 = time.monotonic()
        try:
            proc = subprocess.Popen(
                self.cmd,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
            )
        except OSError as e:
            raise BackendUnavailableError("cannot start solver %r: %s"
                                          % (self.cmd, e))
        try:
            out, err = proc.communicate(script, timeout=self.timeout_ms / 1000.0)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
            return Verdict(ValidityStatus.UNKNOWN, backend="smt",
                           elapsed=time.monotonic() - t0, reason="timeout")
        elapsed = time.monotonic() - t0
        status = None
        rest_lines: List[str] = []
        for line in out.splitlines():
            stripped = line.strip()
            if status is None and stripped in ("sat", "unsat", "unknown"):
                status = stripped
            elif status is not None:
                rest_lines.append(line)
        if status is None:
            raise BackendUnavailableError(
                "solver produced no verdict (exit %s): %s"
                % (proc.returncode, (err or out).strip()[:200]))
        if status == "unsat":
            return Verdict(ValidityStatus.VALID, backend="smt", elapsed=elapsed)
        if status == "unknown":
            return Verdict(ValidityStatus.UNKNOWN, backend="smt",
                           elapsed=elapsed, reason="solver returned unknown")
        witness = parse_model("\n".join(rest_lines), var_types)
        return Verdict(ValidityStatus.INVALID, witness=witness,
                       backend="smt", elapsed=elapsed)


def check_validity(vc: Expr, var_types: Dict[str, Type],
                   domain: Optional[BoundedDomain] = None,
                   backend: Optional[object] = None) -> Verdict:
    """Decide validity of a closed formula with the given backend
    (default: a fresh bounded checker)."""
    if backend is None:
        backend = BoundedChecker(domain)
    return backend.check(vc, var_types)


def evaluate(f: Expr, env: Dict[str, Value]) -> bool:
    """Witness replay: evaluate a formula under a total assignment."""
    return bool(eval_expr(f, env))


__all__ = [
    "ValidityStatus", "Verdict", "BoundedDomain", "BoundedChecker",
    "SmtBackend", "check_validity", "evaluate", "smt_script", "parse_model",
    "expr_to_smt",
]
