#!/usr/bin/env python3
"""Cross-check partitioned verification against a monolithic weakest
precondition.

Generates random loop-free methods (straight-line code plus up to two
`if` statements, so at most four execution paths), verifies each one
twice — once as the conjunction of its per-partition obligations, once
as a single `requires ==> wp(body, ensures)` formula computed by
backward substitution — and reports how often the two verdicts agree.
They should always agree; a mismatch means the partition generator
dropped or invented an obligation.

Generated methods are rejection-sampled to be domain-closed: every
value a body assignment produces stays inside the bounded integer
range for every input.  The bounded backend represents each assignment
as a fresh in-range variable, so a path whose assignments escape the
range has no model at all and passes vacuously — while the monolithic
formula, having substituted the expressions through, still sees the
escaping value.  The two semantics only promise to coincide on
programs the domain can actually represent.

Usage:  python3 scripts/soundness_sweep.py [--n 100] [--seed 0]
"""
import argparse
import itertools
import random
import sys
from typing import Dict, List, Optional

from mvl.parser import parse_program
from mvl.solver import BoundedChecker, BoundedDomain, evaluate
from mvl.syntax import (
    Assert, Assign, Binary, BinaryOp, Expr, If, IntLit, Method, Program,
    Stmt, Unary, UnaryOp, Var, VarDecl, conjoin, free_vars, mk_not,
    substitute,
)
from mvl.vcgen import generate_partitions

INT_CMP = ["<", "<=", "==", "!=", ">", ">="]


# ---------------------------------------------------------------------------
# Random method generation (source text, then parsed like any user input)


def _int_expr(rng: random.Random, names: List[str]) -> str:
    roll = rng.random()
    if roll < 0.35:
        return rng.choice(names)
    if roll < 0.55:
        return str(rng.choice([-1, 0, 1]))
    op = rng.choice(["+", "-"])
    return "%s %s %s" % (rng.choice(names), op,
                         rng.choice(names + ["1", "0"]))


def _condition(rng: random.Random, names: List[str]) -> str:
    a = _int_expr(rng, names)
    b = _int_expr(rng, names)
    base = "%s %s %s" % (a, rng.choice(INT_CMP), b)
    if rng.random() < 0.25:
        c = "%s %s %s" % (_int_expr(rng, names), rng.choice(INT_CMP),
                          _int_expr(rng, names))
        base = "%s %s %s" % (base, rng.choice(["&&", "||"]), c)
    return base


def _arm_stmt(rng: random.Random, names: List[str], targets: List[str]) -> str:
    if rng.random() < 0.25:
        return "assert %s;" % _condition(rng, names)
    return "%s := %s;" % (rng.choice(targets), _int_expr(rng, names))


def _draft_method(rng: random.Random) -> str:
    names = ["a", "b"]
    targets = ["r"]
    lines = ["method M%d(a: int, b: int) returns (r: int)"
             % rng.randrange(1000)]
    if rng.random() < 0.5:
        lines.append("  requires %s" % _condition(rng, names))
    body: List[str] = []
    body.append("  r := %s;" % _int_expr(rng, names))
    scoped = names + ["r"]
    if rng.random() < 0.5:
        body.append("  var t := %s;" % _int_expr(rng, scoped))
        scoped = scoped + ["t"]
        targets = targets + ["t"]
    for _ in range(rng.randrange(3)):          # 0..2 ifs: at most 4 paths
        body.append("  if %s {" % _condition(rng, scoped))
        body.append("  %s" % _arm_stmt(rng, scoped, targets))
        if rng.random() < 0.6:
            body.append("  } else {")
            body.append("  %s" % _arm_stmt(rng, scoped, targets))
        body.append("  }")
    if rng.random() < 0.3:
        body.append("  %s" % _arm_stmt(rng, scoped, targets))
    for _ in range(rng.randrange(2) + 1):      # 1..2 ensures clauses
        lines.append("  ensures %s" % _condition(rng, names + ["r"]))
    lines.append("{")
    lines.extend(body)
    lines.append("}")
    return "\n".join(lines) + "\n"


def _eval_int(e: Expr, env: Dict[str, object]) -> int:
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, Var):
        return env[e.name]  # type: ignore[return-value]
    if isinstance(e, Unary) and e.op == UnaryOp.NEG:
        return -_eval_int(e.operand, env)
    if isinstance(e, Binary) and e.op == BinaryOp.ADD:
        return _eval_int(e.left, env) + _eval_int(e.right, env)
    if isinstance(e, Binary) and e.op == BinaryOp.SUB:
        return _eval_int(e.left, env) - _eval_int(e.right, env)
    raise ValueError("unexpected assignment expression %r" % e)


def _run_body(stmts: List[Stmt], env: Dict[str, object],
              domain: BoundedDomain) -> bool:
    for st in stmts:
        if isinstance(st, (Assign, VarDecl)):
            expr = st.expr if isinstance(st, Assign) else st.init
            value = _eval_int(expr, env)
            if not domain.int_lo <= value <= domain.int_hi:
                return False
            env[st.name] = value
        elif isinstance(st, If):
            branch = (st.then_body if evaluate(st.cond, env)
                      else st.else_body)
            if not _run_body(branch, env, domain):
                return False
        elif not isinstance(st, Assert):
            raise ValueError("unsupported statement %r" % type(st).__name__)
    return True


def _domain_closed(source: str, domain: BoundedDomain) -> bool:
    m = parse_program(source, source_name="draft.mvl").methods[0]
    span = range(domain.int_lo, domain.int_hi + 1)
    for values in itertools.product(span, repeat=len(m.params)):
        env = {p.name: v for p, v in zip(m.params, values)}
        if not _run_body(list(m.body or []), dict(env), domain):
            return False
    return True


def generate_method(rng: random.Random,
                    domain: Optional[BoundedDomain] = None) -> str:
    """One random loop-free, domain-closed method with at most four
    paths."""
    if domain is None:
        domain = BoundedDomain(-1, 1, 0)
    for _ in range(1000):
        source = _draft_method(rng)
        if _domain_closed(source, domain):
            return source
    raise RuntimeError("could not generate a domain-closed method")


# ---------------------------------------------------------------------------
# Monolithic weakest precondition by backward substitution


def monolithic_wp(stmts: List[Stmt], post: Expr) -> Expr:
    for st in reversed(stmts):
        if isinstance(st, Assign):
            post = substitute(post, {st.name: st.expr})
        elif isinstance(st, VarDecl):
            if st.init is not None:
                post = substitute(post, {st.name: st.init})
        elif isinstance(st, Assert):
            post = Binary(BinaryOp.AND, st.expr, post)
        elif isinstance(st, If):
            on_then = monolithic_wp(st.then_body, post)
            on_else = monolithic_wp(st.else_body, post)
            post = Binary(
                BinaryOp.AND,
                Binary(BinaryOp.IMPLIES, st.cond, on_then),
                Binary(BinaryOp.IMPLIES, mk_not(st.cond), on_else))
        else:
            raise ValueError("unsupported statement %r" % type(st).__name__)
    return post


def monolithic_vc(m: Method) -> Expr:
    post = conjoin([c.expr for c in m.ensures])
    body = monolithic_wp(list(m.body or []), post)
    pre = conjoin([c.expr for c in m.requires])
    return Binary(BinaryOp.IMPLIES, pre, body)


# ---------------------------------------------------------------------------
# The sweep


def split_verdict(program: Program, checker: BoundedChecker) -> bool:
    return all(checker.check(p.vc, p.var_types).is_valid
               for p in generate_partitions(program))


def monolithic_verdict(program: Program, checker: BoundedChecker) -> bool:
    m = program.methods[0]
    vc = monolithic_vc(m)
    types = {p.name: p.type for p in list(m.params) + list(m.returns)}
    var_types = {n: t for n, t in types.items() if n in free_vars(vc)}
    return checker.check(vc, var_types).is_valid


def run_sweep(n: int = 100, seed: int = 0,
              domain: Optional[BoundedDomain] = None) -> Dict[str, object]:
    if domain is None:
        domain = BoundedDomain(-1, 1, 0)
    checker = BoundedChecker(domain)
    rng = random.Random(seed)
    agreements = 0
    both_valid = 0
    mismatches: List[str] = []
    for _ in range(n):
        source = generate_method(rng, domain)
        program = parse_program(source, source_name="generated.mvl")
        split = split_verdict(program, checker)
        mono = monolithic_verdict(program, checker)
        if split == mono:
            agreements += 1
            if split:
                both_valid += 1
        else:
            mismatches.append(source)
    return {
        "total": n,
        "agreements": agreements,
        "both_valid": both_valid,
        "mismatches": mismatches,
    }


def main(argv: Optional[List[str]] = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    out = run_sweep(args.n, args.seed)
    print("methods:    %d" % out["total"])
    print("agreements: %d" % out["agreements"])
    print("conforming under both: %d" % out["both_valid"])
    for src in out["mismatches"]:
        print("\nMISMATCH:\n%s" % src)
    return 0 if out["agreements"] == out["total"] else 1


if __name__ == "__main__":
    sys.exit(main())
