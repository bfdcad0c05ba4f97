"""Specification quality metrics: postcondition completeness against
seeded wrong-output mutants, and the program-summary prompt builder.

A mutant is the test with one oracle literal changed.  The score is the
fraction of mutants whose oracle is *inconsistent* with the spec on the
test's inputs — no output can satisfy both.  A trivial `ensures true`
is consistent with anything and scores 0; a spec that pins the exact
output kills every wrong-output mutant and scores 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Dict, List, Optional, Sequence, Tuple

from .coevolution import _input_equalities, _maps_for
from .errors import InsufficientDistinctMutationsError
from .printer import expr_text, program_text
from .solver import BoundedChecker, BoundedDomain
from .syntax import (
    ArrayLit,
    Binary,
    Expr,
    Index,
    IntLit,
    Method,
    Program,
    Quantifier,
    Test,
    Type,
    Unary,
    UnaryOp,
    Var,
    conjoin,
    mk_not,
    substitute,
)


def _literal_value(e: Expr) -> Optional[int]:
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, Unary) and e.op == UnaryOp.NEG and isinstance(e.operand, IntLit):
        return -e.operand.value
    return None


def _int_expr(n: int) -> Expr:
    return IntLit(n) if n >= 0 else Unary(UnaryOp.NEG, IntLit(-n))


def _count_literal_sites(e: Expr) -> int:
    if _literal_value(e) is not None:
        return 1
    if isinstance(e, Unary):
        return _count_literal_sites(e.operand)
    if isinstance(e, Binary):
        return _count_literal_sites(e.left) + _count_literal_sites(e.right)
    if isinstance(e, Index):
        return _count_literal_sites(e.index)
    if isinstance(e, Quantifier):
        return (_count_literal_sites(e.lo) + _count_literal_sites(e.hi)
                + _count_literal_sites(e.body))
    if isinstance(e, ArrayLit):
        return sum(_count_literal_sites(el) for el in e.elements)
    return 0


def _nth_literal(e: Expr) -> List[int]:
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


def _replace_nth_literal(e: Expr, occurrence: int, value: int) -> Expr:
    count = [0]
    new = _int_expr(value)

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


@dataclass
class CompletenessResult:
    score: float
    killed: int
    total_mutations: int
    per_mutation: List[Tuple[str, bool]]
    operators: Tuple[str, ...] = (
        "plus_one", "minus_one", "sign_flip", "array_length", "zero",
        "out_of_range",
    )


_REROLL_CAP = 200


def _mutated_value(op: str, original: int, array_lens: List[int],
                   domain: BoundedDomain) -> int:
    if op == "plus_one":
        return original + 1
    if op == "minus_one":
        return original - 1
    if op == "sign_flip":
        return -original
    if op == "array_length":
        return array_lens[0] if array_lens else original
    if op == "zero":
        return 0
    if op == "out_of_range":
        return domain.int_hi + 1
    raise ValueError(op)


def _spec_consistent(m: Method, test: Test, oracle: List[Expr],
                     checker: BoundedChecker) -> bool:
    """Is there any output satisfying both the spec and this oracle on
    the test's inputs?  The search domain is widened to cover every
    literal in play, so an out-of-range expected value is judged on the
    spec, not on the domain bound."""
    param_map, result_map = _maps_for(test, m)
    mapping: Dict[str, Expr] = {n: Var(t) for n, t in param_map.items()}
    mapping.update({n: Var(t) for n, t in result_map.items()})
    parts: List[Expr] = []
    for arg, p in zip(test.call_args, m.params):
        if isinstance(arg, Var):
            lit = dict(test.inputs).get(arg.name)
        else:
            lit = arg
        if lit is not None:
            parts.extend(_input_equalities(p.name, lit))
    for c in m.requires:
        parts.append(c.expr)
    for c in m.ensures:
        parts.append(c.expr)
    for o in oracle:
        parts.append(substitute(o, mapping))
    formula = mk_not(conjoin(parts))
    base = checker.domain
    lits = [v for part in parts for v in _nth_literal(part)]
    lo = min([base.int_lo] + lits)
    hi = max([base.int_hi] + lits)
    if lo < base.int_lo or hi > base.int_hi:
        checker = BoundedChecker(BoundedDomain(lo, hi, base.max_array_len))
    var_types = {p.name: p.type for p in list(m.params) + list(m.returns)}
    verdict = checker.check(formula, var_types)
    return not verdict.is_valid


def completeness(m: Method, tests: Sequence[Test], n_mutations: int = 20,
                 seed: int = 0, checker: Optional[BoundedChecker] = None
                 ) -> CompletenessResult:
    """Score how completely m's postcondition pins down outputs: the
    fraction of seeded wrong-output mutants it is inconsistent with."""
    if checker is None:
        checker = BoundedChecker()
    if n_mutations < 1:
        raise InsufficientDistinctMutationsError("n_mutations must be >= 1")
    rng = Random(seed)
    domain = checker.domain
    per_mutation: List[Tuple[str, bool]] = []
    killed = 0
    total = 0
    operators = ["plus_one", "minus_one", "sign_flip", "array_length",
                 "zero", "out_of_range"]
    for test in tests:
        sites: List[Tuple[int, int, int]] = []  # (oracle idx, occurrence, value)
        for oi, o in enumerate(test.oracle):
            for occ, val in enumerate(_nth_literal(o)):
                sites.append((oi, occ, val))
        if not sites:
            raise InsufficientDistinctMutationsError(
                "test %s has no oracle literals to mutate" % test.name)
        array_lens = [len(lit.elements) for _n, lit in test.inputs
                      if isinstance(lit, ArrayLit)]
        seen: set = set()
        produced = 0
        rolls = 0
        while produced < n_mutations:
            oi, occ, val = sites[rng.randrange(len(sites))]
            op = operators[rng.randrange(len(operators))]
            new_val = _mutated_value(op, val, array_lens, domain)
            rolls += 1
            if new_val == val:
                continue
            if (oi, occ, new_val) in seen and rolls < _REROLL_CAP:
                continue
            seen.add((oi, occ, new_val))
            mutated = list(test.oracle)
            mutated[oi] = _replace_nth_literal(mutated[oi], occ, new_val)
            inconsistent = not _spec_consistent(m, test, mutated, checker)
            per_mutation.append((expr_text(conjoin(mutated)), inconsistent))
            produced += 1
            total += 1
            if inconsistent:
                killed += 1
    score = killed / total if total else 0.0
    return CompletenessResult(score=score, killed=killed,
                              total_mutations=total, per_mutation=per_mutation)


SUMMARY_PROMPT = """// System prompt
You are an expert requirement engineer.
You have been given a program in Dafny which you have to summarize such that the summary can be reused by developers for later implementation.
The summary should be in a higher level and should be able to guide the developers to implement the program.

// Prompt
This is a program in Dafny. Lines with {{:trusted}} represent statements that were verfied by a developer and have been shown to be important.

Can you extract a summary of the program acting as requirements such that another developer can read it and generate a program of the same quality and behavior?

Focus on the summary being in a higher level. Put the summary in triple backticks (```).
{program}
"""


def build_summary_prompt(program: Program) -> str:
    """The requirements-summary request for a verified program, with the
    trusted-annotated source in the program slot."""
    return SUMMARY_PROMPT.format(program=program_text(program))


def render_completeness_report(m: Method, result: CompletenessResult) -> str:
    lines = [
        "completeness report for %s" % m.name,
        "operators: %s" % ", ".join(result.operators),
        "score: %.4f (%d/%d killed)" % (result.score, result.killed,
                                        result.total_mutations),
        "",
    ]
    for text, inconsistent in result.per_mutation:
        lines.append("  [%s] %s" % ("killed" if inconsistent else "alive", text))
    return "\n".join(lines)


__all__ = [
    "CompletenessResult", "completeness", "SUMMARY_PROMPT",
    "build_summary_prompt", "render_completeness_report",
]
