#!/usr/bin/env python3
"""Walk the FindFirstOdd corpus program through the full workflow:
verify it, co-evolve program and spec until conformance, align the
result against each static test, and score postcondition completeness
before and after alignment.

Usage:  python3 scripts/replay_running_example.py [--seed 7]
"""
import argparse
import sys
from pathlib import Path
from random import Random
from typing import List, Optional

from mvl.coevolution import Budget, Candidate, CoEvolutionEngine, load_test
from mvl.metrics import completeness
from mvl.parser import parse_program
from mvl.printer import program_text
from mvl.solver import BoundedChecker
from mvl.synthesis import EnumerativePlugin
from mvl.verify import render_error_panel, verify_program

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def section(title: str) -> None:
    print()
    print("=" * 66)
    print(title)
    print("=" * 66)


def make_engine(checker: BoundedChecker, seed: int) -> CoEvolutionEngine:
    return CoEvolutionEngine(
        checker=checker,
        plugin_factory=lambda ctx=None: EnumerativePlugin(checker.domain, ctx),
        budget=Budget(),
        rng=Random(seed),
        filename="find_first_odd.mvl",
    )


def main(argv: Optional[List[str]] = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7,
                    help="synthesis seed (default 7)")
    args = ap.parse_args(argv)

    source = (CORPUS / "find_first_odd.mvl").read_text()
    program = parse_program(source, source_name="find_first_odd.mvl")
    checker = BoundedChecker()

    section("1. verify the original program")
    print(source)
    verdict = verify_program(program, checker)
    print(render_error_panel(program, verdict))

    section("2. co-evolve program and spec")
    engine = make_engine(checker, args.seed)
    out = engine.co_evolve(program, source)
    print("status: %s after %d campaigns" % (out.status, out.campaigns_used))
    if not out.v_p:
        print("no conforming candidate; stopping")
        return 1
    repaired = out.v_p[0]
    print()
    print(repaired.source)

    aligned = repaired
    for name in ("all_even", "all_even_length"):
        test = load_test(str(CORPUS / "tests" / ("%s.mvl" % name)))
        section("3. align with the %s test" % test.name)
        engine = make_engine(checker, args.seed)
        root = Candidate(repaired.source, repaired.program,
                         list(repaired.patches), label="root")
        root.verdict = verify_program(repaired.program, checker)
        result = engine.align(root, test, "FindFirstOdd")
        if result is None:
            print("alignment failed within budget")
            return 1
        print("aligned after %d campaigns" % engine.campaigns_used)
        print()
        print(result.source)
        if test.name == "AllEven":
            aligned = result

    section("4. postcondition completeness against AllEven")
    all_even = load_test(str(CORPUS / "tests" / "all_even.mvl"))
    for label, cand in (("repaired", repaired), ("aligned", aligned)):
        res = completeness(cand.program.method("FindFirstOdd"), [all_even],
                           checker=checker)
        print("%-9s score %.4f (%d/%d mutants killed)"
              % (label, res.score, res.killed, res.total_mutations))
    return 0


if __name__ == "__main__":
    sys.exit(main())
