"""Command-line entry point.

Subcommands: verify (conformance check with an error panel), explain
(hard/soft intent report), repair (co-evolution campaigns), align
(co-evolution plus test assurance), and score (postcondition
completeness).

Exit codes: 0 conforming/success, 1 nonconforming, 2 usage or
infrastructure error, 3 repair failure with the candidate pool
exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
from random import Random
from typing import Dict, List, Optional, Sequence

from .config import ToolConfig, load_config, merge_overrides
from .coevolution import (
    AssuranceOutcome,
    Budget,
    Candidate,
    CoEvolutionEngine,
    CoEvolveOutcome,
    STATUS_BUDGET_EXHAUSTED,
    STATUS_CONFORMING,
    STATUS_NO_PATCHES,
    load_test,
)
from .errors import MvlError
from .intent import extract_hs_intent, render_intent_report
from .metrics import completeness, render_completeness_report
from .parser import parse_program
from .solver import BoundedChecker, SmtBackend
from .synthesis import EnumerativePlugin, SubprocessPlugin, render_reply
from .syntax import Program, Test
from .verify import render_error_panel, verify_program

EXIT_OK = 0
EXIT_NONCONFORMING = 1
EXIT_USAGE = 2
EXIT_NO_PATCHES = 3


class _BackendChecker:
    """Routes validity queries to an external solver while keeping the
    bounded domain available for synthesis and scoring."""

    def __init__(self, backend: SmtBackend, domain) -> None:
        self.backend = backend
        self.domain = domain

    def check(self, vc, var_types):
        return self.backend.check(vc, var_types)


def _load_cfg(args: argparse.Namespace) -> ToolConfig:
    cfg = load_config(args.config) if args.config else ToolConfig()
    synth = getattr(args, "synth", None)
    if synth == "enumerative":
        cfg = merge_overrides(cfg, synth_builtin="enumerative")
        cfg.synth_cmd = None
    elif synth:
        cfg = merge_overrides(cfg, synth_cmd=synth)
    return cfg


def _checker_for(cfg: ToolConfig):
    if cfg.solver_cmd:
        return _BackendChecker(SmtBackend(cfg.solver_cmd, cfg.solver_timeout_ms),
                               cfg.domain())
    return BoundedChecker(cfg.domain())


def _read_program(path: str):
    with open(path) as fh:
        source = fh.read()
    return parse_program(source), source


def _plugin_factory(cfg: ToolConfig):
    def factory(alignment):
        if cfg.synth_cmd:
            return SubprocessPlugin(cfg.synth_cmd)
        return EnumerativePlugin(domain=cfg.domain(), alignment=alignment)
    return factory


def _collect_tests(path: Optional[str]) -> List[Test]:
    if path is None:
        return []
    if os.path.isdir(path):
        files = sorted(
            os.path.join(path, n) for n in os.listdir(path)
            if n.endswith(".mvl")
        )
    else:
        files = [path]
    return [load_test(f) for f in files]


# ---------------------------------------------------------------------------
# Results directory


def _prepare_out_dir(out_dir: str) -> None:
    if os.path.exists(out_dir):
        marker = os.path.join(out_dir, "summary.txt")
        if os.listdir(out_dir) and not os.path.exists(marker):
            raise MvlError(
                "refusing to overwrite %s: not a results directory" % out_dir)
        shutil.rmtree(out_dir)
    os.makedirs(out_dir)


def _patch_transcript(cand: Candidate) -> str:
    chunks: List[str] = []
    for p in cand.patches:
        chunks.append("# campaign %d synthesizer=%s patch=%s"
                      % (p.campaign, p.synthesizer_id, p.patch_id))
        chunks.append(render_reply([p.hunks]).rstrip("\n"))
    return ("\n".join(chunks) + "\n") if chunks else "(no patches; input already conforming)\n"


def _write_candidate_dir(base: str, index: int, cand: Candidate,
                         events: List[Dict[str, object]]) -> str:
    sub = os.path.join(base, "candidate-%03d" % index)
    os.makedirs(sub)
    with open(os.path.join(sub, "patched.mvl"), "w") as fh:
        fh.write(cand.source if cand.source.endswith("\n")
                 else cand.source + "\n")
    with open(os.path.join(sub, "patches.txt"), "w") as fh:
        fh.write(_patch_transcript(cand))
    with open(os.path.join(sub, "run.log"), "w") as fh:
        for e in events:
            entry = dict(e)
            entry["elapsed_ms"] = 0
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
    return sub


def _write_results(out_dir: str, engine: CoEvolutionEngine,
                   candidates: Sequence[Candidate], status: str,
                   json_mode: bool, tests: Sequence[Test] = ()) -> Dict[str, object]:
    _prepare_out_dir(out_dir)
    lines = [
        "status: %s" % status,
        "campaigns: %d" % engine.campaigns_used,
        "candidates: %d" % len(candidates),
        "elapsed_ms: 0",
    ]
    if tests:
        lines.append("tests: %s" % ", ".join(t.name for t in tests))
    for i, cand in enumerate(candidates, start=1):
        _write_candidate_dir(out_dir, i, cand, engine.events)
        lines.append("candidate-%03d: %d patches" % (i, len(cand.patches)))
    summary = "\n".join(lines) + "\n"
    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        fh.write(summary)
    payload: Dict[str, object] = {
        "status": status,
        "campaigns": engine.campaigns_used,
        "candidates": len(candidates),
        "elapsed_ms": 0,
        "tests": [t.name for t in tests],
    }
    if json_mode:
        # The on-disk copy stays free of absolute paths so identical runs
        # produce byte-identical results directories.
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    payload["out_dir"] = out_dir
    return payload


def _status_exit(status: str, have_solution: bool) -> int:
    if have_solution:
        return EXIT_OK
    if status == STATUS_NO_PATCHES:
        return EXIT_NO_PATCHES
    return EXIT_NONCONFORMING


# ---------------------------------------------------------------------------
# Subcommands


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    program, _source = _read_program(args.file)
    checker = _checker_for(cfg)
    verdict = verify_program(program, checker)
    if args.json:
        traces = [
            {
                "kind": t.partition.kind,
                "seq": t.partition.seq,
                "method": t.partition.method,
                "description": t.partition.describe(),
            }
            for t in verdict.failing_traces
        ]
        print(json.dumps({"file": args.file, "holds": verdict.holds,
                          "errors": len(verdict.failing_traces),
                          "traces": traces}, indent=2, sort_keys=True))
    else:
        print(render_error_panel(program, verdict))
    return EXIT_OK if verdict.holds else EXIT_NONCONFORMING


def cmd_explain(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    program, _source = _read_program(args.file)
    checker = _checker_for(cfg)
    verdict = verify_program(program, checker)
    report = extract_hs_intent(program, checker=checker,
                               outcomes=verdict.outcomes)
    if args.json:
        print(json.dumps({
            "file": args.file,
            "holds": verdict.holds,
            "hard": [f.render() for f in report.hard],
            "soft": [f.render() for f in report.soft],
            "unknown_partitions": sorted(report.unknown_partitions),
        }, indent=2, sort_keys=True))
    else:
        print(render_intent_report(report))
    return EXIT_OK if verdict.holds else EXIT_NONCONFORMING


def _make_engine(args: argparse.Namespace, cfg: ToolConfig,
                 filename: str) -> CoEvolutionEngine:
    budget = Budget(wall_clock_s=args.time_budget,
                    max_campaigns=args.max_campaigns, k=args.k)
    return CoEvolutionEngine(
        _checker_for(cfg), _plugin_factory(cfg), budget,
        Random(args.seed), filename=filename,
        first_solution=not args.all,
        explain=getattr(args, "explain", False))


def _default_out(args: argparse.Namespace, suffix: str) -> str:
    if args.out:
        return args.out
    stem = os.path.splitext(os.path.basename(args.file))[0]
    return "%s-%s" % (stem, suffix)


def cmd_repair(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    program, source = _read_program(args.file)
    engine = _make_engine(args, cfg, os.path.basename(args.file))
    out = engine.co_evolve(program, source)
    payload = _write_results(_default_out(args, "repair"), engine, out.v_p,
                             out.status, args.json)
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("status: %s" % out.status)
        print("campaigns: %d" % out.campaigns_used)
        print("candidates: %d (in %s)" % (len(out.v_p), payload["out_dir"]))
        if args.explain:
            for e in engine.events:
                if e.get("event") == "intent_report":
                    print(e["text"])
    return _status_exit(out.status, bool(out.v_p))


def cmd_align(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    program, source = _read_program(args.file)
    tests = _collect_tests(args.tests)
    engine = _make_engine(args, cfg, os.path.basename(args.file))
    out = engine.co_evolve(program, source)
    if not out.v_p:
        payload = _write_results(_default_out(args, "align"), engine, [],
                                 out.status, args.json)
        if args.json:
            print(json.dumps(payload, indent=2, sort_keys=True))
        else:
            print("status: %s" % out.status)
        return _status_exit(out.status, False)
    method_name = (tests[0].call_method if tests
                   else program.methods[0].name)
    ao = engine.automated_assurance(out.v_p, tests, method_name)
    final = [t.candidate for t in ao.triples]
    payload = _write_results(_default_out(args, "align"), engine, final,
                             ao.status, args.json, tests=tests)
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("status: %s" % ao.status)
        print("campaigns: %d" % ao.campaigns_used)
        print("triples: %d (in %s)" % (len(final), payload["out_dir"]))
    return _status_exit(ao.status, bool(final))


def cmd_score(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    program, _source = _read_program(args.file)
    tests = _collect_tests(args.tests)
    if not tests:
        print("score: no tests given (--tests)", file=sys.stderr)
        return EXIT_USAGE
    checker = _checker_for(cfg)
    method = program.method(tests[0].call_method)
    result = completeness(method, tests, n_mutations=args.mutations,
                          seed=args.seed, checker=checker)
    if args.json:
        print(json.dumps({
            "method": method.name,
            "score": result.score,
            "killed": result.killed,
            "total_mutations": result.total_mutations,
            "per_mutation": [
                {"oracle": text, "inconsistent": bad}
                for text, bad in result.per_mutation
            ],
        }, indent=2, sort_keys=True))
    else:
        print(render_completeness_report(method, result))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", help="program file (.mvl)")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--json", action="store_true",
                   help="machine-readable output")


def _add_campaign_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=5,
                   help="patch candidates per campaign (default 5)")
    p.add_argument("--max-campaigns", type=int, default=5,
                   help="campaign budget (default 5)")
    p.add_argument("--time-budget", type=float, default=1200.0,
                   help="wall-clock budget in seconds (default 1200)")
    p.add_argument("--synth", default=None,
                   help="synthesizer: 'enumerative' or an external command")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--first", dest="all", action="store_false",
                       help="stop at the first conforming candidate (default)")
    group.add_argument("--all", dest="all", action="store_true",
                       help="collect every conforming candidate in budget")
    p.set_defaults(all=False)
    p.add_argument("--out", default=None, help="results directory")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mvl",
        description="Verification-driven program/spec/test co-evolution.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check conformance, print error panel")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("explain", help="print the hard/soft intent report")
    _add_common(p)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("repair", help="co-evolve program and spec")
    _add_common(p)
    _add_campaign_flags(p)
    p.add_argument("--explain", action="store_true",
                   help="dump the intent report per campaign")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("align", help="co-evolve against static tests")
    _add_common(p)
    _add_campaign_flags(p)
    p.add_argument("--tests", default=None,
                   help="test file or directory of .mvl tests")
    p.add_argument("--explain", action="store_true",
                   help="dump the intent report per campaign")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("score", help="postcondition completeness score")
    _add_common(p)
    p.add_argument("--tests", default=None,
                   help="test file or directory of .mvl tests")
    p.add_argument("--mutations", type=int, default=20,
                   help="mutants per test (default 20)")
    p.set_defaults(func=cmd_score)
    return ap


def run(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except MvlError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
