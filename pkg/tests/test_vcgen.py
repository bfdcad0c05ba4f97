"""Verification-condition generation: partitions, splitting, identity."""
from collections import Counter

import pytest

from mvl.parser import parse_program
from mvl.printer import expr_text
from mvl.solver import BoundedChecker
from mvl.syntax import free_vars
from mvl.vcgen import (
    KIND_INTERMEDIATE, KIND_INV_ENTRY, KIND_INV_MAINTAIN, KIND_POSTCONDITION,
    KIND_SIGNATURE_WF, KIND_WF, WF_KINDS, generate_partitions, trace_of,
)


@pytest.fixture(scope="module")
def canonical_partitions(canonical_program):
    return generate_partitions(canonical_program)


class TestRunningExampleInventory:
    def test_partition_count(self, canonical_partitions):
        assert len(canonical_partitions) == 23

    def test_kind_histogram(self, canonical_partitions):
        assert Counter(p.kind for p in canonical_partitions) == {
            KIND_INV_MAINTAIN: 10,
            KIND_INV_ENTRY: 5,
            KIND_WF: 4,
            KIND_SIGNATURE_WF: 2,
            KIND_POSTCONDITION: 2,
        }

    def test_sequence_numbers_are_dense(self, canonical_partitions):
        assert [p.seq for p in canonical_partitions] == list(range(23))

    def test_spec_wf_checks_come_first(self, canonical_partitions):
        assert [p.kind for p in canonical_partitions[:2]] == [
            KIND_SIGNATURE_WF, KIND_SIGNATURE_WF]
        assert [p.target.span.line for p in canonical_partitions[:2]] == [2, 3]

    def test_exactly_three_partitions_fail(self, canonical_partitions,
                                           checker):
        failing = [p.seq for p in canonical_partitions
                   if checker.check(p.vc, p.var_types).is_invalid]
        assert failing == [0, 1, 21]

    def test_failing_kinds_are_two_wf_one_post(self, canonical_partitions):
        kinds = [canonical_partitions[i].kind for i in (0, 1, 21)]
        assert kinds[:2] == [KIND_SIGNATURE_WF] * 2
        assert kinds[2] == KIND_POSTCONDITION


class TestPartitionIdentity:
    def test_pids_are_unique(self, canonical_partitions):
        pids = [p.pid for p in canonical_partitions]
        assert len(pids) == len(set(pids))

    def test_generation_is_deterministic(self, canonical_program):
        a = generate_partitions(canonical_program)
        b = generate_partitions(canonical_program)
        assert [(p.pid, p.seq, p.kind) for p in a] == \
               [(p.pid, p.seq, p.kind) for p in b]

    def test_pid_is_stable_under_reparse(self, canonical_program,
                                         canonical_source):
        again = parse_program(canonical_source, source_name="other-name.mvl")
        a = {p.pid for p in generate_partitions(canonical_program)}
        b = {p.pid for p in generate_partitions(again)}
        assert a == b

    def test_pid_format(self, canonical_partitions):
        for p in canonical_partitions:
            assert len(p.pid) == 16
            int(p.pid, 16)


class TestVcShape:
    def test_straight_line_golden_formula(self):
        prog = parse_program(
            "method G() returns (r: int)\n{\n  var x := 1;\n"
            "  var y := 2;\n  assert x + y >= 2;\n}\n")
        (p,) = generate_partitions(prog)
        assert expr_text(p.vc) == "true ==> x == 1 ==> y == 2 ==> x + y >= 2"
        assert p.kind == KIND_INTERMEDIATE

    def test_var_types_restricted_to_vc_vars(self, canonical_partitions):
        for p in canonical_partitions:
            assert set(p.var_types) == free_vars(p.vc)

    def test_conjunction_asserts_split(self):
        prog = parse_program(
            "method S(x: int) returns (r: int)\n{\n  r := x;\n"
            "  assert r == x && r >= x;\n}\n")
        parts = generate_partitions(prog)
        texts = sorted(expr_text(p.target.formula) for p in parts)
        assert len(parts) == 2
        assert texts[0].endswith("== x$1") or "==" in texts[0]

    def test_wf_obligations_are_not_split(self):
        prog = parse_program(
            "method W(a: array<int>, i: int, j: int) returns (r: int)\n"
            "  ensures a[i] == a[j]\n{\n  r := 0;\n}\n")
        parts = generate_partitions(prog)
        wf = [p for p in parts if p.kind in WF_KINDS]
        # Two index sites in one clause become two whole obligations,
        # each keeping its `0 <= idx && idx < a.Length` conjunction.
        assert len(wf) == 2
        for p in wf:
            assert "&&" in expr_text(p.target.formula)

    def test_identical_obligations_are_deduplicated(self):
        # Both index sites of the clause yield the same obligation on
        # the same path, so only one partition survives.
        prog = parse_program(
            "method D(a: array<int>, i: int) returns (r: int)\n"
            "  ensures a[i] == a[i]\n{\n  r := 0;\n}\n")
        parts = generate_partitions(prog)
        wf = [p for p in parts if p.kind in WF_KINDS]
        assert len(wf) == 1

    def test_shared_prefix_obligations_appear_once(self):
        # The entry check of a loop invariant lies on both the body and
        # the exit path with an identical prefix; it is reported once.
        prog = parse_program(
            "method L(n: int) returns (r: int)\n{\n  r := 0;\n"
            "  while r < n\n    invariant r >= 0\n"
            "  {\n    r := r + 1;\n  }\n}\n")
        parts = generate_partitions(prog)
        entries = [p for p in parts if p.kind == KIND_INV_ENTRY]
        assert len(entries) == 1

    def test_method_filter(self, canonical_program):
        parts = generate_partitions(canonical_program, method="FindFirstOdd")
        assert len(parts) == 23


class TestFailingTraces:
    def test_trace_ends_at_target(self, canonical_partitions):
        p = canonical_partitions[21]
        tr = trace_of(p)
        assert tr.steps[-1] is p.target
        assert tr.length == len(p.path) + 1

    def test_trace_length_orders_wf_before_deep_paths(self,
                                                      canonical_partitions):
        sig = trace_of(canonical_partitions[0])
        post = trace_of(canonical_partitions[21])
        assert sig.length < post.length
