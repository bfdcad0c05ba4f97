"""Whole-program conformance checking and the error panel."""
import pytest

from mvl.parser import parse_program
from mvl.vcgen import KIND_POSTCONDITION, KIND_SIGNATURE_WF
from mvl.verify import panel_messages, render_error_panel, verify_program

EXPECTED_PANEL = (
    "line 2: Error 1: index out of range.\n"
    "line 3: Error 2: index out of range.\n"
    "line 4: Error 3: A postcondition might not hold on this path.\n"
    "line 2: This is the postcondition that might not hold.\n"
    "3 errors\n"
)


class TestRunningExample:
    def test_three_failures_in_panel_order(self, canonical_program, checker):
        cv = verify_program(canonical_program, checker)
        assert not cv.holds
        kinds = [t.partition.kind for t in cv.failing_traces]
        assert kinds == [KIND_SIGNATURE_WF, KIND_SIGNATURE_WF,
                         KIND_POSTCONDITION]

    def test_panel_is_byte_exact(self, canonical_program, checker):
        cv = verify_program(canonical_program, checker)
        assert render_error_panel(canonical_program, cv) == EXPECTED_PANEL

    def test_outcomes_cover_every_partition(self, canonical_program, checker):
        cv = verify_program(canonical_program, checker)
        assert len(cv.outcomes) == 23
        invalid = [o for o in cv.outcomes if o.verdict.is_invalid]
        assert len(invalid) == 3

    def test_repaired_program_conforms(self, repaired_program, checker):
        cv = verify_program(repaired_program, checker)
        assert cv.holds
        assert cv.failing_traces == []
        assert render_error_panel(repaired_program, cv) == "0 errors\n"


class TestTraceOrdering:
    def test_short_traces_first(self, canonical_program, checker):
        cv = verify_program(canonical_program, checker)
        lengths = [t.length for t in cv.failing_traces]
        assert lengths == sorted(lengths)

    def test_ties_broken_by_sequence(self, canonical_program, checker):
        cv = verify_program(canonical_program, checker)
        pairs = [(t.length, t.partition.seq) for t in cv.failing_traces]
        assert pairs == sorted(pairs)


class TestPanelMessages:
    def test_wf_failure_message(self, canonical_program, checker):
        cv = verify_program(canonical_program, checker)
        msgs = panel_messages(canonical_program, cv.failing_traces[0], 1)
        assert msgs == ["line 2: Error 1: index out of range."]

    def test_postcondition_failure_names_source_lines(self, canonical_program,
                                                      checker):
        cv = verify_program(canonical_program, checker)
        msgs = panel_messages(canonical_program, cv.failing_traces[2], 3)
        assert msgs == [
            "line 4: Error 3: A postcondition might not hold on this path.",
            "line 2: This is the postcondition that might not hold.",
        ]

    def test_invariant_failure_message(self, checker):
        prog = parse_program(
            "method L(n: int) returns (r: int)\n{\n  r := 1;\n"
            "  while r < n\n    invariant r == 0\n"
            "  {\n    r := r + 1;\n  }\n}\n")
        cv = verify_program(prog, checker)
        assert not cv.holds
        msgs = panel_messages(prog, cv.failing_traces[0], 1)
        assert any("invariant" in m for m in msgs)


class TestScoping:
    def test_single_method_filter(self, canonical_program, checker):
        cv = verify_program(canonical_program, checker,
                            method="FindFirstOdd")
        assert len(cv.outcomes) == 23

    def test_multi_method_programs_check_all(self, checker):
        prog = parse_program(
            "method A() returns (r: int)\n  ensures r == 0\n{\n  r := 0;\n}\n"
            "method B() returns (r: int)\n  ensures r == 1\n{\n  r := 0;\n}\n")
        cv = verify_program(prog, checker)
        assert not cv.holds
        methods = {t.partition.method for t in cv.failing_traces}
        assert methods == {"B"}

    def test_default_checker_is_constructed(self, canonical_program):
        cv = verify_program(canonical_program)
        assert not cv.holds
