"""Hard/soft intent extraction from verification outcomes."""
from collections import Counter

import pytest

from mvl.intent import (
    FactOrigin, HARD, SOFT, extract_hs_intent, hard_violations,
    render_intent_report, transform_wf,
)
from mvl.parser import parse_program
from mvl.printer import expr_text
from mvl.solver import BoundedChecker, BoundedDomain
from mvl.syntax import normalize


@pytest.fixture(scope="module")
def report(canonical_program):
    checker = BoundedChecker(BoundedDomain(-4, 4, 3))
    return extract_hs_intent(canonical_program, checker=checker)


class TestRunningExampleFacts:
    def test_hard_soft_counts(self, report):
        assert len(report.hard) == 25
        assert len(report.soft) == 10

    def test_hard_origin_histogram(self, report):
        assert Counter(f.origin_kind for f in report.hard) == {
            FactOrigin.SPEC_CLAUSE: 19,
            FactOrigin.WF_CHECK: 5,
            FactOrigin.PROGRAM_STMT: 1,
        }

    def test_soft_origin_histogram(self, report):
        assert Counter(f.origin_kind for f in report.soft) == {
            FactOrigin.SPEC_CLAUSE: 6,
            FactOrigin.PROGRAM_STMT: 4,
        }

    def test_partition_conformance_map(self, report):
        assert len(report.partitions) == 23
        assert sum(1 for ok in report.partitions.values() if not ok) == 3
        assert report.unknown_partitions == set()

    def test_failing_postcondition_is_soft(self, report):
        texts = [expr_text(f.formula) for f in report.soft]
        assert "arr[odd] % 2 != 0" in texts

    def test_failing_trace_statements_are_soft(self, report):
        stmt_facts = [f for f in report.soft
                      if f.origin_kind == FactOrigin.PROGRAM_STMT]
        texts = {expr_text(f.formula) for f in stmt_facts}
        assert texts == {"found == false", "odd == -1", "i == 0",
                         "!(i < arr.Length)"}

    def test_wf_facts_are_presence_guarded(self, report):
        wf = [f for f in report.hard if f.origin_kind == FactOrigin.WF_CHECK]
        assert wf and all(f.presence_fp is not None for f in wf)

    def test_conforming_partition_formulas_are_hard_vc_facts(self, report):
        vc_facts = [f for f in report.hard if f.is_vc_fact]
        assert len(vc_facts) == 20


class TestFactIdentity:
    def test_no_fact_is_both_hard_and_soft(self, report):
        hard_ids = {f.fact_id for f in report.hard}
        soft_ids = {f.fact_id for f in report.soft}
        assert hard_ids.isdisjoint(soft_ids)

    def test_fact_id_combines_anchor_and_normal_form(self, report):
        for f in report.hard + report.soft:
            sid, norm = f.fact_id
            assert sid == f.origin_sid
            assert norm == normalize(f.formula)

    def test_classification_labels(self, report):
        assert all(f.classification == HARD for f in report.hard)
        assert all(f.classification == SOFT for f in report.soft)

    def test_extraction_is_deterministic(self, canonical_program):
        checker = BoundedChecker(BoundedDomain(-4, 4, 3))
        a = extract_hs_intent(canonical_program, checker=checker)
        b = extract_hs_intent(canonical_program, checker=checker)
        assert [f.fact_id for f in a.hard] == [f.fact_id for f in b.hard]
        assert [f.fact_id for f in a.soft] == [f.fact_id for f in b.soft]


class TestTransformWf:
    def test_guarding_attaches_presence_fingerprint(self, report):
        wf = [f for f in report.hard if f.origin_kind == FactOrigin.WF_CHECK]
        for f in wf:
            assert f.classification == HARD
            assert "presence" in f.render()


class TestHardViolations:
    def test_unchanged_program_has_none(self, report, canonical_program,
                                        checker):
        assert hard_violations(report, canonical_program, checker) == []

    def test_weakening_spec_guard_is_allowed(self, report, repaired_program,
                                             checker):
        # The repaired program guards the failing postconditions; no hard
        # fact of the original is invalidated by that patch.
        assert hard_violations(report, repaired_program, checker) == []

    TRUSTED_LOOP = (
        "method T(n: int) returns (r: int)\n"
        "  requires n >= 0\n"
        "  ensures r == n + 1\n"
        "{\n  r := 0;\n"
        "  while r < n\n"
        "    invariant {:trusted} 0 <= r && r <= n\n"
        "  {\n    r := r + 1;\n  }\n}\n")

    def test_trusted_nodes_on_failing_paths_become_hard_facts(self, checker):
        prog = parse_program(self.TRUSTED_LOOP, source_name="t.mvl")
        rep = extract_hs_intent(prog, checker=checker)
        trusted = [f for f in rep.hard if f.origin_kind == FactOrigin.TRUSTED]
        assert trusted
        assert all(f.presence_fp is not None for f in trusted)

    def test_removing_a_trusted_clause_is_caught(self, checker):
        prog = parse_program(self.TRUSTED_LOOP, source_name="t.mvl")
        rep = extract_hs_intent(prog, checker=checker)
        dropped = "".join(
            l for l in self.TRUSTED_LOOP.splitlines(keepends=True)
            if "{:trusted}" not in l)
        patched = parse_program(dropped, source_name="patched.mvl")
        bad = hard_violations(rep, patched, checker)
        assert any("trusted fact removed" in msg for msg in bad)

    def test_deleting_statement_discharges_its_wf_facts(self, report, checker):
        # Dropping the loop (and with it every statement the wf facts are
        # anchored to) leaves presence-guarded obligations vacuous; the
        # remaining violations concern actual spec facts, not wf ones.
        src = ("method FindFirstOdd(arr: array<int>) returns (odd: int)\n"
               "{\n  odd := -1;\n}\n")
        prog = parse_program(src, source_name="small.mvl")
        bad = hard_violations(report, prog, checker)
        assert all(f.origin_kind != FactOrigin.WF_CHECK for f in bad)


class TestRendering:
    def test_report_header_counts(self, report):
        text = render_intent_report(report)
        assert text.startswith("partitions: 20 conforming, 3 nonconforming")
        assert "hard intent (25):" in text
        assert "soft intent (10):" in text

    def test_facts_render_with_anchors(self, report):
        text = render_intent_report(report)
        assert "[wf_check sid=2]" in text


class TestScoping:
    def test_conforming_program_has_no_soft_facts(self, repaired_program,
                                                  checker):
        rep = extract_hs_intent(repaired_program, checker=checker)
        assert rep.soft == []
        assert rep.hard

    def test_method_filter(self, canonical_program, checker):
        rep = extract_hs_intent(canonical_program, method="FindFirstOdd",
                                checker=checker)
        assert rep.method == "FindFirstOdd"
        assert len(rep.hard) == 25
