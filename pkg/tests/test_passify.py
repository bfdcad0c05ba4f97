"""Passification: path enumeration, single assignment, loop abstraction."""
import pytest

from mvl.errors import PathLimitError
from mvl.parser import parse_expr, parse_program
from mvl.passify import Role, passify_method, wf_obligations
from mvl.printer import expr_text
from mvl.syntax import BoolLit, free_vars


def paths_of(src):
    prog = parse_program(src)
    return passify_method(prog, prog.methods[0]), prog


def roles(path):
    return [st.role for st in path]


class TestPathEnumeration:
    def test_straight_line_single_path(self):
        r, _ = paths_of("method A(x: int) returns (r: int)\n"
                        "  ensures r == x\n{\n  r := x;\n}\n")
        assert len(r.paths) == 1
        assert roles(r.paths[0]) == [Role.REQUIRES, Role.ASSIGN,
                                     Role.POSTCONDITION]

    def test_branch_doubles_paths_and_merges_with_phi(self):
        r, _ = paths_of("method B(c: bool) returns (r: int)\n"
                        "  ensures r >= 0\n{\n"
                        "  if c {\n    r := 1;\n  } else {\n    r := 0;\n  }\n}\n")
        assert len(r.paths) == 2
        assert [s.role for s in r.paths[0]].count(Role.PHI) == 1
        then_roles, else_roles = roles(r.paths[0]), roles(r.paths[1])
        assert Role.BRANCH_THEN in then_roles
        assert Role.BRANCH_ELSE in else_roles

    def test_loop_contributes_body_and_exit_paths(self):
        r, _ = paths_of("method C(n: int) returns (r: int)\n"
                        "  ensures r >= 0\n{\n  r := 0;\n"
                        "  while r < n\n    invariant r >= 0\n"
                        "  {\n    r := r + 1;\n  }\n}\n")
        assert len(r.paths) == 2
        body, exit_ = r.paths
        assert roles(body) == [Role.REQUIRES, Role.ASSIGN, Role.INV_ENTRY,
                               Role.INV_ASSUME, Role.LOOP_GUARD, Role.ASSIGN,
                               Role.INV_MAINTAIN, Role.CUT]
        assert roles(exit_) == [Role.REQUIRES, Role.ASSIGN, Role.INV_ENTRY,
                                Role.INV_ASSUME, Role.LOOP_EXIT,
                                Role.POSTCONDITION]

    def test_nested_branches_multiply(self):
        src = ("method D(a: bool, b: bool) returns (r: int)\n{\n"
               "  if a {\n    r := 1;\n  } else {\n    r := 2;\n  }\n"
               "  if b {\n    r := 3;\n  } else {\n    r := 4;\n  }\n}\n")
        r, _ = paths_of(src)
        assert len(r.paths) == 4

    def test_path_explosion_is_rejected(self):
        branch = "  if b {\n    r := r + 1;\n  } else {\n    r := r + 2;\n  }\n"
        src = ("method E(b: bool) returns (r: int)\n{\n  r := 0;\n"
               + branch * 9 + "}\n")
        with pytest.raises(PathLimitError):
            paths_of(src)


class TestSingleAssignment:
    SRC = ("method S(x: int) returns (r: int)\n  ensures r >= x\n{\n"
           "  r := x;\n  r := r + 1;\n  r := r + 1;\n}\n")

    def test_each_version_assigned_once(self):
        r, _ = paths_of(self.SRC)
        lhs = []
        for st in r.paths[0]:
            if st.role == Role.ASSIGN:
                # Every assignment formula is `fresh == rhs`.
                text = expr_text(st.formula)
                lhs.append(text.split(" == ")[0])
        assert len(lhs) == 3
        assert len(set(lhs)) == 3

    def test_postcondition_sees_final_version(self):
        r, _ = paths_of(self.SRC)
        post = r.paths[0][-1]
        assign_targets = [expr_text(s.formula).split(" == ")[0]
                          for s in r.paths[0] if s.role == Role.ASSIGN]
        assert assign_targets[-1] in free_vars(post.formula)

    def test_var_types_cover_all_versions(self):
        r, _ = paths_of(self.SRC)
        for st in r.paths[0]:
            for name in free_vars(st.formula):
                assert name in r.var_types


class TestLoopAbstraction:
    SRC = ("method L(n: int) returns (r: int)\n  ensures r >= 0\n{\n"
           "  r := 0;\n  while r < n\n    invariant r >= 0\n"
           "  {\n    r := r + 1;\n  }\n}\n")

    def test_loop_head_havocs_modified_variable(self):
        r, _ = paths_of(self.SRC)
        body = r.paths[0]
        entry = next(s for s in body if s.role == Role.INV_ENTRY)
        assume = next(s for s in body if s.role == Role.INV_ASSUME)
        # The invariant is re-assumed over a fresh (havoced) version.
        assert free_vars(entry.formula) != free_vars(assume.formula)

    def test_body_path_ends_in_false_cut(self):
        r, _ = paths_of(self.SRC)
        cut = r.paths[0][-1]
        assert cut.role == Role.CUT
        assert not cut.is_assert
        assert cut.formula == BoolLit(False)

    def test_exit_path_assumes_negated_guard(self):
        r, _ = paths_of(self.SRC)
        exit_ = next(s for s in r.paths[1] if s.role == Role.LOOP_EXIT)
        assert "!(" in expr_text(exit_.formula) or "<" not in expr_text(exit_.formula)

    def test_break_checks_invariants_then_cuts(self):
        src = ("method K(n: int) returns (r: int)\n{\n  r := 0;\n"
               "  while r < n\n    invariant r >= 0\n  {\n    break;\n  }\n}\n")
        r, _ = paths_of(src)
        body = r.paths[0]
        assert [s.role for s in body[-2:]] == [Role.INV_MAINTAIN, Role.CUT]
        assert body[-1].formula == BoolLit(False)

    def test_for_loop_gets_synthetic_bounds_invariant(self):
        src = ("method F(n: int) returns (s: int)\n  requires n >= 0\n"
               "  ensures s >= 0\n{\n  s := 0;\n"
               "  for k := 0 to n\n    invariant s >= 0\n"
               "  {\n    s := s + 1;\n  }\n}\n")
        r, _ = paths_of(src)
        entry_texts = [expr_text(s.formula) for p in r.paths for s in p
                       if s.role == Role.INV_ENTRY]
        assert any("<=" in t and "k" in t for t in entry_texts)


class TestOriginLinks:
    def test_assert_statements_carry_source_sid(self, canonical_program):
        r = passify_method(canonical_program,
                           canonical_program.method("FindFirstOdd"))
        for path in r.paths:
            for st in path:
                if st.is_assert and st.role != Role.WF_CHECK:
                    assert st.origin is not None
                    assert st.origin_sid == st.origin.sid


class TestWfObligations:
    def test_plain_index(self):
        (site, ob), = wf_obligations(parse_expr("a[i] == 0"))
        assert expr_text(ob) == "0 <= i && i < a.Length"

    def test_implication_context_guards(self):
        (_, ob), = wf_obligations(parse_expr("found ==> a[i] == 0"))
        assert expr_text(ob) == "found ==> 0 <= i && i < a.Length"

    def test_earlier_conjuncts_guard_later_sites(self):
        (_, ob), = wf_obligations(
            parse_expr("0 <= i && i < a.Length && a[i] > 0"))
        assert expr_text(ob) == "0 <= i && i < a.Length ==> 0 <= i && i < a.Length"

    def test_quantifier_closes_binder(self):
        (_, ob), = wf_obligations(
            parse_expr("forall i :: 0 <= i < n ==> a[i] == 0"))
        assert free_vars(ob) == {"n", "a"}

    def test_nested_index_produces_two_sites(self):
        obs = wf_obligations(parse_expr("a[a[i]] == 0"))
        assert len(obs) == 2

    def test_no_array_no_obligations(self):
        assert wf_obligations(parse_expr("x + y > 0")) == []
