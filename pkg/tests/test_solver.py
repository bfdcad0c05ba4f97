"""Bounded validity checking, witnesses, and the SMT subprocess client."""
import os
import stat
import textwrap

import pytest
from hypothesis import given, settings, strategies as st

from mvl.errors import BackendUnavailableError, MalformedModelError, ShapeError
from mvl.parser import parse_expr
from mvl.solver import (
    BoundedChecker, BoundedDomain, SmtBackend, ValidityStatus, evaluate,
    expr_to_smt, parse_model, smt_script,
)
from mvl.syntax import Type

INT = Type.INT
BOOL = Type.BOOL
ARR = Type.ARRAY_INT


def check(text, types, domain=None):
    checker = BoundedChecker(domain or BoundedDomain(-4, 4, 3))
    return checker.check(parse_expr(text), types)


class TestDomain:
    def test_int_range_inclusive(self, domain):
        assert list(domain.ints()) == list(range(-4, 5))

    def test_array_count(self, domain):
        # All int tuples of length 0..3 over nine values.
        assert len(domain.arrays()) == 1 + 9 + 81 + 729

    def test_defaults(self, domain):
        assert domain.default_for(INT) == -4
        assert domain.default_for(ARR) == ()
        assert domain.default_for(BOOL) is False

    def test_invalid_bounds_rejected(self):
        with pytest.raises(ShapeError):
            BoundedDomain(3, -3, 2)
        with pytest.raises(ShapeError):
            BoundedDomain(-2, 2, -1)


class TestVerdicts:
    def test_tautology_valid(self):
        v = check("x >= x", {"x": INT})
        assert v.is_valid and v.witness is None

    def test_contradiction_invalid_with_witness(self):
        v = check("x > x", {"x": INT})
        assert v.is_invalid
        assert evaluate(parse_expr("x > x"), v.witness) is False

    def test_witness_is_a_full_assignment(self):
        v = check("x + y > 0", {"x": INT, "y": INT})
        assert v.is_invalid
        assert set(v.witness) == {"x", "y"}

    def test_domain_edge_validity(self):
        # Valid only because the domain is bounded at 4.
        assert check("x <= 4", {"x": INT}).is_valid
        assert check("x <= 3", {"x": INT}).is_invalid

    def test_array_quantifier(self):
        v = check("forall i :: 0 <= i < a.Length ==> a[i] >= -4",
                  {"a": ARR})
        assert v.is_valid

    def test_out_of_bounds_reads_are_zero(self):
        assert check("a[a.Length] == 0", {"a": ARR}).is_valid

    def test_exists_over_empty_range_is_false(self):
        v = check("exists i :: 0 <= i < 0 && i == i", {"i": INT})
        assert v.is_invalid

    def test_division_is_euclidean(self):
        assert evaluate(parse_expr("-3 / 2 == -2"), {}) is True
        assert evaluate(parse_expr("-3 % 2 == 1"), {}) is True

    def test_division_by_zero_yields_unknown(self):
        v = check("x / y == x / y", {"x": INT, "y": INT})
        assert v.status == ValidityStatus.UNKNOWN

    def test_closed_formulas_decided_without_search(self):
        assert check("1 + 1 == 2", {}).is_valid
        inv = check("1 + 1 == 3", {})
        assert inv.is_invalid and inv.witness == {}

    def test_false_antecedent_prunes_search(self):
        v = check("x > 4 ==> x == 99", {"x": INT})
        assert v.is_valid


class TestCacheAndDeterminism:
    def test_verdicts_are_cached(self, checker):
        f = parse_expr("x * x >= 0")
        v1 = checker.check(f, {"x": INT})
        v2 = checker.check(f, {"x": INT})
        assert v1 is v2

    def test_same_witness_across_checkers(self):
        f = parse_expr("x + y != 1")
        a = BoundedChecker(BoundedDomain(-4, 4, 3)).check(f, {"x": INT, "y": INT})
        b = BoundedChecker(BoundedDomain(-4, 4, 3)).check(f, {"x": INT, "y": INT})
        assert a.witness == b.witness


@st.composite
def bounded_formula(draw):
    """Small formulas over two ints and one bool."""
    x = st.sampled_from(["x", "y"])

    def atom():
        op = draw(st.sampled_from(["<", "<=", "==", "!=", ">", ">="]))
        lhs = draw(x)
        rhs = draw(st.one_of(x, st.integers(-4, 4).map(str)))
        return "%s %s %s" % (lhs, op, rhs)

    parts = [atom() for _ in range(draw(st.integers(1, 3)))]
    glue = draw(st.sampled_from([" && ", " || ", " ==> "]))
    text = glue.join(parts)
    if draw(st.booleans()):
        text = "b ==> (%s)" % text
    return text


@given(bounded_formula())
@settings(max_examples=60, deadline=None)
def test_invalid_witnesses_replay_false(text):
    f = parse_expr(text)
    types = {"x": INT, "y": INT, "b": BOOL}
    v = BoundedChecker(BoundedDomain(-4, 4, 3)).check(f, types)
    if v.is_invalid:
        assert evaluate(f, v.witness) is False


@given(bounded_formula())
@settings(max_examples=60, deadline=None)
def test_invalidity_is_monotone_under_enlargement(text):
    f = parse_expr(text)
    types = {"x": INT, "y": INT, "b": BOOL}
    small = BoundedChecker(BoundedDomain(-4, 4, 3)).check(f, types)
    if small.is_invalid:
        big = BoundedChecker(BoundedDomain(-5, 5, 3)).check(f, types)
        assert big.is_invalid


class TestSmtTranslation:
    def test_script_golden(self):
        script = smt_script(parse_expr("x + 1 > y"), {"x": INT, "y": INT})
        assert script == textwrap.dedent("""\
            (set-logic ALL)
            (declare-const x Int)
            (declare-const y Int)
            (assert (not (> (+ x 1) y)))
            (check-sat)
            (get-model)
            """)

    def test_arrays_become_length_and_uninterpreted_function(self):
        script = smt_script(parse_expr("a[0] == 0"), {"a": ARR})
        assert "(declare-const a$len Int)" in script
        assert "(declare-fun a$elem (Int) Int)" in script
        # Out-of-range reads are pinned to zero to match evaluation.
        assert "(or (< i 0) (>= i a$len))" in script

    def test_quantifier_translation(self):
        smt = expr_to_smt(parse_expr("forall i :: 0 <= i < 3 ==> i >= 0"))
        assert smt == "(forall ((i Int)) (=> (and (<= 0 i) (< i 3)) (>= i 0)))"

    def test_negative_literals_use_unary_minus(self):
        assert expr_to_smt(parse_expr("-3")) == "(- 3)"


class TestModelParsing:
    def test_define_fun_constants(self):
        model = "((define-fun x () Int 3)\n (define-fun y () Int (- 2)))"
        assert parse_model(model, {"x": INT, "y": INT}) == {"x": 3, "y": -2}

    def test_bool_values(self):
        model = "((define-fun b () Bool true))"
        assert parse_model(model, {"b": BOOL}) == {"b": True}

    def test_array_reassembly(self):
        model = ("((define-fun a$len () Int 2)\n"
                 " (define-fun a$elem ((i!0 Int)) Int"
                 " (ite (= i!0 0) 5 (ite (= i!0 1) 7 0))))")
        assert parse_model(model, {"a": ARR}) == {"a": (5, 7)}

    def test_missing_values_fall_back_to_defaults(self):
        assert parse_model("()", {"x": INT}) == {"x": 0}

    def test_garbage_raises(self):
        with pytest.raises(MalformedModelError):
            parse_model("((define-fun x () Int", {"x": INT})


def _fake_solver(tmp_path, body):
    path = tmp_path / "fake-solver.sh"
    path.write_text("#!/bin/sh\n" + body)
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


class TestSmtBackend:
    def test_unsat_means_valid(self, tmp_path):
        cmd = _fake_solver(tmp_path, "echo unsat\n")
        v = SmtBackend(cmd).check(parse_expr("x >= x"), {"x": INT})
        assert v.is_valid
        assert v.backend == "smt"

    def test_sat_model_becomes_witness(self, tmp_path):
        cmd = _fake_solver(
            tmp_path,
            "echo sat\necho '((define-fun x () Int 4))'\n")
        v = SmtBackend(cmd).check(parse_expr("x < 4"), {"x": INT})
        assert v.is_invalid
        assert v.witness == {"x": 4}

    def test_unknown_result(self, tmp_path):
        cmd = _fake_solver(tmp_path, "echo unknown\n")
        v = SmtBackend(cmd).check(parse_expr("x >= x"), {"x": INT})
        assert v.status == ValidityStatus.UNKNOWN

    def test_missing_binary_raises(self):
        with pytest.raises(BackendUnavailableError):
            SmtBackend("/nonexistent/solver-binary").check(
                parse_expr("x >= x"), {"x": INT})

    def test_timeout_degrades_to_unknown(self, tmp_path):
        cmd = _fake_solver(tmp_path, "sleep 5\necho unsat\n")
        v = SmtBackend(cmd, timeout_ms=150).check(
            parse_expr("x >= x"), {"x": INT})
        assert v.status == ValidityStatus.UNKNOWN
        assert v.reason == "timeout"

    def test_command_may_carry_arguments(self, tmp_path):
        cmd = _fake_solver(tmp_path, 'test "$1" = "--flag" && echo unsat\n')
        v = SmtBackend(cmd + " --flag").check(parse_expr("x >= x"), {"x": INT})
        assert v.is_valid
