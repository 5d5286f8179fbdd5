import pytest
from hypothesis import given, settings
from test_logic import formulas

from aqdtrees.errors import FormulaError, FormulaSyntaxError
from aqdtrees.logic import (ROOT, And, Eq, Exists, Forall, Implies, Not, Or, ParentOf, Var,
                            example_one, formula_for_KEIN)
from aqdtrees.syntax import parse_formula, to_text

x, y = Var("x"), Var("y")


@pytest.mark.parametrize("text,expected", [
    ("x = R", Eq(x, ROOT)),
    ("pi(y) = x", ParentOf(y, x)),
    ("!x = y", Not(Eq(x, y))),
    ("x = y & y = x | x = R", Or(And(Eq(x, y), Eq(y, x)), Eq(x, ROOT))),
    ("x = R -> y = R -> x = y", Implies(Eq(x, ROOT), Implies(Eq(y, ROOT), Eq(x, y)))),
    ("E x . x = R & pi(x) = R", Exists("x", And(Eq(x, ROOT), ParentOf(x, ROOT)))),
    ("(A x . x = x) & R = R", And(Forall("x", Eq(x, x)), Eq(ROOT, ROOT))),
])
def test_parse(text, expected):
    assert parse_formula(text) == expected


@pytest.mark.parametrize("text", ["", "x =", "E . x = x", "pi(x) = ", "(x = y", "x = y)",
                                  "x = y &", "E R . x = x", "x # y"])
def test_syntax_errors(text):
    with pytest.raises(FormulaError):
        parse_formula(text)


def test_error_carries_offset():
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula("x = y )")
    assert "6" in str(info.value)


@pytest.mark.parametrize("phi", [example_one(), formula_for_KEIN(0), formula_for_KEIN(3)])
def test_round_trip_known(phi):
    assert parse_formula(to_text(phi)) == phi


@settings(max_examples=400, deadline=None)
@given(formulas())
def test_round_trip_random(phi):
    text = to_text(phi)
    assert parse_formula(text) == phi
    assert to_text(parse_formula(text)) == text
