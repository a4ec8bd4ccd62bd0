import json
import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parslab.errors import ParseError
from parslab.lambda_weak import Abs, App, Choice, Var, random_term
from parslab.multidist import SubDistribution
from parslab.syntax import (
    dump_multidist,
    dump_subdist,
    dumps,
    fixture_text,
    load_fixture,
    load_multidist,
    load_subdist,
    parse_definitions,
    parse_rules,
    parse_term,
    print_rules,
    print_term,
)

from conftest import md

RULE_FIXTURES = ["fig1.pars", "fig2.pars", "fig3.pars", "fig4.pars", "fig5.pars", "appendix-unconf.pars"]


@pytest.mark.parametrize("name", RULE_FIXTURES)
def test_rule_files_round_trip(name):
    sys = load_fixture(name)
    again = parse_rules(print_rules(sys))
    assert print_rules(again) == print_rules(sys)
    for a in sys.redexes:
        assert [(r.label, r.rhs) for r in again.rules(a)] == [(r.label, r.rhs) for r in sys.rules(a)]


def test_rule_file_basics():
    sys = parse_rules("system s;\n# comment\nrule r0: a -> 1/2 a, 1/2 done;\nrule a -> 1 b-2;\n")
    assert sys.name == "s"
    assert [r.label for r in sys.rules("a")] == ["r0", None]
    assert sys.rules("a")[1].rhs == SubDistribution({"b-2": 1})
    assert sys.is_normal("done")


def test_generated_systems(fig2, fig3):
    assert fig2.rules("3")[0].rhs == SubDistribution({"2": Fr(1, 2), "4": Fr(1, 2)})
    assert fig2.is_normal("0")
    assert len(fig3.rules("2")) == 2
    assert fig3.is_normal("stop")


@pytest.mark.parametrize("text, line, column", [
    ("rule a -> 1/2 b, 1/4 c;", 1, 11),
    ("rule a -> 3/2 b;", 1, 11),
    ("rule a -> 1/0 b;", 1, 11),
    ("\n\nrule a => 1 b;", 3, 8),
    ("rule a -> 1 b", 1, 14),
    ("rule a -> 1 b;\nfrobnicate;", 2, 1),
    ("generator nope;", 1, 11),
    ("rule a -> 1 b $;", 1, 15),
])
def test_rule_parse_errors_have_locations(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_rules(text, "x.pars")
    assert (info.value.line, info.value.column) == (line, column)
    assert str(info.value).startswith(f"x.pars:{line}:{column}:")


def test_probability_sum_message():
    with pytest.raises(ParseError, match="total probability 3/4"):
        parse_rules("rule a -> 1/2 b, 1/4 c;")


def test_term_sugar_and_unicode():
    assert parse_term(r"\x y. x") == Abs("x", Abs("y", Var("x")))
    assert parse_term("λx. x ⊕ x") == parse_term(r"\x. x (+) x")
    assert parse_term("a b c") == App(App(Var("a"), Var("b")), Var("c"))
    assert parse_term("a (+) b (+) c") == Choice(Var("a"), Choice(Var("b"), Var("c")))


def test_term_parse_error():
    with pytest.raises(ParseError) as info:
        parse_term(r"\x. (x")
    assert info.value.line == 1


def test_definitions_expand(defs):
    assert defs["PR"] == App(defs["P"], defs["Rdiv"])
    assert defs["PR"].is_closed()
    assert all(t.is_closed() for t in defs.values())


def test_definitions_error_line():
    with pytest.raises(ParseError) as info:
        parse_definitions("I = \\x. x\nJ ==\n")
    assert info.value.line == 2


def test_lambda_fixture_terms_round_trip(defs):
    for name, term in defs.items():
        assert parse_term(print_term(term)) == term, name


@settings(max_examples=200)
@given(st.integers(0, 10**6), st.integers(2, 24))
def test_print_parse_round_trip(seed, size):
    m = random_term(random.Random(seed), size)
    assert parse_term(print_term(m)) == m


def test_json_codecs(defs):
    m = md("1/4", "a", "3/4", "true")
    assert load_multidist(json.loads(dumps(dump_multidist(m)))) == m
    d = SubDistribution({defs["T"]: Fr(1, 2)})
    assert load_subdist(json.loads(dumps(dump_subdist(d))), "term") == d


def test_dumps_is_stable():
    assert dumps({"b": 1, "a": "λ"}) == '{"a":"\\u03bb","b":1}'


def test_fixture_text_available():
    assert "rule" in fixture_text("fig1.pars")
    assert isinstance(load_fixture("lambda.lam"), dict)
