import glob
import os

import pytest

from co2calc import pretty
from co2calc.cli import resolve_source
from co2calc.errors import ParseError
from co2calc.parser import parse_file, parse_source
from co2calc.runtime import normalise
from co2calc.runtime.syntax import Agent, Ask, Choice, PDelim, SPar, Tell
from co2calc.terms import Kind

CORPUS = sorted(glob.glob(os.path.join(os.path.dirname(resolve_source("sale_pcl")), "*.co2")))


def printed(sf):
    defs = "".join(pretty.definition(d, sf.model) + "\n" for d in sf.defs.values())
    return f"model {sf.model_name}\n{defs}system {pretty.system(sf.system, sf.model)}\n"


@pytest.mark.parametrize("path", CORPUS, ids=os.path.basename)
def test_corpus_roundtrip_is_a_fixpoint(path):
    sf = parse_file(path)
    once = printed(sf)
    twice = printed(parse_source(once))
    assert once == twice
    m = sf.model
    assert normalise(parse_source(once).system, m) == normalise(sf.system, m, sf.defs)


def diag(text):
    with pytest.raises(ParseError) as e:
        parse_source(text)
    return e.value.diagnostics[0]


def test_empty_file():
    d = diag("")
    assert "missing system block" in d.message and (d.line, d.col) == (1, 1)


def test_unclosed_bracket_span():
    d = diag("model pcl\nsystem A[do x pay")
    assert "unclosed '['" in d.message and "2:9" in d.message
    assert (d.line, d.col) == (2, 18)


def test_sort_conflict():
    d = diag("model pcl\nsystem A[(x) (do x pay | tell A {x: x says a})]")
    assert "both as a principal and as a session" in d.message


def test_unbound_principal_variable():
    d = diag("model pcl\nsystem A[(x) tell A {x: b says pay}]")
    assert "unbound principal variable b" in d.message and d.suggestion


def test_missing_polarity_suggests_fix():
    d = diag("model ccs\nsystem A[(x) tell A {x: pay}]")
    assert "polarity" in d.message and "pay?" in d.suggestion


def test_undefined_call():
    d = diag("model ccs\nsystem A[P()]")
    assert "undefined process identifier P" in d.message


def test_unguarded_definition():
    d = diag("model ccs\ndef P() = P();\nsystem A[P()]")
    assert "unguarded" in d.message


def test_sorts_are_inferred():
    sf = parse_source("model pcl\nsystem A[(x, b) tell A {x: (b says pay) -> ship} . do x ship]")
    agent = sf.system
    assert isinstance(agent, Agent)
    d1 = agent.process
    d2 = d1.body
    assert {d1.var.kind, d2.var.kind} == {Kind.SESSION_VAR, Kind.PRINCIPAL_VAR}
    tell = d2.body.branches[0][0]
    assert isinstance(tell, Tell) and tell.var.kind is Kind.SESSION_VAR


def test_definitions_and_parameter_sorts():
    sf = parse_source(
        "model pcl\n"
        "def Buy(y) = tell A {y: pay} . Pay(y);\n"
        "def Pay(z) = ask z (B says pay) . do z pay;\n"
        "system A[0] | B[(y) Buy(y)]\n")
    assert sf.defs["Buy"].params[0].kind is Kind.SESSION_VAR
    assert sf.defs["Pay"].params[0].kind is Kind.SESSION_VAR


def test_sessions_and_system_delimiters():
    sf = parse_source("model pcl\nsystem (s) (A[do s pay] | s[A says pay, B says ship])")
    cfg = normalise(sf.system, sf.model)
    assert [str(s) for s, _ in cfg.sessions] == ["s"] and [str(s) for s in cfg.restricted] == ["s"]


def test_contract_abbreviations():
    sf = parse_source("model ccs\ncontract c = a?.b!;\nsystem A[(x) tell A {x: $c}]")
    d = diag("model ccs\nsystem A[(x) tell A {x: $c}]")
    assert "undefined contract c" in d.message
    assert sf.contracts["c"]


def test_precedence():
    # `.` binds tighter than `+`, `+` tighter than `|`; a delimiter scopes over one prefix-level term
    sf = parse_source("model ccs\nsystem A[(x) (do x a! . do x b? + do x c^) | tau]")
    text = pretty.process(sf.system.process, sf.model)
    assert text == "(x) (do x a! . do x b? + do x c^) | tau"
    d = diag("model ccs\nsystem A[(x) do x a! + do x c^]")
    assert "prefix-guarded" in d.message
