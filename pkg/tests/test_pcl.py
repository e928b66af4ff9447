import random

import pytest

from co2calc import pcl
from co2calc.errors import UnsupportedGoal
from co2calc.parser import parse_pcl
from co2calc.terms import principal

A, B = principal("A"), principal("B")


def entails(env, goal):
    return pcl.pcl_entails([parse_pcl(c) for c in env], parse_pcl(goal))


def test_sale_entailment():
    assert entails(["A says ((B says pay) -> ship)", "B says pay"], "(A says ship) /\\ (B says pay)")


def test_axiom_instances():
    assert entails([], "true -->> true")
    assert entails(["a -->> a"], "a")
    assert entails(["b -->> a", "a -->> b"], "a /\\ b")
    assert not entails(["b -> a", "a -> b"], "a")


@pytest.mark.parametrize("env, expected", [
    (["A says ((B says b) -> a)", "B says b"], True),
    (["A says ((B says b) -> a)", "B says ((A says a) -> b)"], False),
    (["A says ((B says b) -> a)", "B says ((A says a) -->> b)"], True),
    (["A says ((B says b) -->> a)", "B says ((A says a) -->> b)"], True),
])
def test_archetypes(env, expected):
    assert entails(env, "(A says a) /\\ (B says b)") is expected


def test_facts_imply_promises():
    assert entails(["A says !a"], "A says a")
    assert not entails(["A says a"], "A says !a")


def test_disjunctive_heads_are_opaque():
    env = ["A says (b \\/ c)"]
    assert entails(env, "A says (b \\/ c)")
    assert entails(env, "(A says b) \\/ (A says c)")
    assert not entails(env, "A says b")


def test_implication_goals():
    assert entails(["A says ((B says b) -> a)"], "(B says b) -> (A says a)")
    assert entails(["A says ((B says b) -> a)"], "(B says b) -->> (A says a)")
    with pytest.raises(UnsupportedGoal):
        entails(["A says a"], "(B says b) -->> (A says c)")


def test_obligations_and_fulfilment():
    env = [parse_pcl("A says ((B says pay) -> ship)"), parse_pcl("B says pay")]
    assert pcl.pcl_obligations(env, A) == ["ship"]
    assert pcl.pcl_obligations(env, B) == ["pay"]
    env = pcl.pcl_step(env, B, pcl.atom("pay"))
    assert pcl.pcl_fulfilled(env, B) and not pcl.pcl_fulfilled(env, A)
    env = pcl.pcl_step(env, A, pcl.atom("snakeOil"))
    assert pcl.pcl_obligations(env, A) == ["ship"]


def test_model_normalize_deduplicates():
    m = pcl.PclModel()
    f = parse_pcl("A says a")
    assert m.normalize([f, f]) == (f,)


def test_contractual_fixpoint_is_order_independent():
    rng = random.Random(3)
    env = [parse_pcl(t) for t in [
        "A says ((B says b) -->> a)", "B says ((A says a) -->> b)",
        "C says ((D says d) -->> c)", "D says ((C says x) -->> d)", "C says ((A says a) -> x)",
    ]]
    clauses = [c for f in env for c in pcl.clauses_of(f)]
    seeds, imps, cimps = pcl.split(clauses)
    ref = set(pcl.greatest_support(cimps, seeds, imps))
    for _ in range(20):
        got = pcl.greatest_support(cimps, seeds, imps, order=lambda bad: rng.choice(bad))
        assert set(got) == ref


@pytest.mark.parametrize("text", [
    "A says ((B says pay) -> ship)",
    "(a2 says ship) -->> pay",
    "A says (b \\/ c) /\\ !d",
    "(A says a) -> (B says b) -> c",
])
def test_pretty_parse_roundtrip(text):
    f = parse_pcl(text)
    assert parse_pcl(pcl.pretty(f)) == f
