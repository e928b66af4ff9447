"""Provability against a literal subset-enumeration oracle."""
import random

from co2calc import pcl
from co2calc.terms import principal

from oracles import ATOMS, PRINCIPALS, oracle_derivable, random_clause_set, to_formulas


def test_entailment_agrees_with_subset_enumeration():
    rng = random.Random(7)
    for _ in range(1000):
        clauses = random_clause_set(rng, max_clauses=8)
        env = to_formulas(clauses)
        truth = oracle_derivable(clauses)
        for who in PRINCIPALS:
            for a in ATOMS:
                for fact in (False, True):
                    goal = pcl.says(principal(who), pcl.PAtom(a, fact))
                    assert pcl.pcl_entails(env, goal) == ((who, a, fact) in truth), (clauses, who, a, fact)


def test_fixpoint_deletion_order_independence_random():
    rng = random.Random(8)
    for _ in range(300):
        clauses = [c for f in to_formulas(random_clause_set(rng, 8)) for c in pcl.clauses_of(f)]
        seeds, imps, cimps = pcl.split(clauses)
        ref = set(pcl.greatest_support(cimps, seeds, imps))
        for _ in range(5):
            got = pcl.greatest_support(cimps, seeds, imps, order=lambda bad: rng.choice(bad))
            assert set(got) == ref
