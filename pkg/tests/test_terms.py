import pytest
from hypothesis import given, strategies as st

from co2calc.errors import SortError
from co2calc.terms import (
    ActionLabel, Kind, Substitution, fresh_session_name, fresh_text, principal, pvar, session, svar,
)

names = st.text(alphabet="abcxyz", min_size=1, max_size=3)
pairs = st.lists(st.tuples(names, names), max_size=5)


def test_ident_sorts():
    assert principal("A").is_name and principal("A").kind.is_principal
    assert svar("x").is_var and svar("x").kind.is_session
    assert repr(pvar("b")) == "b:p"
    with pytest.raises(SortError):
        principal("")


def test_substitution_rejects_ill_sorted_bindings():
    with pytest.raises(SortError):
        Substitution({pvar("b"): session("s")})
    with pytest.raises(SortError):
        Substitution({principal("A"): principal("B")})
    with pytest.raises(SortError):
        Substitution({svar("x"): svar("y")})


@given(pairs)
def test_substitution_application_and_restriction(bindings):
    sigma = Substitution({svar(v): session(n) for v, n in bindings})
    for v in sigma:
        assert sigma(v) == sigma[v]
        assert sigma(v).is_name
    assert sigma(principal("A")) == principal("A")
    dom = list(sigma)[:1]
    assert set(sigma.restrict(dom)) == set(dom)
    assert set(sigma.without(dom)) | set(dom) == set(sigma)
    assert sigma.restrict(dom).issubset(sigma)
    assert Substitution().issubset(sigma)
    assert hash(sigma) == hash(Substitution(dict(sigma)))


@given(pairs, pairs)
def test_union_is_right_biased(a, b):
    s1 = Substitution({svar(v): session(n) for v, n in a})
    s2 = Substitution({svar(v): session(n) for v, n in b})
    u = s1.union(s2)
    assert s2.issubset(u)
    for k in s1:
        assert u[k] == (s2[k] if k in s2 else s1[k])


@given(st.sets(st.integers(min_value=1, max_value=20)), st.sets(names))
def test_fresh_session_name_is_lowest_unused(used, other):
    universe = {session(f"s{k}") for k in used} | {svar(o) for o in other}
    s = fresh_session_name(universe)
    assert s not in universe and s.kind is Kind.SESSION_NAME
    k = int(s.text[1:])
    assert all(j in used for j in range(1, k))


def test_fresh_session_name_is_deterministic():
    u = [session("s1"), svar("s2"), principal("A")]
    assert fresh_session_name(u) == fresh_session_name(list(reversed(u))) == session("s3")


@given(st.sets(names), names)
def test_fresh_text(taken, base):
    t = fresh_text(base, set(taken))
    assert t not in taken
    if base not in taken:
        assert t == base


def test_action_label():
    lab = ActionLabel(((principal("A"), "pay"),))
    assert len(lab) == 1 and lab.principals == (principal("A"),)
    assert str(lab) == "<A says pay>"
    with pytest.raises(ValueError):
        ActionLabel(())
    with pytest.raises(SortError):
        ActionLabel(((pvar("a"), "pay"),))
