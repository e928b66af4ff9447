import pytest

from co2calc import ccs, ltl
from co2calc.errors import DefinitionError, StateCapExceeded
from co2calc.parser import parse_ccs, parse_contracts, parse_ltl
from co2calc.terms import ActionLabel, principal

A, B = principal("A"), principal("B")


def contract(text):
    return ccs.from_components(parse_contracts(text, "ccs"))


def test_sale_computation_is_exactly_two_labelled_steps():
    c = contract("A says (pay?.ship^), B says (pay!)")
    g = ccs.ccs_reachable(c)
    assert [len(e) for e in g.edges] == [1, 1, 0]
    (l1, s1), = g.edges[0]
    (l2, s2), = g.edges[s1]
    assert str(l1) == "<A says pay?, B says pay!>"
    assert str(l2) == "<A says ship^>"
    assert g.states[s2] == ccs.ZERO


def test_sync_label_lists_the_input_first():
    c = contract("B says (pay!), A says (pay?)")
    (lab, tgt), = ccs.ccs_step(ccs.canonical(c))
    assert lab.principals == (A, B) and tgt == ccs.ZERO


def test_self_synchronisation_is_allowed():
    c = contract("A says (a? | a!)")
    (lab, _), = ccs.ccs_step(ccs.canonical(c))
    assert lab.principals == (A, A)


def test_no_sync_inside_one_unparallel_prefix():
    assert not ccs.ccs_step(ccs.canonical(contract("A says (a?.a!)")))


def test_out_process_graph():
    out_q = parse_ccs("rec X = tau^ + q!.X")
    g = ccs.ccs_reachable(out_q, open_moves=True)
    assert len(g.states) == 2
    loops = [(str(l), j) for l, j in g.edges[0]]
    assert ("q!", 0) in loops
    assert any(j == 1 for _, j in g.edges[0])
    # closed semantics: the bare output cannot fire alone
    assert not any(isinstance(l, ccs.CcsAtom) and l.polarity == ccs.OUTPUT
                   for l, _ in ccs.ccs_step(ccs.canonical(out_q)))


def test_canonical_form_is_structural():
    c1 = contract("A says (a? | 0), B says (b!)")
    c2 = contract("B says (b!), A says (a?)")
    assert ccs.canonical(c1) == ccs.canonical(c2)
    assert ccs.canonical(contract("A says (0)")) == ccs.ZERO


def test_guardedness():
    with pytest.raises(DefinitionError):
        ccs.check_guarded(parse_ccs("rec X = X"))
    ccs.check_guarded(parse_ccs("rec X = a!.X"))


def test_state_cap():
    c = contract("A says (rec X = a^.(X | X))")
    with pytest.raises(StateCapExceeded):
        ccs.ccs_reachable(c, state_cap=5)


def test_entailment_and_fulfilment():
    c = contract("A says (pay?.ship^), B says (pay!)")
    assert ccs.ccs_entails(c, parse_ltl("<> pay!"))
    assert ccs.ccs_entails(c, parse_ltl("<> (pay? /\\ <> ship^)"))
    assert not ccs.ccs_entails(c, parse_ltl("[] pay!"))
    assert not ccs.ccs_fulfilled(c, A)
    assert ccs.ccs_fulfilled(ccs.ZERO, A)
    assert [ccs.pretty(r) for r in ccs.residuals(c, B)] == ["pay!"]


def test_ltl_next_is_strong_on_finite_traces():
    c = contract("A says (a^)")
    assert not ccs.ccs_entails(c, parse_ltl("X true"))
    assert ccs.ccs_entails(c, parse_ltl("a^ /\\ !X true"))


def test_model_step_filters_by_label():
    m = ccs.CcsModel()
    cs = m.normalize(parse_contracts("A says (pay?.ship^), B says (pay!)", "ccs"))
    lab = ActionLabel(((A, ccs.inp("pay")), (B, ccs.out("pay"))))
    assert m.step(cs, lab) == [m.normalize(parse_contracts("A says (ship^)", "ccs"))]
    assert m.step(cs, ActionLabel(((A, ccs.auto("ship")),))) == []


@pytest.mark.parametrize("text", [
    "A says (pay?.ship^) | B says (pay!)",
    "A says (a?.b! + c^.(d? | e!))",
    "(rec X = tau^ + q/A!.X)",
    "A says (b!) | A says (a?)",
])
def test_pretty_parse_roundtrip(text):
    c = parse_ccs(text)
    assert ccs.pretty(parse_ccs(ccs.pretty(c))) == ccs.pretty(c)
    assert ccs.canonical(parse_ccs(ccs.pretty(c))) == ccs.canonical(c)
