import pytest

from co2calc import pcl
from co2calc.errors import AgreementSearchError, Co2Error
from co2calc.parser import parse_pcl, parse_source
from co2calc.runtime import Reducer, normalise
from co2calc.runtime.congruence import universe
from co2calc.runtime.reduction import MAX_LATENTS, agreement_search
from co2calc.runtime.syntax import Latent, free_idents, all_idents
from co2calc.runtime.trace import index_strategy, run_trace
from co2calc.terms import Kind, Substitution, principal, session, svar

from conftest import load

CORPUS = ["sale_pcl", "broker", "escrow", "snakeoil_promise_ship", "snakeoil_contract",
          "protected_buyer", "ecommerce_ccs", "ecommerce_pcl", "compliance", "minimality"]


def system(text):
    sf = parse_source(text)
    return sf, normalise(sf.system, sf.model, sf.defs), Reducer(sf.model, sf.defs)


# -- structural congruence ---------------------------------------------------------------

def test_congruent_systems_normalise_equally():
    a = "model pcl\nsystem A[(x, b) tell A {x: (b says pay) -> ship} . do x ship] | B[(y) tell A {y: pay}]"
    b = "model pcl\nsystem B[(y) tell A {y: pay} | 0] | A[(b, x) (tell A {x: (b says pay) -> ship} . do x ship | 0)]"
    _, ca, ra = system(a)
    _, cb, rb = system(b)
    assert ca == cb
    assert {s.target for s in ra.steps(ca)} == {s.target for s in rb.steps(cb)}


def test_alpha_renaming_on_extrusion_clash():
    _, cfg, _ = system("model pcl\nsystem A[(x) tell A {x: a}] | B[(x) tell B {x: b}]")
    assert len(cfg.delims) == 2 and len({v.text for v in cfg.delims}) == 2


def test_garbage_laws():
    _, cfg, red = system("model pcl\nsystem (s) (A[{s: A says a} | tell A {s: a} . tau | tau] | s[0])")
    comps = cfg.agent(principal("A"))
    assert len(comps) == 1  # only the tau survives
    _, cfg, _ = system("model pcl\nsystem A[(x) tau]")
    assert cfg.delims == ()  # unused delimiters vanish


def test_top_level_calls_are_unfolded():
    sf, cfg, red = system("model pcl\ndef Loop() = tau . Loop();\nsystem A[Loop()]")
    steps = red.steps(cfg)
    assert [s.rule for s in steps] == ["Tau"] and steps[0].target == cfg


# -- rules ------------------------------------------------------------------------------

def test_tell_to_missing_agent_is_not_enabled():
    _, cfg, red = system("model pcl\nsystem A[(x) tell C {x: a}]")
    assert red.steps(cfg) == []


def test_ask_waits_for_entailment():
    _, cfg, red = system("model pcl\nsystem (s) (A[ask s (A says b) . tau] | s[A says a])")
    assert red.steps(cfg) == []
    _, cfg, red = system("model pcl\nsystem (s) (A[ask s (A says a) . tau] | s[A says a])")
    assert [s.rule for s in red.steps(cfg)] == ["Ask"]


def test_ask_instantiates_its_variables():
    _, cfg, red = system("model pcl\nsystem (s) (A[(u) ask s [u] (u says a) . tell u {x: b}] | B[0] | s[B says a])")
    (st,), = [red.steps(cfg)]
    assert st.rule == "Ask" and {str(k): str(v) for k, v in st.sigma.items()} == {"u": "B"}


def test_do_requires_a_matching_contract_step():
    _, cfg, red = system("model pcl\nsystem (s) (A[do s pay] | s[A says ship])")
    assert [s.rule for s in red.steps(cfg)] == ["Do"]  # PCL: any promise can be done
    _, cfg, red = system("model ccs\nsystem (s) (A[do s pay!] | s[A says (ship^)])")
    assert red.steps(cfg) == []


def test_do_synchronises_two_agents():
    _, cfg, red = system("model ccs\nsystem (s) (A[do s pay?] | B[do s pay!] | s[A says (pay?), B says (pay!)])")
    (st,) = red.steps(cfg)
    assert st.rule == "Do" and str(st.label) == "<A says pay?, B says pay!>"
    assert all(c == () for _, c in st.target.agents)


def test_minimal_agreements(corpus):
    sf, cfg, red = corpus("minimality")
    tr = run_trace(cfg, red, "first")
    fuse = next(s for s in tr.steps if s.rule == "Fuse")
    fused = {str(k.var) for k in fuse.witness.fused}
    assert fused == {"x1", "x2"}
    d = tr.final.agent(principal("D"))
    assert [str(c.var) for c in d if isinstance(c, Latent)] == ["x3"]


def test_two_levels_of_compliance(corpus):
    sf, cfg, red = corpus("compliance")
    for _ in range(3):  # the three tells
        cfg = red.steps(cfg)[0].target
    fuses = [s for s in red.steps(cfg) if s.rule == "Fuse"]
    assert len(fuses) == 2
    obligations = sorted(tuple(sf.model.obligations(s.target.session(s.session), principal("A"))) for s in fuses)
    assert obligations == [("a",), ("a", "a'")]


def test_agreement_search_cap():
    latents = [Latent(svar(f"x{i}"), parse_pcl("A says a")) for i in range(MAX_LATENTS + 1)]
    with pytest.raises(AgreementSearchError):
        agreement_search(pcl.PclModel(), principal("A"), latents, parse_pcl("A says a"), svar("x0"),
                         [principal("A")], session("s1"))


# -- invariants over runs ----------------------------------------------------------------------

def _closed(cfg, model):
    free = set()
    for _, comps in cfg.agents:
        for c in comps:
            free |= {i for i in free_idents(c, model) if i.is_var}
    for _, cs in cfg.sessions:
        for c in cs:
            free |= model.contract_fv(c)
    return free <= set(cfg.delims)


@pytest.mark.parametrize("name", CORPUS)
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_step_invariants_on_random_runs(name, seed):
    sf, cfg, red = load(name)
    m = sf.model
    source_names = {i.text for i in all_idents(sf.system, m)}
    tr = run_trace(cfg, red, f"random:{seed}", max_steps=40)
    prev = cfg
    for st in tr.steps:
        nxt = st.target
        assert _closed(nxt, m)
        assert normalise(nxt, m, sf.defs) == nxt  # successors are canonical
        if st.rule == "Fuse":
            assert st.session.text not in source_names
            assert prev.session(st.session) is None
        if st.rule in ("Fuse", "Ask"):
            dom = set(st.sigma)
            assert not dom & set(nxt.delims)
            assert not dom & universe(nxt, m)
        if st.rule == "Do":
            assert nxt.session(st.session) in m.step(prev.session(st.session), st.label)
            for who, comps in prev.agents:
                if who not in st.agents:
                    assert nxt.agent(who) == comps
        prev = nxt


@pytest.mark.parametrize("name", ["sale_pcl", "minimality", "compliance", "ecommerce_pcl", "broker"])
def test_agreements_are_minimal(name):
    sf, cfg, red = load(name)
    m = sf.model
    seen = [cfg]
    frontier = [cfg]
    witnesses = []
    while frontier:
        c = frontier.pop()
        for st in red.steps(c):
            if st.witness:
                witnesses.append(st.witness)
            if st.target not in seen:
                seen.append(st.target)
                frontier.append(st.target)
    assert witnesses
    for w in witnesses:
        for v in w.sigma:
            if v.kind is Kind.SESSION_VAR:
                continue
            smaller = Substitution({k: x for k, x in w.sigma.items() if k != v})
            cs = m.normalize(m.subst_contract(k.contract, smaller) for k in w.fused)
            closed = not any(m.contract_fv(c) for c in cs) and not m.observable_fv(m.subst_observable(w.observable, smaller))
            assert not (closed and m.entails(cs, m.subst_observable(w.observable, smaller)))


def test_traces_are_deterministic():
    sf, cfg, red = load("escrow")
    a = run_trace(cfg, red, "random:5").to_json(sf.model)
    b = run_trace(cfg, red, "random:5").to_json(sf.model)
    assert a == b


def test_index_strategy_replays():
    sf, cfg, red = load("sale_pcl")
    rec = run_trace(cfg, red, "indices:1,0,0")
    assert rec.rules == ["Tell2", "Tell1", "Fuse"] and not rec.stuck
    again = run_trace(cfg, red, index_strategy([1, 0, 0]))
    assert again.to_json(sf.model) == rec.to_json(sf.model)
    with pytest.raises(Co2Error):
        run_trace(cfg, red, "indices:7")


def test_max_steps_flag():
    _, cfg, red = system("model pcl\ndef Loop() = tau . Loop();\nsystem A[Loop()]")
    rec = run_trace(cfg, red, "first", max_steps=5)
    assert rec.max_steps_exceeded and len(rec.steps) == 5


def test_empty_system():
    _, cfg, red = system("model pcl\nsystem 0")
    rec = run_trace(cfg, red)
    assert rec.steps == [] and rec.stuck
