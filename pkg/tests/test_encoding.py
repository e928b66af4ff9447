import pytest

from co2calc import ccs, encoding, pcl
from co2calc.errors import FragmentError
from co2calc.parser import parse_ccs, parse_pcl
from co2calc.terms import principal


def test_mangling_and_out_process():
    assert encoding.mangle("a", principal("A")) == "a/A"
    assert ccs.pretty(encoding.out_process("a/A")) == "(rec X = tau^ + a/A!.X)"


def test_fragment_recognition():
    f = encoding.from_formula(parse_pcl("A says ((B says b) -->> a) /\\ B says b"))
    assert [c.kind for c in f.conjuncts] == ["cimp", "atoms"]
    for bad in ["A says (a \\/ b)", "a", "A says !a", "A says ((B says b) -> (a \\/ c))", "x says a"]:
        with pytest.raises(FragmentError):
            encoding.from_formula(parse_pcl(bad))


def test_encoding_reparses():
    f = parse_pcl("A says ((B says b) -> a) /\\ B says ((A says a) -->> b)")
    enc = encoding.encode(f)
    assert ccs.canonical(parse_ccs(ccs.pretty(enc))) == ccs.canonical(enc)


@pytest.mark.parametrize("text, provable", [
    ("A says ((B says b) -> a) /\\ B says b", True),
    ("A says ((B says b) -> a) /\\ B says ((A says a) -> b)", False),
    ("A says ((B says b) -> a) /\\ B says ((A says a) -->> b)", True),
    ("A says ((B says b) -->> a) /\\ B says ((A says a) -->> b)", True),
])
def test_theorems_on_archetypes(text, provable):
    t2 = encoding.check_theorem2(parse_pcl(text))
    assert t2.lhs is provable and t2.agrees
    assert encoding.check_theorem1(parse_pcl(text)).agrees


def test_empty_formula():
    t2 = encoding.check_theorem2(encoding.PclMinus(()))
    assert t2.lhs and t2.rhs


def test_theorems_on_a_small_random_corpus():
    for f in encoding.random_corpus(60, seed=1):
        assert encoding.check_theorem2(f).agrees, str(f)
        assert encoding.check_theorem1(f).agrees, str(f)
