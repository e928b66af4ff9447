"""PCL- (the clausal fragment without facts or disjunctions) and its encoding into processes.

Each ``A says q`` becomes a persistent output ``OUT(q/A) = rec X = tau^ + q/A!.X``;
``->`` premises become an input chain guarding the outputs, ``-->>``
premises an input chain running alongside them.  Theorem 2 relates
provability of the latent actions with reachability of ``0``; Theorem 1
relates "every fulfilling run performs the latent actions" with
"some run of the encoding fulfils everybody".
"""
from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field

from . import ccs, pcl
from .errors import FragmentError, StateCapExceeded
from .terms import Ident, principal


@dataclass(frozen=True)
class MinusClause:
    """``premises => heads`` said by ``sayer``; ``kind`` is 'atoms', 'imp' or 'cimp'."""

    sayer: Ident
    kind: str
    premises: tuple[tuple[Ident, str], ...]
    heads: tuple[str, ...]


@dataclass(frozen=True)
class PclMinus:
    conjuncts: tuple[MinusClause, ...]

    def to_formula(self) -> pcl.Formula:
        parts = []
        for c in self.conjuncts:
            heads = pcl.conj(*(pcl.atom(q) for q in c.heads)) if c.heads else pcl.TOP
            if c.kind == "atoms":
                body = heads
            else:
                prem = pcl.conj(*(pcl.says(b, pcl.atom(p)) for b, p in c.premises)) if c.premises else pcl.TOP
                body = pcl.imp(prem, heads) if c.kind == "imp" else pcl.cimp(prem, heads)
            parts.append(pcl.says(c.sayer, body))
        return pcl.PAnd(tuple(parts)) if len(parts) != 1 else parts[0]

    @property
    def principals(self) -> list[Ident]:
        out = {c.sayer for c in self.conjuncts}
        out |= {b for c in self.conjuncts for b, _ in c.premises}
        return sorted(out)

    def __str__(self) -> str:
        return pcl.pretty(self.to_formula()) if self.conjuncts else "true"


def _atoms(f: pcl.Formula, what: str) -> tuple[str, ...]:
    if isinstance(f, pcl.PTrue):
        return ()
    if isinstance(f, pcl.PAtom) and not f.fact:
        return (f.name,)
    if isinstance(f, pcl.PAnd):
        return tuple(a for p in f.parts for a in _atoms(p, what))
    raise FragmentError(f"{what} must be a conjunction of promise atoms, got {pcl.pretty(f)}")


def _says_atoms(f: pcl.Formula) -> tuple[tuple[Ident, str], ...]:
    if isinstance(f, pcl.PTrue):
        return ()
    if isinstance(f, pcl.PSays) and isinstance(f.body, pcl.PAtom) and not f.body.fact:
        return ((f.principal, f.body.name),)
    if isinstance(f, pcl.PAnd):
        return tuple(a for p in f.parts for a in _says_atoms(p))
    raise FragmentError(f"premises must be a conjunction of says-atoms, got {pcl.pretty(f)}")


def from_formula(f: pcl.Formula) -> PclMinus:
    """Recognise a PCL- formula; raises :class:`FragmentError` otherwise."""
    out: list[MinusClause] = []

    def top(g: pcl.Formula) -> None:
        if isinstance(g, pcl.PAnd):
            for p in g.parts:
                top(p)
        elif isinstance(g, pcl.PTrue):
            pass
        elif isinstance(g, pcl.PSays):
            body = g.body
            if isinstance(body, (pcl.PImp, pcl.PCImp)):
                kind = "imp" if isinstance(body, pcl.PImp) else "cimp"
                out.append(MinusClause(g.principal, kind, _says_atoms(body.premise), _atoms(body.head, "heads")))
            else:
                out.append(MinusClause(g.principal, "atoms", (), _atoms(body, "says-bodies")))
        else:
            raise FragmentError(f"PCL- conjuncts must be says-wrapped, got {pcl.pretty(g)}")

    top(f)
    if not all(i.is_name for c in out for i in [c.sayer, *(b for b, _ in c.premises)]):
        raise FragmentError("PCL- formulae must be closed")
    return PclMinus(tuple(out))


def mangle(q: str, who: Ident) -> str:
    """The injective tagging ``q/A``."""
    return f"{q}/{who}"


def out_process(name: str) -> ccs.Contract:
    """``OUT(name) = rec X = tau^ + name!.X``."""
    var = "X"
    return ccs.Rec(var, ccs.choice(ccs.prefix(ccs.TAU), ccs.prefix(ccs.out(name), ccs.ProcVar(var))))


def _par(parts) -> ccs.Contract:
    parts = tuple(parts)
    if not parts:
        return ccs.ZERO
    return parts[0] if len(parts) == 1 else ccs.Par(parts)


def _outs(heads, who) -> ccs.Contract:
    return _par(out_process(mangle(q, who)) for q in heads)


def _chain(premises, then: ccs.Contract) -> ccs.Contract:
    atoms = [ccs.inp(mangle(p, b)) for b, p in premises]
    return ccs.prefix(*atoms, then)


def encode_clause(c: MinusClause) -> ccs.Contract:
    if c.kind == "atoms":
        return _outs(c.heads, c.sayer)
    if c.kind == "imp":
        return _chain(c.premises, _outs(c.heads, c.sayer))
    return _par((_outs(c.heads, c.sayer), _chain(c.premises, ccs.ZERO)))


def encode(c: PclMinus | pcl.Formula) -> ccs.Contract:
    if not isinstance(c, PclMinus):
        c = from_formula(c)
    return _par(ccs.Says(k.sayer, encode_clause(k)) for k in c.conjuncts)


def latent_actions(c: PclMinus | pcl.Formula) -> frozenset[tuple[Ident, str]]:
    if not isinstance(c, PclMinus):
        c = from_formula(c)
    acts = set()
    for k in c.conjuncts:
        acts.update((k.sayer, q) for q in k.heads)
        acts.update(k.premises)
    return frozenset(acts)


def latent_formula(acts) -> pcl.Formula:
    return pcl.conj(*(pcl.says(who, pcl.atom(q)) for who, q in sorted(acts)))


# -- theorem checks ------------------------------------------------------------------

@dataclass
class TheoremResult:
    formula: str
    lhs: bool
    rhs: bool
    witness_trace: list[str] | None = None
    detail: dict = field(default_factory=dict)

    @property
    def agrees(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        out = {"formula": self.formula, "lhs": self.lhs, "rhs": self.rhs}
        if self.witness_trace is not None:
            out["witnessTrace"] = self.witness_trace
        if self.detail:
            out.update(self.detail)
        return out


def zero_reachable(c: ccs.Contract, state_cap: int | None = None) -> list[str] | None:
    """Labels of a shortest run of ``c`` to ``0``, or None if ``0`` is unreachable."""
    cap = ccs.default_state_cap() if state_cap is None else state_cap
    start = ccs.canonical(c)
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if s == ccs.ZERO:
            trace = []
            while parent[s] is not None:
                s, lab = parent[s]
                trace.append(str(lab))
            return trace[::-1]
        for lab, t in ccs.ccs_step(s):
            if t not in parent:
                if len(parent) >= cap:
                    raise StateCapExceeded(cap)
                parent[t] = (s, lab)
                queue.append(t)
    return None


def check_theorem2(c: PclMinus | pcl.Formula, state_cap: int | None = None) -> TheoremResult:
    if not isinstance(c, PclMinus):
        c = from_formula(c)
    acts = latent_actions(c)
    formula = c.to_formula()
    lhs = pcl.pcl_entails([formula], latent_formula(acts)) if acts else True
    trace = zero_reachable(encode(c), state_cap)
    d = pcl.derivation([formula])
    detail = {"entailed": sorted(pcl.show_tatom(t) for t in d.atoms),
              "W": len(d.fired_cimps)}
    return TheoremResult(str(c), lhs, trace is not None, trace, detail)


def _all_fulfilled(env, who_all) -> bool:
    return all(pcl.pcl_fulfilled(env, who) for who in who_all)


def check_theorem1(c: PclMinus | pcl.Formula, state_cap: int | None = None) -> TheoremResult:
    """Both sides of Theorem 1, each computed directly.

    lhs: no run of the pcl LTS that leaves every principal fulfilled misses a
    latent action.  Firing order is irrelevant (the environment only grows)
    and firings outside ``lambda(c)`` can neither discharge nor create
    obligations that matter, so runs are the subsets of ``lambda(c)``.
    rhs: some run of the encoding reaches a state where every principal is
    fulfilled.
    """
    if not isinstance(c, PclMinus):
        c = from_formula(c)
    acts = sorted(latent_actions(c))
    formula = c.to_formula()
    who_all = c.principals
    counter = None
    for k in range(len(acts)):
        for fired in itertools.combinations(acts, k):
            env = [formula]
            for who, q in fired:
                env = list(pcl.pcl_step(env, who, pcl.atom(q)))
            if _all_fulfilled(env, who_all):
                counter = fired
                break
        if counter is not None:
            break
    lhs = counter is None

    encoded = encode(c)
    cap = ccs.default_state_cap() if state_cap is None else state_cap
    graph_trace = _find_fulfilled(encoded, who_all, cap)
    detail = {}
    if counter is not None:
        detail["fulfillingRunMissing"] = sorted(f"{w} says {q}" for w, q in set(acts) - set(counter))
    return TheoremResult(str(c), lhs, graph_trace is not None, graph_trace, detail)


def _find_fulfilled(c: ccs.Contract, who_all, cap: int) -> list[str] | None:
    start = ccs.canonical(c)
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if all(ccs.ccs_fulfilled(s, who) for who in who_all):
            trace = []
            while parent[s] is not None:
                s, lab = parent[s]
                trace.append(str(lab))
            return trace[::-1]
        for lab, t in ccs.ccs_step(s):
            if t not in parent:
                if len(parent) >= cap:
                    raise StateCapExceeded(cap)
                parent[t] = (s, lab)
                queue.append(t)
    return None


# -- random corpus -----------------------------------------------------------------------

def random_formula(rng: random.Random, max_principals: int = 3, max_atoms: int = 4,
                   max_conjuncts: int = 4, max_premises: int = 2, max_heads: int = 2) -> PclMinus:
    names = [principal(n) for n in "ABC"[:max_principals]]
    atoms = list("abcd")[:max_atoms]
    conjuncts = []
    for _ in range(rng.randint(1, max_conjuncts)):
        sayer = rng.choice(names)
        kind = rng.choice(["atoms", "imp", "cimp"])
        heads = tuple(rng.sample(atoms, rng.randint(1, max_heads)))
        premises = ()
        if kind != "atoms":
            premises = tuple((rng.choice(names), rng.choice(atoms)) for _ in range(rng.randint(1, max_premises)))
        conjuncts.append(MinusClause(sayer, kind, premises, heads))
    return PclMinus(tuple(conjuncts))


def random_corpus(n: int, seed: int, **kw) -> list[PclMinus]:
    rng = random.Random(seed)
    return [random_formula(rng, **kw) for _ in range(n)]
