"""Contracts as CCS-like processes.

Terms are sums of atom-prefixed continuations, ``A says c`` wrappers, parallel
compositions and guarded recursion (``rec X = c``).  Canonical form realises
the structural equivalence: ``|`` is a flattened, sorted multiset without
``0`` factors, ``A says 0`` is ``0``, and ``A says (c | d)`` is split into
``A says c | A says d`` so that a single principal's parallel obligations can
synchronise with each other.
"""
from __future__ import annotations

import functools
import os
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from . import ltl
from .errors import DefinitionError, StateCapExceeded
from .terms import ActionLabel, ContractModel, Ident, Kind

INPUT, OUTPUT, AUTONOMOUS = "-", "+", "0"
_SUFFIX = {INPUT: "?", OUTPUT: "!", AUTONOMOUS: "^"}

DEFAULT_STATE_CAP = 10_000


def default_state_cap() -> int:
    return int(os.environ.get("CO2_STATE_CAP", DEFAULT_STATE_CAP))


@dataclass(frozen=True, order=True)
class CcsAtom:
    name: str
    polarity: str

    def __post_init__(self):
        if self.polarity not in _SUFFIX:
            raise ValueError(f"unknown polarity {self.polarity!r}")

    def __str__(self) -> str:
        return self.name + _SUFFIX[self.polarity]

    def co(self) -> "CcsAtom":
        flip = {INPUT: OUTPUT, OUTPUT: INPUT, AUTONOMOUS: AUTONOMOUS}
        return CcsAtom(self.name, flip[self.polarity])


def inp(name: str) -> CcsAtom:
    return CcsAtom(name, INPUT)


def out(name: str) -> CcsAtom:
    return CcsAtom(name, OUTPUT)


def auto(name: str) -> CcsAtom:
    return CcsAtom(name, AUTONOMOUS)


TAU = auto("tau")


class Contract:
    __slots__ = ()


@dataclass(frozen=True)
class Sum(Contract):
    branches: tuple[tuple[CcsAtom, Contract], ...]


@dataclass(frozen=True)
class Says(Contract):
    principal: Ident
    body: Contract


@dataclass(frozen=True)
class Par(Contract):
    parts: tuple[Contract, ...]


@dataclass(frozen=True)
class Rec(Contract):
    var: str
    body: Contract


@dataclass(frozen=True)
class ProcVar(Contract):
    name: str


ZERO = Sum(())


def prefix(*atoms_then_cont) -> Contract:
    """``prefix(a, b, c)`` is ``a.b.c``; the last argument may be a contract."""
    items = list(atoms_then_cont)
    cont: Contract = items.pop() if items and isinstance(items[-1], Contract) else ZERO
    for atom in reversed(items):
        cont = Sum(((atom, cont),))
    return cont


def par(*parts: Contract) -> Contract:
    return Par(tuple(parts))


def choice(*branches: Contract) -> Contract:
    out_: list = []
    for b in branches:
        if not isinstance(b, Sum):
            raise TypeError("only prefix-guarded sums can be summed")
        out_.extend(b.branches)
    return Sum(tuple(out_))


def says(who: Ident, body: Contract) -> Contract:
    return Says(who, body)


# -- recursion ---------------------------------------------------------------

def _subst_var(c: Contract, name: str, by: Contract) -> Contract:
    if isinstance(c, ProcVar):
        return by if c.name == name else c
    if isinstance(c, Sum):
        return Sum(tuple((a, _subst_var(k, name, by)) for a, k in c.branches))
    if isinstance(c, Says):
        return Says(c.principal, _subst_var(c.body, name, by))
    if isinstance(c, Par):
        return Par(tuple(_subst_var(p, name, by) for p in c.parts))
    if isinstance(c, Rec):
        return c if c.var == name else Rec(c.var, _subst_var(c.body, name, by))
    raise TypeError(c)


def unfold(c: Rec) -> Contract:
    return _subst_var(c.body, c.var, c)


def check_guarded(c: Contract, bound: frozenset[str] = frozenset()) -> None:
    """Raise :class:`DefinitionError` on free or unguarded recursion variables."""

    def walk(t: Contract, guarded: frozenset[str], unguarded: frozenset[str]) -> None:
        if isinstance(t, ProcVar):
            if t.name in unguarded:
                raise DefinitionError(f"recursion variable {t.name} is not prefix-guarded")
            if t.name not in guarded:
                raise DefinitionError(f"undefined process identifier {t.name}")
        elif isinstance(t, Sum):
            for _, k in t.branches:
                walk(k, guarded | unguarded, frozenset())
        elif isinstance(t, Says):
            walk(t.body, guarded, unguarded)
        elif isinstance(t, Par):
            for p in t.parts:
                walk(p, guarded, unguarded)
        elif isinstance(t, Rec):
            walk(t.body, guarded - {t.var}, unguarded | {t.var})

    walk(c, bound, frozenset())


# -- canonical form ----------------------------------------------------------

@functools.lru_cache(maxsize=200_000)
def canonical(c: Contract) -> Contract:
    if isinstance(c, Sum):
        branches = tuple(sorted(((a, canonical(k)) for a, k in c.branches), key=_key))
        return Sum(branches)
    if isinstance(c, Par):
        flat: list[Contract] = []
        for p in c.parts:
            q = canonical(p)
            if q == ZERO:
                continue
            flat.extend(q.parts if isinstance(q, Par) else (q,))
        if not flat:
            return ZERO
        if len(flat) == 1:
            return flat[0]
        return Par(tuple(sorted(flat, key=_key)))
    if isinstance(c, Says):
        body = canonical(c.body)
        if body == ZERO:
            return ZERO
        if isinstance(body, Par):
            return canonical(Par(tuple(Says(c.principal, p) for p in body.parts)))
        return Says(c.principal, body)
    if isinstance(c, Rec):
        return Rec(c.var, canonical(c.body))
    if isinstance(c, ProcVar):
        return c
    raise TypeError(f"not a contract: {c!r}")


def _key(x) -> str:
    return repr(x)


def components(c: Contract) -> tuple[Contract, ...]:
    c = canonical(c)
    if c == ZERO:
        return ()
    return c.parts if isinstance(c, Par) else (c,)


def from_components(parts: Iterable[Contract]) -> Contract:
    return canonical(Par(tuple(parts)))


# -- transitions ---------------------------------------------------------------

def _moves(c: Contract) -> Iterator[tuple[object, Contract]]:
    """Raw (atom) and complete (ActionLabel) moves, before top-level filtering."""
    if isinstance(c, Sum):
        yield from c.branches
    elif isinstance(c, Rec):
        yield from _moves(unfold(c))
    elif isinstance(c, ProcVar):
        raise DefinitionError(f"undefined process identifier {c.name}")
    elif isinstance(c, Says):
        for lab, k in _moves(c.body):
            if isinstance(lab, CcsAtom) and lab.polarity == AUTONOMOUS:
                yield ActionLabel(((c.principal, lab),)), Says(c.principal, k)
    elif isinstance(c, Par):
        parts = c.parts
        for i, p in enumerate(parts):
            for lab, k in _moves(p):
                yield lab, Par(parts[:i] + (k,) + parts[i + 1:])
        views = [_says_view(p) for p in parts]
        for i, vi in enumerate(views):
            if vi is None:
                continue
            ins = [(a, k) for a, k in _moves(vi.body) if isinstance(a, CcsAtom) and a.polarity == INPUT]
            if not ins:
                continue
            for j, vj in enumerate(views):
                if j == i or vj is None:
                    continue
                for a, k1 in ins:
                    for b, k2 in _moves(vj.body):
                        if isinstance(b, CcsAtom) and b.polarity == OUTPUT and b.name == a.name:
                            lab = ActionLabel(((vi.principal, a), (vj.principal, b)))
                            new = list(parts)
                            new[i] = Says(vi.principal, k1)
                            new[j] = Says(vj.principal, k2)
                            yield lab, Par(tuple(new))
    else:
        raise TypeError(f"not a contract: {c!r}")


def _says_view(c: Contract) -> Says | None:
    seen = 0
    while isinstance(c, Rec) and seen < 64:
        c = unfold(c)
        seen += 1
    return c if isinstance(c, Says) else None


@functools.lru_cache(maxsize=200_000)
def ccs_step(c: Contract) -> frozenset[tuple[ActionLabel, Contract]]:
    """Every transition of a closed contract, with canonical successors.

    Only complete labels ``<A says a^0>`` and ``<A1 says a-, A2 says a+>``
    reach the top level.
    """
    c = canonical(c)
    result = set()
    for lab, k in _moves(c):
        if isinstance(lab, ActionLabel):
            result.add((lab, canonical(k)))
    return frozenset(result)


@functools.lru_cache(maxsize=50_000)
def ccs_open_step(c: Contract) -> frozenset[tuple[object, Contract]]:
    """Like :func:`ccs_step` but also keeping unsynchronised atom moves (open-system view)."""
    c = canonical(c)
    return frozenset((lab, canonical(k)) for lab, k in _moves(c))


def ccs_reachable(c: Contract, state_cap: int | None = None, open_moves: bool = False) -> ltl.LabelledGraph:
    """Reachability graph of ``c`` modulo structural equivalence (state 0 is ``c``).

    With ``open_moves`` the graph also carries bare atom labels, i.e. the
    moves a context could still synchronise with.
    """
    cap = default_state_cap() if state_cap is None else state_cap
    step = ccs_open_step if open_moves else ccs_step
    start = canonical(c)
    index = {start: 0}
    states = [start]
    edges: list[list] = [[]]
    if len(states) > cap:
        raise StateCapExceeded(cap)
    queue = deque([start])
    while queue:
        s = queue.popleft()
        i = index[s]
        for lab, t in sorted(step(s), key=_key):
            if t not in index:
                if len(states) >= cap:
                    raise StateCapExceeded(cap)
                index[t] = len(states)
                states.append(t)
                edges.append([])
                queue.append(t)
            edges[i].append((lab, index[t]))
    return ltl.LabelledGraph(states, edges)


def label_satisfies(atom: CcsAtom, label: ActionLabel) -> bool:
    """Atomic LTL semantics: ``a^0`` matches ``<A says a^0>``; ``a+``/``a-`` match the sync on ``a``."""
    if atom.polarity == AUTONOMOUS:
        return len(label) == 1 and label.atoms[0] == atom
    return len(label) == 2 and label.atoms[0].name == atom.name


@functools.lru_cache(maxsize=50_000)
def _entails_cached(c: Contract, phi: ltl.Formula, cap: int) -> bool:
    graph = ccs_reachable(c, cap)
    return ltl.holds_on_all_traces(graph, phi, label_satisfies)


def ccs_entails(c: Contract, phi: ltl.Formula, state_cap: int | None = None) -> bool:
    cap = default_state_cap() if state_cap is None else state_cap
    return _entails_cached(canonical(c), phi, cap)


def ccs_fulfilled(c: Contract, who: Ident) -> bool:
    return all(not (isinstance(p, Says) and p.principal == who) for p in components(c))


def residuals(c: Contract, who: Ident) -> list[Contract]:
    return [p.body for p in components(c) if isinstance(p, Says) and p.principal == who]


# -- identifiers -----------------------------------------------------------------

def map_idents(c: Contract, fn: Callable[[Ident], Ident]) -> Contract:
    if isinstance(c, Sum):
        return Sum(tuple((a, map_idents(k, fn)) for a, k in c.branches))
    if isinstance(c, Says):
        return Says(fn(c.principal), map_idents(c.body, fn))
    if isinstance(c, Par):
        return Par(tuple(map_idents(p, fn) for p in c.parts))
    if isinstance(c, Rec):
        return Rec(c.var, map_idents(c.body, fn))
    return c


def idents(c: Contract) -> Iterator[Ident]:
    if isinstance(c, Sum):
        for _, k in c.branches:
            yield from idents(k)
    elif isinstance(c, Says):
        yield c.principal
        yield from idents(c.body)
    elif isinstance(c, Par):
        for p in c.parts:
            yield from idents(p)
    elif isinstance(c, Rec):
        yield from idents(c.body)


# -- printing ------------------------------------------------------------------

def pretty(c: Contract) -> str:
    def go(t: Contract, level: int) -> str:
        # level: 0 parallel context, 1 sum operand, 2 prefix continuation / says body
        if isinstance(t, Sum):
            if not t.branches:
                return "0"
            items = []
            for a, k in t.branches:
                items.append(str(a) if k == ZERO else f"{a}.{go(k, 2)}")
            text = " + ".join(items)
            return text if (len(items) == 1 or level < 2) else f"({text})"
        if isinstance(t, Par):
            text = " | ".join(go(p, 1) for p in t.parts)
            return text if level == 0 else f"({text})"
        if isinstance(t, Says):
            return f"{t.principal} says ({go(t.body, 0)})"
        if isinstance(t, Rec):
            return f"(rec {t.var} = {go(t.body, 1)})"
        if isinstance(t, ProcVar):
            return t.name
        raise TypeError(t)

    return go(c, 0)


def pretty_formula(phi: ltl.Formula) -> str:
    return ltl.pretty(phi, str)


class CcsModel(ContractModel):
    name = "ccs"
    max_label_arity = 2

    def __init__(self, state_cap: int | None = None):
        self.state_cap = state_cap

    def says(self, who: Ident, contract: Contract) -> Contract:
        return Says(who, contract)

    def normalize(self, contracts: Iterable[Contract]) -> tuple:
        flat: list[Contract] = []
        for c in contracts:
            flat.extend(components(c))
        return tuple(sorted(flat, key=_key))

    def step(self, contracts: tuple, label: ActionLabel) -> list[tuple]:
        whole = from_components(contracts)
        return sorted(
            {self.normalize((k,)) for lab, k in ccs_step(whole) if lab == label}, key=_key
        )

    def entails(self, contracts: tuple, observable: ltl.Formula) -> bool:
        return ccs_entails(from_components(contracts), observable, self.state_cap)

    def fulfilled(self, contracts: tuple, who: Ident) -> bool:
        return ccs_fulfilled(from_components(contracts), who)

    def obligations(self, contracts: tuple, who: Ident) -> list[str]:
        return [pretty(r) for r in residuals(from_components(contracts), who)]

    def map_contract(self, contract, fn):
        return map_idents(contract, fn)

    def map_observable(self, observable, fn):
        return observable

    def contract_idents(self, contract):
        return idents(contract)

    def observable_idents(self, observable):
        return iter(())

    def pretty_contract(self, contract) -> str:
        return pretty(contract)

    def pretty_observable(self, observable) -> str:
        return pretty_formula(observable)

    def pretty_atom(self, atom: CcsAtom) -> str:
        return str(atom)


def is_closed(c: Contract) -> bool:
    return all(i.kind is Kind.PRINCIPAL_NAME for i in idents(c))
