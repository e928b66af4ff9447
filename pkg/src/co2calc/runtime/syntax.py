"""Abstract syntax of CO2 systems and processes.

Processes: latent contracts ``{x: c}``, guarded sums of prefixes, parallel
composition, delimitation ``(u) P`` and calls ``X(u, ...)``.  Systems:
agents ``A[P]``, sessions ``s[C]``, parallel composition and delimitation.
Contracts and observables are opaque values of the plugged
:class:`~co2calc.terms.ContractModel`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterator

from ..terms import ContractModel, Ident


class Prefix:
    __slots__ = ()


@dataclass(frozen=True)
class Tau(Prefix):
    pass


@dataclass(frozen=True)
class Do(Prefix):
    target: Ident
    atom: Any


@dataclass(frozen=True)
class Tell(Prefix):
    target: Ident
    var: Ident
    contract: Any


@dataclass(frozen=True)
class Ask(Prefix):
    target: Ident
    vars: tuple[Ident, ...]
    observable: Any


@dataclass(frozen=True)
class Fuse(Prefix):
    var: Ident
    observable: Any


class Process:
    __slots__ = ()


@dataclass(frozen=True)
class Latent(Process):
    var: Ident
    contract: Any


@dataclass(frozen=True)
class Choice(Process):
    branches: tuple[tuple[Prefix, Process], ...]


@dataclass(frozen=True)
class PPar(Process):
    parts: tuple[Process, ...]


@dataclass(frozen=True)
class PDelim(Process):
    var: Ident
    body: Process


@dataclass(frozen=True)
class Call(Process):
    name: str
    args: tuple[Ident, ...]


NIL = Choice(())


class System:
    __slots__ = ()


@dataclass(frozen=True)
class Agent(System):
    principal: Ident
    process: Process


@dataclass(frozen=True)
class Session(System):
    name: Ident
    contracts: tuple


@dataclass(frozen=True)
class SPar(System):
    parts: tuple[System, ...]


@dataclass(frozen=True)
class SDelim(System):
    var: Ident
    body: System


ZERO_SYSTEM = SPar(())


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple[Ident, ...]
    body: Process


def seq(*items) -> Process:
    """``seq(p1, p2, ..., P)``: the prefix chain ``p1.p2. ... .P`` (``P`` optional)."""
    items = list(items)
    cont = items.pop() if items and isinstance(items[-1], Process) else NIL
    for p in reversed(items):
        cont = Choice(((p, cont),))
    return cont


def delim(vars_, body):
    for v in reversed(list(vars_)):
        body = PDelim(v, body) if isinstance(body, Process) else SDelim(v, body)
    return body


# -- identifiers --------------------------------------------------------------------

def prefix_idents(p: Prefix, model: ContractModel) -> Iterator[Ident]:
    if isinstance(p, Do):
        yield p.target
    elif isinstance(p, Tell):
        yield p.target
        yield p.var
        yield from model.contract_idents(p.contract)
    elif isinstance(p, Ask):
        yield p.target
        yield from p.vars
        yield from model.observable_idents(p.observable)
    elif isinstance(p, Fuse):
        yield p.var
        yield from model.observable_idents(p.observable)


def free_idents(t: Process | System, model: ContractModel) -> set[Ident]:
    """Free variables and names (session delimiters bind names too)."""
    if isinstance(t, Latent):
        return {t.var, *model.contract_idents(t.contract)}
    if isinstance(t, Choice):
        out: set[Ident] = set()
        for p, k in t.branches:
            out.update(prefix_idents(p, model))
            out |= free_idents(k, model)
        return out
    if isinstance(t, (PPar, SPar)):
        return set().union(*(free_idents(p, model) for p in t.parts)) if t.parts else set()
    if isinstance(t, (PDelim, SDelim)):
        return free_idents(t.body, model) - {t.var}
    if isinstance(t, Call):
        return set(t.args)
    if isinstance(t, Agent):
        return {t.principal} | free_idents(t.process, model)
    if isinstance(t, Session):
        return {t.name, *(i for c in t.contracts for i in model.contract_idents(c))}
    raise TypeError(t)


def free_vars(t, model: ContractModel) -> set[Ident]:
    return {i for i in free_idents(t, model) if i.is_var}


def all_idents(t, model: ContractModel) -> set[Ident]:
    """Every identifier occurring anywhere, bound or free."""
    if isinstance(t, (PDelim, SDelim)):
        return {t.var} | all_idents(t.body, model)
    if isinstance(t, Choice):
        out: set[Ident] = set()
        for p, k in t.branches:
            out.update(prefix_idents(p, model))
            out |= all_idents(k, model)
        return out
    if isinstance(t, (PPar, SPar)):
        return set().union(*(all_idents(p, model) for p in t.parts)) if t.parts else set()
    if isinstance(t, Agent):
        return {t.principal} | all_idents(t.process, model)
    return free_idents(t, model)


# -- renaming / substitution -------------------------------------------------------------

def rename(t, fn: dict[Ident, Ident] | Callable[[Ident], Ident], model: ContractModel):
    """Apply an identifier map to free occurrences; binders shadow their variable.

    A callable map is applied to every occurrence, binders included.

    The map's targets must not be captured by inner binders (targets are
    names or globally fresh variables in every use inside the kernel).
    """
    mapping = dict(fn) if isinstance(fn, dict) else None

    def f_of(m):
        return (lambda i: m.get(i, i)) if m is not None else fn

    def go(x, m):
        if m is not None and not m:
            return x
        f = f_of(m)
        if isinstance(x, Latent):
            return Latent(f(x.var), model.map_contract(x.contract, f))
        if isinstance(x, Choice):
            return Choice(tuple((go_prefix(p, f), go(k, m)) for p, k in x.branches))
        if isinstance(x, PPar):
            return PPar(tuple(go(p, m) for p in x.parts))
        if isinstance(x, SPar):
            return SPar(tuple(go(p, m) for p in x.parts))
        if isinstance(x, (PDelim, SDelim)):
            if m is None:  # a plain function renames binders too
                return type(x)(fn(x.var), go(x.body, m))
            inner = {k: v for k, v in m.items() if k != x.var} if x.var in m else m
            return type(x)(x.var, go(x.body, inner))
        if isinstance(x, Call):
            return Call(x.name, tuple(f(a) for a in x.args))
        if isinstance(x, Agent):
            return Agent(f(x.principal), go(x.process, m))
        if isinstance(x, Session):
            return Session(f(x.name), tuple(model.map_contract(c, f) for c in x.contracts))
        raise TypeError(x)

    def go_prefix(p, f):
        if isinstance(p, Do):
            return Do(f(p.target), p.atom)
        if isinstance(p, Tell):
            return Tell(f(p.target), f(p.var), model.map_contract(p.contract, f))
        if isinstance(p, Ask):
            return Ask(f(p.target), tuple(f(v) for v in p.vars), model.map_observable(p.observable, f))
        if isinstance(p, Fuse):
            return Fuse(f(p.var), model.map_observable(p.observable, f))
        return p

    return go(t, mapping)


def substitute(t, sigma, model: ContractModel):
    """Capture-free application of a substitution (variables to names)."""
    if not sigma:
        return t
    return rename(t, dict(sigma), model)
