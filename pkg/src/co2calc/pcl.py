"""Contracts as formulae: the clausal fragment of PCL.

A contract is a conjunction of says-wrapped clauses; each clause is a
conjunction of atoms, or a conjunction of says-atoms implying (``->``) or
contractually implying (``-->>``) a positive and/or-combination of atoms.

Provability is decided by a fixed point.  ``->`` is ordinary modus ponens.
A ``-->>`` clause fires when its premises are derivable *assuming its own
head and the heads of every other clause that fires*; the set ``W`` of firing
``-->>`` clauses is the greatest such set.  Disjunctive heads are opaque:
``ship \\/ fraud`` is recorded as a derived disjunction and never yields
either disjunct.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .errors import FragmentError, UnsupportedGoal
from .terms import ActionLabel, ContractModel, Ident, principal

GLOBAL = principal("_")
"""The reserved sayer of untagged atoms (pure-logic checks only)."""


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class PAtom(Formula):
    name: str
    fact: bool = False

    def __str__(self) -> str:
        return ("!" if self.fact else "") + self.name

    @property
    def promise(self) -> "PAtom":
        return PAtom(self.name, False)


@dataclass(frozen=True)
class PTrue(Formula):
    pass


@dataclass(frozen=True)
class PFalse(Formula):
    pass


@dataclass(frozen=True)
class PAnd(Formula):
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class POr(Formula):
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class PImp(Formula):
    premise: Formula
    head: Formula


@dataclass(frozen=True)
class PCImp(Formula):
    premise: Formula
    head: Formula


@dataclass(frozen=True)
class PSays(Formula):
    principal: Ident
    body: Formula


TOP = PTrue()
BOTTOM = PFalse()


def atom(name: str) -> PAtom:
    return PAtom(name, False)


def fact(name: str) -> PAtom:
    return PAtom(name, True)


def conj(*parts: Formula) -> Formula:
    return PAnd(tuple(parts)) if len(parts) != 1 else parts[0]


def disj(*parts: Formula) -> Formula:
    return POr(tuple(parts)) if len(parts) != 1 else parts[0]


def says(who: Ident, body: Formula) -> Formula:
    return PSays(who, body)


def imp(premise: Formula, head: Formula) -> Formula:
    return PImp(premise, head)


def cimp(premise: Formula, head: Formula) -> Formula:
    return PCImp(premise, head)


# -- clauses -------------------------------------------------------------------

TAtom = tuple  # (principal: Ident, name: str, fact: bool)


def tag(who: Ident, a: PAtom) -> TAtom:
    return (who, a.name, a.fact)


def show_tatom(t: TAtom) -> str:
    who, name, is_fact = t
    text = ("!" if is_fact else "") + name
    return text if who == GLOBAL else f"{who} says {text}"


@dataclass(frozen=True)
class Clause:
    """``premises => heads`` with ``kind`` in {'fact', 'imp', 'cimp'}.

    ``heads`` is a conjunction of disjunctions (each a frozenset of tagged
    atoms); facts have no premises.
    """

    kind: str
    premises: frozenset
    heads: tuple[frozenset, ...]


def show_clause(c: Clause) -> str:
    heads = " /\\ ".join(" \\/ ".join(sorted(map(show_tatom, d))) for d in c.heads) or "true"
    if c.kind == "fact":
        return heads
    prem = " /\\ ".join(sorted(map(show_tatom, c.premises))) or "true"
    return f"{prem} {'->' if c.kind == 'imp' else '-->>'} {heads}"


def _premise_atoms(f: Formula, sayer: Ident) -> frozenset:
    if isinstance(f, PTrue):
        return frozenset()
    if isinstance(f, PAtom):
        return frozenset({tag(sayer, f)})
    if isinstance(f, PSays):
        return _premise_atoms(f.body, f.principal)
    if isinstance(f, PAnd):
        return frozenset().union(*(_premise_atoms(p, sayer) for p in f.parts))
    raise FragmentError(f"implication premises must be conjunctions of atoms, got {pretty(f)}")


def positive_cnf(f: Formula, sayer: Ident) -> tuple[frozenset, ...] | None:
    """CNF of a positive formula as a tuple of disjunctions; ``None`` encodes false."""
    if isinstance(f, PTrue):
        return ()
    if isinstance(f, PFalse):
        return None
    if isinstance(f, PAtom):
        return (frozenset({tag(sayer, f)}),)
    if isinstance(f, PSays):
        return positive_cnf(f.body, f.principal)
    if isinstance(f, PAnd):
        out: list[frozenset] = []
        for p in f.parts:
            sub = positive_cnf(p, sayer)
            if sub is None:
                return None
            out.extend(sub)
        return _simplify_cnf(out)
    if isinstance(f, POr):
        subs = [positive_cnf(p, sayer) for p in f.parts]
        subs = [s for s in subs if s is not None]
        if not subs:
            return None
        if any(s == () for s in subs):
            return ()
        out = [frozenset().union(*combo) for combo in itertools.product(*subs)]
        return _simplify_cnf(out)
    raise FragmentError(f"expected a positive and/or-combination of atoms, got {pretty(f)}")


def _simplify_cnf(clauses: Iterable[frozenset]) -> tuple[frozenset, ...]:
    uniq = set(clauses)
    keep = [c for c in uniq if not any(d < c for d in uniq)]
    return tuple(sorted(keep, key=lambda c: sorted(map(repr, c))))


def clauses_of(f: Formula, sayer: Ident = GLOBAL) -> list[Clause]:
    """Decompose a contract into clauses; raises :class:`FragmentError` outside the fragment."""
    if isinstance(f, PSays):
        return clauses_of(f.body, f.principal)
    if isinstance(f, PAnd):
        return [c for p in f.parts for c in clauses_of(p, sayer)]
    if isinstance(f, PTrue):
        return []
    if isinstance(f, (PAtom, POr)):
        heads = positive_cnf(f, sayer)
        return [Clause("fact", frozenset(), heads)]
    if isinstance(f, (PImp, PCImp)):
        heads = positive_cnf(f.head, sayer)
        if heads is None:
            raise FragmentError("false is not allowed as an implication head")
        kind = "imp" if isinstance(f, PImp) else "cimp"
        return [Clause(kind, _premise_atoms(f.premise, sayer), heads)]
    raise FragmentError(f"not a clausal contract: {pretty(f)}")


# -- provability ---------------------------------------------------------------

@dataclass(frozen=True)
class Derivation:
    atoms: frozenset
    disjunctions: frozenset
    fired_cimps: tuple[Clause, ...]

    def holds_clause(self, goal: frozenset) -> bool:
        return bool(goal & self.atoms) or any(d <= goal for d in self.disjunctions)


def _with_promises(atoms: set) -> None:
    for who, name, is_fact in list(atoms):
        if is_fact:
            atoms.add((who, name, False))


def closure(base: Iterable[frozenset], rules: Iterable[Clause]) -> tuple[frozenset, frozenset]:
    """Forward-chain ``->`` rules from ``base`` (a list of head disjunctions)."""
    atoms: set = set()
    disjunctions: set = set()
    for d in base:
        (atoms.update(d) if len(d) == 1 else disjunctions.add(d))
    _with_promises(atoms)
    pending = list(rules)
    changed = True
    while changed:
        changed = False
        rest = []
        for r in pending:
            if r.premises <= atoms:
                for d in r.heads:
                    if len(d) == 1:
                        atoms.update(d)
                    else:
                        disjunctions.add(d)
                changed = True
            else:
                rest.append(r)
        pending = rest
        if changed:
            _with_promises(atoms)
    return frozenset(atoms), frozenset(disjunctions)


def split(clauses: Iterable[Clause]) -> tuple[list[frozenset], list[Clause], list[Clause]]:
    seeds: list[frozenset] = []
    imps: list[Clause] = []
    cimps: list[Clause] = []
    for c in clauses:
        if c.kind == "fact":
            seeds.extend(c.heads)
        elif c.kind == "imp":
            imps.append(c)
        else:
            cimps.append(c)
    return seeds, imps, cimps


def supported(w: Iterable[Clause], seeds, imps) -> list[Clause]:
    """Members of ``w`` whose premises follow from seeds and the heads of ``w``."""
    w = list(w)
    atoms, _ = closure(list(seeds) + [d for c in w for d in c.heads], imps)
    return [c for c in w if c.premises <= atoms]


def greatest_support(cimps: list[Clause], seeds, imps, order: Callable | None = None) -> list[Clause]:
    """Greatest self-supporting set of ``-->>`` clauses.

    Unsupported clauses are deleted until stable; ``order`` may pick which
    unsupported clause goes first (the result does not depend on it).
    """
    w = list(cimps)
    while True:
        ok = supported(w, seeds, imps)
        if len(ok) == len(w):
            return w
        bad = [c for c in w if c not in ok]
        victim = order(bad) if order else None
        if victim is None:
            w = ok
        else:
            w = [c for c in w if c is not victim]


def derive(clauses: Iterable[Clause]) -> Derivation:
    seeds, imps, cimps = split(clauses)
    w = greatest_support(cimps, seeds, imps)
    atoms, disjunctions = closure(seeds + [d for c in w for d in c.heads], imps)
    return Derivation(atoms, disjunctions, tuple(w))


def _env_clauses(env: Iterable[Formula]) -> tuple[Clause, ...]:
    return tuple(c for f in env for c in clauses_of(f))


@functools.lru_cache(maxsize=50_000)
def _derive_env(env: tuple[Formula, ...]) -> Derivation:
    return derive(_env_clauses(env))


def _goal_parts(phi: Formula, sayer: Ident) -> list[tuple[frozenset, tuple[frozenset, ...], bool]]:
    """Split a goal into (assumptions, CNF, contractual?) conjuncts."""
    if isinstance(phi, PSays) and isinstance(phi.body, (PImp, PCImp, PAnd)):
        return _goal_parts(phi.body, phi.principal)
    if isinstance(phi, PAnd) and any(isinstance(p, (PImp, PCImp, PSays, PAnd)) for p in phi.parts):
        return [g for p in phi.parts for g in _goal_parts(p, sayer)]
    if isinstance(phi, (PImp, PCImp)):
        try:
            prem = _premise_atoms(phi.premise, sayer)
            heads = positive_cnf(phi.head, sayer)
        except FragmentError as exc:
            raise UnsupportedGoal(str(exc)) from None
        return [(prem, heads, isinstance(phi, PCImp))]
    try:
        cnf = positive_cnf(phi, sayer)
    except FragmentError as exc:
        raise UnsupportedGoal(str(exc)) from None
    return [(frozenset(), cnf, False)]


def pcl_entails(env: Iterable[Formula], phi: Formula) -> bool:
    """Decide ``env |- phi`` for clausal contracts and goals.

    Goals: positive and/or-combinations of (says-)atoms, clauses
    ``premises -> head``, and conjunctions of these.  A ``-->>`` goal is
    proved through the stronger ``->`` and otherwise reported as
    :class:`UnsupportedGoal`.
    """
    env = tuple(env)
    base = _derive_env(env)
    for prem, cnf, contractual in _goal_parts(phi, GLOBAL):
        if cnf is None:
            if prem:
                raise UnsupportedGoal("negated premises are outside the fragment")
            return False
        d = base if not prem else derive(_env_clauses(env) + (Clause("fact", frozenset(), tuple(frozenset({p}) for p in prem)),))
        if not all(d.holds_clause(g) for g in cnf):
            if contractual:
                raise UnsupportedGoal("contractual-implication goal not provable via ->; refutation is outside the fragment")
            return False
    return True


def derivation(env: Iterable[Formula]) -> Derivation:
    return _derive_env(tuple(env))


# -- LTS and fulfilment ------------------------------------------------------------

def pcl_step(env: Iterable[Formula], who: Ident, a: PAtom) -> tuple[Formula, ...]:
    a = a.promise
    return tuple(env) + (PSays(who, a), PSays(who, PAtom(a.name, True)))


def atom_names(f: Formula) -> set[str]:
    if isinstance(f, PAtom):
        return {f.name}
    if isinstance(f, (PSays,)):
        return atom_names(f.body)
    if isinstance(f, (PAnd, POr)):
        return set().union(*(atom_names(p) for p in f.parts)) if f.parts else set()
    if isinstance(f, (PImp, PCImp)):
        return atom_names(f.premise) | atom_names(f.head)
    return set()


def pcl_obligations(env: Iterable[Formula], who: Ident) -> list[str]:
    env = tuple(env)
    d = _derive_env(env)
    names = sorted(set().union(*(atom_names(f) for f in env)) if env else set())
    return [n for n in names if (who, n, False) in d.atoms and (who, n, True) not in d.atoms]


def pcl_fulfilled(env: Iterable[Formula], who: Ident) -> bool:
    return not pcl_obligations(env, who)


# -- identifiers and printing --------------------------------------------------------

def map_idents(f: Formula, fn: Callable[[Ident], Ident]) -> Formula:
    if isinstance(f, PSays):
        return PSays(fn(f.principal), map_idents(f.body, fn))
    if isinstance(f, PAnd):
        return PAnd(tuple(map_idents(p, fn) for p in f.parts))
    if isinstance(f, POr):
        return POr(tuple(map_idents(p, fn) for p in f.parts))
    if isinstance(f, PImp):
        return PImp(map_idents(f.premise, fn), map_idents(f.head, fn))
    if isinstance(f, PCImp):
        return PCImp(map_idents(f.premise, fn), map_idents(f.head, fn))
    return f


def idents(f: Formula) -> Iterator[Ident]:
    if isinstance(f, PSays):
        yield f.principal
        yield from idents(f.body)
    elif isinstance(f, (PAnd, POr)):
        for p in f.parts:
            yield from idents(p)
    elif isinstance(f, (PImp, PCImp)):
        yield from idents(f.premise)
        yield from idents(f.head)


_PREC = {PImp: 1, PCImp: 1, POr: 2, PAnd: 3}


def pretty(f: Formula) -> str:
    def go(t: Formula, ctx: int) -> str:
        if isinstance(t, PAtom):
            return str(t)
        if isinstance(t, PTrue):
            return "true"
        if isinstance(t, PFalse):
            return "false"
        if isinstance(t, PSays):
            return f"{t.principal} says {go(t.body, 4)}"
        prec = _PREC[type(t)]
        if isinstance(t, (PImp, PCImp)):
            op = " -> " if isinstance(t, PImp) else " -->> "
            text = go(t.premise, prec + 1) + op + go(t.head, prec + 1)
        else:
            op = " /\\ " if isinstance(t, PAnd) else " \\/ "
            if not t.parts:
                return "true" if isinstance(t, PAnd) else "false"
            text = op.join(go(p, prec + 1) for p in t.parts)
        return text if prec >= ctx else f"({text})"

    return go(f, 0)


def _key(x) -> str:
    return repr(x)


def split_contract(f: Formula, sayer: Ident | None = None) -> list[Formula]:
    """``A says (c /\\ d)`` is the multiset ``A says c, A says d``."""
    if isinstance(f, PSays) and isinstance(f.body, PAnd):
        return [g for p in f.body.parts for g in split_contract(PSays(f.principal, p))]
    if isinstance(f, PAnd):
        return [g for p in f.parts for g in split_contract(p)]
    if isinstance(f, PTrue) or (isinstance(f, PSays) and isinstance(f.body, PTrue)):
        return []
    return [f]


class PclModel(ContractModel):
    name = "pcl"
    max_label_arity = 1

    def says(self, who: Ident, contract: Formula) -> Formula:
        return PSays(who, contract)

    def normalize(self, contracts: Iterable[Formula]) -> tuple:
        # The environment is a conjunction; repeated conjuncts are idempotent.
        flat = {g for c in contracts for g in split_contract(c)}
        return tuple(sorted(flat, key=_key))

    def step(self, contracts: tuple, label: ActionLabel) -> list[tuple]:
        if len(label) != 1:
            return []
        who, a = label.entries[0]
        if not isinstance(a, PAtom) or a.fact:
            return []
        return [self.normalize(pcl_step(contracts, who, a))]

    def entails(self, contracts: tuple, observable: Formula) -> bool:
        return pcl_entails(contracts, observable)

    def fulfilled(self, contracts: tuple, who: Ident) -> bool:
        return pcl_fulfilled(contracts, who)

    def obligations(self, contracts: tuple, who: Ident) -> list[str]:
        return pcl_obligations(contracts, who)

    def map_contract(self, contract, fn):
        return map_idents(contract, fn)

    def map_observable(self, observable, fn):
        return map_idents(observable, fn)

    def contract_idents(self, contract):
        return idents(contract)

    def observable_idents(self, observable):
        return idents(observable)

    def pretty_contract(self, contract) -> str:
        return pretty(contract)

    def pretty_observable(self, observable) -> str:
        return pretty(observable)

    def pretty_atom(self, a: PAtom) -> str:
        return str(a)
