"""Canonical configurations modulo structural congruence.

A :class:`Config` is a system brought to the shape
``(u1, ..., uk) (A1[P1] | ... | s1[C1] | ...)``: every delimitation that is
not under a prefix is extruded to the top (alpha-renaming on clashes),
delimitations of session names are *frozen* (removed, the name is kept free
and recorded in ``restricted``), top-level calls are unfolded, parallel
compositions are flattened and sorted, and the garbage laws erase latent
contracts, tells, asks and fuses stuck on names.  Unused delimiters vanish.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from ..errors import DefinitionError, WellFormednessError
from ..terms import ContractModel, Ident, Kind, fresh_session_name, fresh_text
from .syntax import (
    NIL, Agent, Ask, Call, Choice, Definition, Fuse, Latent, PDelim, PPar, Process,
    SDelim, Session, SPar, System, Tell, all_idents, free_idents, rename,
)


def _key(x) -> str:
    return repr(x)


@dataclass(frozen=True)
class Config:
    delims: tuple[Ident, ...]
    agents: tuple[tuple[Ident, tuple[Process, ...]], ...]
    sessions: tuple[tuple[Ident, tuple], ...]
    restricted: tuple[Ident, ...] = ()

    def agent(self, who: Ident) -> tuple[Process, ...] | None:
        for a, comps in self.agents:
            if a == who:
                return comps
        return None

    def session(self, name: Ident) -> tuple | None:
        for s, cs in self.sessions:
            if s == name:
                return cs
        return None

    @property
    def principals(self) -> list[Ident]:
        return [a for a, _ in self.agents]

    def to_system(self, with_restricted: bool = False) -> System:
        parts: list[System] = [Agent(a, _par(c)) for a, c in self.agents]
        parts += [Session(s, cs) for s, cs in self.sessions]
        body: System = SPar(tuple(parts))
        binders = list(self.delims)
        if with_restricted:
            binders = list(self.restricted) + binders
        for v in reversed(binders):
            body = SDelim(v, body)
        return body


def _par(comps: Iterable[Process]) -> Process:
    comps = tuple(comps)
    if not comps:
        return NIL
    return comps[0] if len(comps) == 1 else PPar(comps)


class Normaliser:
    def __init__(self, model: ContractModel, defs: dict[str, Definition] | None = None):
        self.model = model
        self.defs = defs or {}

    # -- processes under a prefix (no extrusion, no unfolding) --------------------

    def inner(self, p: Process) -> Process:
        if isinstance(p, Latent):
            return NIL if p.var.is_name else p
        if isinstance(p, Choice):
            branches = []
            for pre, k in p.branches:
                if self._garbage_prefix(pre):
                    continue
                branches.append((pre, self.inner(k)))
            return Choice(tuple(sorted(set(branches), key=_key)))
        if isinstance(p, PPar):
            flat: list[Process] = []
            for q in p.parts:
                q = self.inner(q)
                if q == NIL:
                    continue
                flat.extend(q.parts if isinstance(q, PPar) else (q,))
            return _par(sorted(flat, key=_key))
        if isinstance(p, PDelim):
            body = self.inner(p.body)
            return body if p.var not in free_idents(body, self.model) else PDelim(p.var, body)
        if isinstance(p, Call):
            return p
        raise TypeError(p)

    @staticmethod
    def _garbage_prefix(pre) -> bool:
        if isinstance(pre, Tell):
            return pre.var.is_name
        if isinstance(pre, Ask):
            return any(v.is_name for v in pre.vars)
        if isinstance(pre, Fuse):
            return pre.var.is_name
        return False

    def unfold(self, call: Call) -> Process:
        d = self.defs.get(call.name)
        if d is None:
            raise DefinitionError(f"undefined process identifier {call.name}")
        if len(d.params) != len(call.args):
            raise DefinitionError(f"{call.name} expects {len(d.params)} arguments, got {len(call.args)}")
        for p, a in zip(d.params, call.args):
            if p.kind.is_principal != a.kind.is_principal:
                raise WellFormednessError(f"ill-sorted argument {a!r} for parameter {p!r} of {call.name}")
        return rename(d.body, dict(zip(d.params, call.args)), self.model)

    # -- whole configurations ---------------------------------------------------------

    def system(self, s: System) -> Config:
        delims: list[Ident] = []
        agents: list[tuple[Ident, list[Process]]] = []
        sessions: list[tuple[Ident, tuple]] = []
        restricted: list[Ident] = []
        taken = {i.text for i in all_idents(s, self.model)}

        def walk(t: System) -> None:
            if isinstance(t, SPar):
                for p in t.parts:
                    walk(p)
            elif isinstance(t, SDelim):
                v = t.var
                if v.kind is Kind.PRINCIPAL_NAME:
                    raise WellFormednessError(f"principal name {v} cannot be delimited")
                body = t.body
                if v.is_name:
                    if v in restricted:
                        nv = fresh_session_name([*all_idents(body, self.model), *restricted, *map(_sess, taken)])
                        body = rename(body, {v: nv}, self.model)
                        taken.add(nv.text)
                        v = nv
                    restricted.append(v)
                else:
                    if v in delims:
                        nv = Ident(v.kind, fresh_text(v.text, taken))
                        taken.add(nv.text)
                        body = rename(body, {v: nv}, self.model)
                        v = nv
                    delims.append(v)
                walk(body)
            elif isinstance(t, Agent):
                agents.append((t.principal, [t.process]))
            elif isinstance(t, Session):
                sessions.append((t.name, t.contracts))
            else:
                raise TypeError(t)

        walk(s)
        return self.parts(delims, agents, sessions, restricted, taken)

    def parts(self, delims, agents, sessions, restricted, taken=None) -> Config:
        """Canonicalise a configuration given by loose parts (agent processes unnormalised)."""
        model = self.model
        delims = list(delims)
        if taken is None:
            taken = set()
            for _, procs in agents:
                for p in procs:
                    taken |= {i.text for i in all_idents(p, model)}
            taken |= {v.text for v in delims} | {s.text for s, _ in sessions} | {a.text for a, _ in agents}
            taken |= {s.text for s in restricted}
        seen_agents: set[Ident] = set()
        out_agents = []
        for who, procs in agents:
            if who.kind is not Kind.PRINCIPAL_NAME:
                raise WellFormednessError(f"agent {who!r} is not a principal name")
            if who in seen_agents:
                raise WellFormednessError(f"two agents named {who}")
            seen_agents.add(who)
            comps: list[Process] = []
            work = list(procs)
            while work:
                p = work.pop()
                if isinstance(p, PPar):
                    work.extend(p.parts)
                elif isinstance(p, PDelim):
                    v, body = p.var, p.body
                    if v.kind is Kind.PRINCIPAL_NAME:
                        raise WellFormednessError(f"principal name {v} cannot be delimited")
                    if v not in free_idents(body, model):
                        work.append(body)
                        continue
                    if v.is_name:
                        if v in restricted:
                            raise WellFormednessError(f"session name {v} delimited twice")
                        restricted.append(v)
                    else:
                        if v in delims or v.text in taken and _clashes(v, delims, out_agents, comps, work, sessions, model):
                            nv = Ident(v.kind, fresh_text(v.text, taken))
                            body = rename(body, {v: nv}, model)
                            v = nv
                        taken.add(v.text)
                        delims.append(v)
                    work.append(body)
                elif isinstance(p, Call):
                    work.append(self.unfold(p))
                else:
                    q = self.inner(p)
                    if q == NIL:
                        continue
                    if isinstance(q, (PPar, PDelim)):
                        work.append(q)
                    else:
                        comps.append(q)
            out_agents.append((who, tuple(sorted(comps, key=_key))))
        out_sessions = []
        seen_sessions: set[Ident] = set()
        for name, cs in sessions:
            if name in seen_sessions:
                raise WellFormednessError(f"two sessions named {name}")
            if name.kind is not Kind.SESSION_NAME:
                raise WellFormednessError(f"session {name!r} is not a session name")
            seen_sessions.add(name)
            out_sessions.append((name, model.normalize(cs)))
        free: set[Ident] = set()
        for _, comps in out_agents:
            for c in comps:
                free |= free_idents(c, model)
        for _, cs in out_sessions:
            for c in cs:
                free |= set(model.contract_idents(c))
        kept = sorted({v for v in delims if v in free})
        names_used = {s for s, _ in out_sessions} | free
        restricted_kept = sorted({s for s in restricted if s in names_used})
        return Config(
            tuple(kept),
            tuple(sorted(out_agents, key=lambda a: a[0])),
            tuple(sorted(out_sessions, key=lambda s: s[0])),
            tuple(restricted_kept),
        )

    def config(self, cfg: Config) -> Config:
        return self.parts(cfg.delims, [(a, list(c)) for a, c in cfg.agents], cfg.sessions, list(cfg.restricted))


def _sess(text: str) -> Ident:
    return Ident(Kind.SESSION_NAME, text)


def _clashes(v, delims, agents, comps, work, sessions, model) -> bool:
    """Whether extruding ``v`` would capture a free occurrence elsewhere."""
    if v in delims:
        return True
    for _, cs in agents:
        for c in cs:
            if v in free_idents(c, model):
                return True
    for c in list(comps) + list(work):
        if v in free_idents(c, model):
            return True
    return False


def normalise(system: System | Config, model: ContractModel, defs=None) -> Config:
    n = Normaliser(model, defs)
    return n.config(system) if isinstance(system, Config) else n.system(system)


def universe(cfg: Config, model: ContractModel) -> set[Ident]:
    """Every identifier of a configuration (for fresh-name generation)."""
    out = set(cfg.delims) | set(cfg.restricted)
    for a, comps in cfg.agents:
        out.add(a)
        for c in comps:
            out |= all_idents(c, model)
    for s, cs in cfg.sessions:
        out.add(s)
        for c in cs:
            out |= set(model.contract_idents(c))
    return out


def fresh_session(cfg: Config, model: ContractModel) -> Ident:
    return fresh_session_name(universe(cfg, model))
