"""One-step reductions of canonical configurations (rules Tau, Tell1, Tell2, Do, Ask, Fuse).

Par, Del and Def are implicit: configurations are flat, delimiters live at
the top and calls are unfolded by the normaliser.  Successors are returned in
freezeNames form, so a session created by Fuse keeps its name for the rest
of the trace.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

from ..errors import AgreementSearchError
from ..terms import ActionLabel, ContractModel, Ident, Kind, Substitution
from .congruence import Config, Normaliser, fresh_session, universe
from .syntax import Ask, Choice, Do, Fuse, Latent, Prefix, Process, Tau, Tell, rename

RULE_ORDER = {"Tau": 0, "Tell1": 1, "Tell2": 2, "Fuse": 3, "Ask": 4, "Do": 5}
MAX_LATENTS = 12


@dataclass(frozen=True)
class AgreementWitness:
    broker: Ident
    fused: tuple[Latent, ...]
    sigma: Substitution
    session: Ident
    observable: Any

    def describe(self, model: ContractModel) -> dict:
        return {
            "broker": str(self.broker),
            "fused": [f"{{{k.var}: {model.pretty_contract(k.contract)}}}" for k in self.fused],
            "sigma": {str(k): str(v) for k, v in sorted(self.sigma.items())},
            "session": str(self.session),
            "observable": model.pretty_observable(self.observable),
        }


@dataclass(frozen=True)
class Step:
    rule: str
    agents: tuple[Ident, ...]
    target: Config
    session: Ident | None = None
    label: ActionLabel | None = None
    witness: AgreementWitness | None = None
    sigma: Substitution | None = None
    key: tuple = field(default=(), compare=False)

    def sort_key(self):
        return (RULE_ORDER[self.rule], tuple(map(repr, self.agents)), repr(self.session),
                str(self.label), repr(self.sigma), repr(self.witness), repr(self.target))


def agreement_search(
    model: ContractModel,
    broker: Ident,
    latents: list[Latent],
    observable: Any,
    x: Ident,
    principals: list[Ident],
    session: Ident,
    bound_vars: set[Ident] | None = None,
) -> list[AgreementWitness]:
    """All minimal agreements ``K |-sigma_x phi`` (Def. 14) over sub-multisets ``K``.

    ``session`` is the fresh name every session variable is sent to.  Only
    variables in ``bound_vars`` (when given) may be instantiated.
    """
    if len(latents) > MAX_LATENTS:
        raise AgreementSearchError(
            f"{broker} holds {len(latents)} latent contracts; agreement search is capped at {MAX_LATENTS}"
        )
    if x.kind is not Kind.SESSION_VAR:
        return []
    phi_fv = model.observable_fv(observable)
    candidates: list[tuple[tuple[int, ...], Substitution]] = []
    for r in range(len(latents) + 1):
        for idx in itertools.combinations(range(len(latents)), r):
            K = [latents[i] for i in idx]
            need = {x} | set(phi_fv)
            for k in K:
                need.add(k.var)
                need |= model.contract_fv(k.contract)
            if any(not v.is_var for v in need):
                continue
            if bound_vars is not None and not need <= bound_vars:
                continue
            svars = sorted(v for v in need if v.kind is Kind.SESSION_VAR)
            pvars = sorted(v for v in need if v.kind is Kind.PRINCIPAL_VAR)
            for images in itertools.product(principals, repeat=len(pvars)):
                sigma = Substitution({**{v: session for v in svars}, **dict(zip(pvars, images))})
                contracts = model.normalize(model.subst_contract(k.contract, sigma) for k in K)
                if model.entails(contracts, model.subst_observable(observable, sigma)):
                    candidates.append((idx, sigma))
    minimal = [
        (idx, s) for idx, s in candidates
        if not any(len(s2) < len(s) and s2.issubset(s) for _, s2 in candidates)
    ]
    return [
        AgreementWitness(broker, tuple(latents[i] for i in idx), s, session, observable)
        for idx, s in minimal
    ]


class Reducer:
    def __init__(self, model: ContractModel, defs=None):
        self.model = model
        self.norm = Normaliser(model, defs)
        self._agree_cache: dict = {}

    # helpers ------------------------------------------------------------------

    def _rebuild(self, cfg: Config, agents: dict[Ident, list[Process]], sessions=None,
                 delims=None, restricted=None, sigma: Substitution | None = None) -> Config:
        m = self.model
        sess = list(sessions if sessions is not None else cfg.sessions)
        agent_list = [(a, list(agents.get(a, comps))) for a, comps in cfg.agents]
        if sigma:
            agent_list = [(a, [rename(p, dict(sigma), m) for p in ps]) for a, ps in agent_list]
            sess = [(s, tuple(m.subst_contract(c, sigma) for c in cs)) for s, cs in sess]
        return self.norm.parts(
            list(delims if delims is not None else cfg.delims),
            agent_list, sess,
            list(restricted if restricted is not None else cfg.restricted),
        )

    @staticmethod
    def _without(comps: tuple[Process, ...], *indices: int) -> list[Process]:
        drop = set(indices)
        return [c for i, c in enumerate(comps) if i not in drop]

    # enumeration ----------------------------------------------------------------

    def steps(self, cfg: Config) -> list[Step]:
        out: list[Step] = []
        offers: list[tuple[Ident, int, Prefix, Process]] = []
        for who, comps in cfg.agents:
            for i, comp in enumerate(comps):
                if not isinstance(comp, Choice):
                    continue
                for pre, cont in comp.branches:
                    key = ((who, repr(comp), repr(pre), repr(cont)),)
                    if isinstance(pre, Tau):
                        agents = {who: self._without(comps, i) + [cont]}
                        out.append(Step("Tau", (who,), self._rebuild(cfg, agents), key=("Tau",) + key))
                    elif isinstance(pre, Tell):
                        out.extend(self._tell(cfg, who, comps, i, pre, cont, key))
                    elif isinstance(pre, Ask):
                        out.extend(self._ask(cfg, who, comps, i, pre, cont, key))
                    elif isinstance(pre, Fuse):
                        out.extend(self._fuse(cfg, who, comps, i, pre, cont, key))
                    elif isinstance(pre, Do):
                        offers.append((who, i, pre, cont))
        out.extend(self._do(cfg, offers))
        return sorted(out, key=Step.sort_key)

    def _tell(self, cfg, who, comps, i, pre: Tell, cont, key):
        target = pre.target
        if target.kind is not Kind.PRINCIPAL_NAME:
            return []
        latent = Latent(pre.var, self.model.says(who, pre.contract))
        if target == who:
            agents = {who: self._without(comps, i) + [cont, latent]}
            return [Step("Tell1", (who,), self._rebuild(cfg, agents), key=("Tell1",) + key)]
        other = cfg.agent(target)
        if other is None:
            return []
        agents = {who: self._without(comps, i) + [cont], target: list(other) + [latent]}
        return [Step("Tell2", (who, target), self._rebuild(cfg, agents), key=("Tell2",) + key)]

    def _ask(self, cfg, who, comps, i, pre: Ask, cont, key):
        m = self.model
        if pre.target.kind is not Kind.SESSION_NAME:
            return []
        contracts = cfg.session(pre.target)
        if contracts is None:
            return []
        if not set(pre.vars) <= set(cfg.delims):
            return []
        pvars = [v for v in pre.vars if v.kind is Kind.PRINCIPAL_VAR]
        svars = [v for v in pre.vars if v.kind is Kind.SESSION_VAR]
        out = []
        for images in itertools.product(cfg.principals, repeat=len(pvars)):
            sigma = Substitution({**dict(zip(pvars, images)), **{v: pre.target for v in svars}})
            cs = m.normalize(m.subst_contract(c, sigma) for c in contracts)
            phi = m.subst_observable(pre.observable, sigma)
            if m.observable_fv(phi) or any(m.contract_fv(c) for c in cs):
                continue
            if not m.entails(cs, phi):
                continue
            agents = {who: self._without(comps, i) + [cont]}
            delims = [v for v in cfg.delims if v not in sigma]
            target = self._rebuild(cfg, agents, delims=delims, sigma=sigma)
            out.append(Step("Ask", (who,), target, session=pre.target, sigma=sigma, key=("Ask",) + key))
        return out

    def _fuse(self, cfg, who, comps, i, pre: Fuse, cont, key):
        m = self.model
        x = pre.var
        if x.kind is not Kind.SESSION_VAR or x not in cfg.delims:
            return []
        latent_idx = [j for j, c in enumerate(comps) if isinstance(c, Latent)]
        latents = [comps[j] for j in latent_idx]
        s = fresh_session(cfg, m)
        ck = (tuple(latents), pre.observable, x, tuple(cfg.principals), s, cfg.delims)
        if ck not in self._agree_cache:
            self._agree_cache[ck] = agreement_search(
                m, who, latents, pre.observable, x, cfg.principals, s, set(cfg.delims))
        out = []
        for w in self._agree_cache[ck]:
            used: list[int] = []
            for k in w.fused:
                j = next(j for j in latent_idx if comps[j] == k and j not in used)
                used.append(j)
            rest = self._without(comps, i, *used) + [cont]
            new_session = tuple(m.subst_contract(k.contract, w.sigma) for k in w.fused)
            delims = [v for v in cfg.delims if v not in w.sigma]
            target = self._rebuild(
                cfg, {who: rest}, sessions=list(cfg.sessions) + [(s, new_session)],
                delims=delims, restricted=list(cfg.restricted) + [s], sigma=w.sigma)
            out.append(Step("Fuse", (who,), target, session=s, witness=w, sigma=w.sigma, key=("Fuse",) + key))
        return out

    def _do(self, cfg, offers):
        m = self.model
        out = []
        by_session: dict[Ident, list] = {}
        for o in offers:
            tgt = o[2].target
            if tgt.kind is Kind.SESSION_NAME and cfg.session(tgt) is not None:
                by_session.setdefault(tgt, []).append(o)
        for s, offs in sorted(by_session.items()):
            contracts = cfg.session(s)
            for arity in range(1, m.max_label_arity + 1):
                for tup in itertools.permutations(offs, arity):
                    slots = {(o[0], o[1]) for o in tup}
                    if len(slots) < arity:
                        continue
                    label = ActionLabel(tuple((o[0], o[2].atom) for o in tup))
                    succs = m.step(contracts, label)
                    if not succs:
                        continue
                    agents: dict[Ident, list[Process]] = {}
                    touched: dict[Ident, list[int]] = {}
                    for who, i, _, _ in tup:
                        touched.setdefault(who, []).append(i)
                    for who, idx in touched.items():
                        comps = cfg.agent(who)
                        conts = [o[3] for o in tup if o[0] == who]
                        agents[who] = self._without(comps, *idx) + conts
                    key = ("Do",) + tuple(sorted((who, repr(cfg.agent(who)[i]), repr(pre), repr(cont))
                                                 for who, i, pre, cont in tup))
                    who_all = tuple(o[0] for o in tup)
                    for cs in succs:
                        sessions = [(n, cs if n == s else c) for n, c in cfg.sessions]
                        target = self._rebuild(cfg, agents, sessions=sessions)
                        out.append(Step("Do", who_all, target, session=s, label=label, key=key))
        return out
