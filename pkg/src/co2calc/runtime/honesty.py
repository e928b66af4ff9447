"""Honesty checking by bounded exploration of the reduction graph.

A principal is dishonest when some maximal fair trace has a session in which
it is not eventually-always fulfilled.  Within the bounds, maximal traces are
either finite (ending in a stuck configuration) or lassos ending in a
strongly connected component of the state graph.  A component is *fair* when
every prefix instance enabled in all of its states fires on one of its
internal edges; an infinite run touring all of its edges is then fair and
visits each of its states infinitely often.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..ltl import sccs
from ..terms import ContractModel, Ident
from .congruence import Config
from .reduction import Reducer, Step
from .trace import step_json

DEFAULT_MAX_DEPTH = 200
DEFAULT_MAX_STATES = 20000


@dataclass
class Verdict:
    principal: Ident
    verdict: str  # honest | dishonest | inconclusive
    witness: list[Step] | None = None
    loop: list[Step] | None = None
    session: Ident | None = None
    obligations: list[str] | None = None
    states: int = 0
    reason: str = ""

    @property
    def exit_code(self) -> int:
        return {"honest": 0, "dishonest": 1, "inconclusive": 2}[self.verdict]

    def to_json(self, model: ContractModel) -> dict:
        out: dict = {"principal": str(self.principal), "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = [step_json(i + 1, s, model) for i, s in enumerate(self.witness)]
        if self.loop:
            n = len(self.witness or [])
            out["loop"] = [step_json(n + i + 1, s, model) for i, s in enumerate(self.loop)]
        if self.session is not None:
            out["session"] = str(self.session)
        if self.obligations is not None:
            out["obligations"] = list(self.obligations)
        out["states"] = self.states
        if self.reason:
            out["reason"] = self.reason
        return out


def unfulfilled_sessions(cfg: Config, model: ContractModel, who: Ident) -> list[Ident]:
    return [s for s, cs in cfg.sessions if not model.fulfilled(cs, who)]


@dataclass
class StateGraph:
    states: list[Config] = field(default_factory=list)
    out: list[list[tuple[Step, int]]] = field(default_factory=list)
    parent: list[tuple[int, Step] | None] = field(default_factory=list)
    expanded: list[bool] = field(default_factory=list)
    bound_hit: bool = False

    def path_to(self, i: int) -> list[Step]:
        path = []
        while self.parent[i] is not None:
            j, st = self.parent[i]
            path.append(st)
            i = j
        return path[::-1]


def explore(cfg: Config, reducer: Reducer, max_depth: int = DEFAULT_MAX_DEPTH,
            max_states: int = DEFAULT_MAX_STATES) -> StateGraph:
    g = StateGraph([cfg], [[]], [None], [False])
    index = {cfg: 0}
    depth = [0]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        if depth[i] >= max_depth:
            g.bound_hit = g.bound_hit or bool(reducer.steps(g.states[i]))
            continue
        for st in reducer.steps(g.states[i]):
            j = index.get(st.target)
            if j is None:
                if len(g.states) >= max_states:
                    g.bound_hit = True
                    continue
                j = len(g.states)
                index[st.target] = j
                g.states.append(st.target)
                g.out.append([])
                g.parent.append((i, st))
                g.expanded.append(False)
                depth.append(depth[i] + 1)
                queue.append(j)
            g.out[i].append((st, j))
        g.expanded[i] = True
    return g


def _cycle_through(g: StateGraph, comp: set[int], start: int) -> list[Step]:
    """A closed walk from ``start`` covering every internal edge of the component."""
    internal = [(i, st, j) for i in comp for st, j in g.out[i] if j in comp]
    walk: list[Step] = []
    cur = start
    for i, st, j in internal:
        walk += _path_within(g, comp, cur, i)
        walk.append(st)
        cur = j
    walk += _path_within(g, comp, cur, start)
    return walk


def _path_within(g: StateGraph, comp: set[int], a: int, b: int) -> list[Step]:
    if a == b:
        return []
    prev: dict[int, tuple[int, Step]] = {}
    queue = deque([a])
    seen = {a}
    while queue:
        i = queue.popleft()
        for st, j in g.out[i]:
            if j in comp and j not in seen:
                seen.add(j)
                prev[j] = (i, st)
                if j == b:
                    path = []
                    while j != a:
                        i2, st2 = prev[j]
                        path.append(st2)
                        j = i2
                    return path[::-1]
                queue.append(j)
    raise AssertionError("component is not strongly connected")


def fair_components(g: StateGraph) -> list[set[int]]:
    """Non-trivial, fully expanded, weakly fair strongly connected components."""
    n = len(g.states)
    succ = {i: [j for _, j in g.out[i]] for i in range(n)}
    out = []
    for comp in sccs(list(range(n)), succ):
        comp = set(comp)
        if not all(g.expanded[i] for i in comp):
            continue
        internal = [(st, j) for i in comp for st, j in g.out[i] if j in comp]
        if not internal:
            continue
        enabled_everywhere = None
        for i in comp:
            keys = {st.key for st, _ in g.out[i]}
            enabled_everywhere = keys if enabled_everywhere is None else enabled_everywhere & keys
        fired = {st.key for st, _ in internal}
        if enabled_everywhere <= fired:
            out.append(comp)
    return out


def check_honesty(cfg: Config, reducer: Reducer, principal: Ident,
                  max_depth: int = DEFAULT_MAX_DEPTH,
                  max_states: int = DEFAULT_MAX_STATES) -> Verdict:
    model = reducer.model
    g = explore(cfg, reducer, max_depth, max_states)
    n = len(g.states)
    # finite maximal traces (states are numbered in BFS order: shortest witnesses first)
    for i in range(n):
        if g.expanded[i] and not g.out[i]:
            bad = unfulfilled_sessions(g.states[i], model, principal)
            if bad:
                s = bad[0]
                return Verdict(principal, "dishonest", g.path_to(i), None, s,
                               model.obligations(g.states[i].session(s), principal), n,
                               "a maximal finite trace ends with an unfulfilled session")
    # fair lassos
    for comp in sorted(fair_components(g), key=min):
        bad_states = sorted(i for i in comp if unfulfilled_sessions(g.states[i], model, principal))
        if bad_states:
            i = bad_states[0]
            s = unfulfilled_sessions(g.states[i], model, principal)[0]
            return Verdict(principal, "dishonest", g.path_to(i), _cycle_through(g, comp, i), s,
                           model.obligations(g.states[i].session(s), principal), n,
                           "a fair infinite trace leaves a session unfulfilled infinitely often")
    if g.bound_hit:
        return Verdict(principal, "inconclusive", states=n,
                       reason=f"exploration bound hit (max depth {max_depth}, max states {max_states})")
    return Verdict(principal, "honest", states=n, reason="state graph exhausted")
