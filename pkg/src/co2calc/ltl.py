"""LTL over the action labels of a finite labelled transition graph.

Propositions are evaluated on the *label* taken at each position, so a trace
is a sequence of edges.  Maximal traces are the infinite paths plus the
finite paths that end in a deadlocked state; on finite traces ``X`` is strong
and ``U``/``<>``/``[]`` range over the remaining positions only.

:func:`holds_on_all_traces` decides universal satisfaction exactly by a
tableau product: it searches for a maximal trace of the negated formula,
accepting either at a deadlock or on a fair strongly connected component.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Sequence


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Prop(Formula):
    atom: Any


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


TRUE = TrueF()
FALSE = FalseF()


def props(phi: Formula) -> Iterable[Prop]:
    if isinstance(phi, Prop):
        yield phi
    elif isinstance(phi, (Not, Next, Eventually, Always)):
        yield from props(phi.arg)
    elif isinstance(phi, (And, Or, Until)):
        yield from props(phi.left)
        yield from props(phi.right)


def pretty(phi: Formula, atom_str: Callable[[Any], str] = str) -> str:
    def go(f: Formula, ctx: int) -> str:
        # ctx: 0 top, 1 operand of a binary operator, 2 operand of a unary one
        if isinstance(f, Prop):
            return atom_str(f.atom)
        if isinstance(f, TrueF):
            return "true"
        if isinstance(f, FalseF):
            return "false"
        if isinstance(f, (Not, Next, Eventually, Always)):
            op = {Not: "!", Next: "X ", Eventually: "<>", Always: "[]"}[type(f)]
            return op + go(f.arg, 2)
        op = {And: " /\\ ", Or: " \\/ ", Until: " U "}[type(f)]
        text = go(f.left, 1) + op + go(f.right, 1)
        return text if ctx == 0 else f"({text})"

    return go(phi, 0)


# -- core translation -------------------------------------------------------
# Core connectives: TrueF, Prop, Not, And, Next, Until.

def to_core(phi: Formula) -> Formula:
    if isinstance(phi, (Prop, TrueF)):
        return phi
    if isinstance(phi, FalseF):
        return Not(TRUE)
    if isinstance(phi, Not):
        inner = to_core(phi.arg)
        return inner.arg if isinstance(inner, Not) else Not(inner)
    if isinstance(phi, And):
        return And(to_core(phi.left), to_core(phi.right))
    if isinstance(phi, Or):
        return Not(And(to_core(Not(phi.left)), to_core(Not(phi.right))))
    if isinstance(phi, Next):
        return Next(to_core(phi.arg))
    if isinstance(phi, Until):
        return Until(to_core(phi.left), to_core(phi.right))
    if isinstance(phi, Eventually):
        return Until(TRUE, to_core(phi.arg))
    if isinstance(phi, Always):
        return Not(Until(TRUE, to_core(Not(phi.arg))))
    raise TypeError(f"not an LTL formula: {phi!r}")


def _subformulas(phi: Formula) -> list[Formula]:
    seen: dict[Formula, None] = {}

    def walk(f: Formula) -> None:
        if isinstance(f, (Not, Next)):
            walk(f.arg)
        elif isinstance(f, (And, Until)):
            walk(f.left)
            walk(f.right)
        seen.setdefault(f, None)

    walk(phi)
    return list(seen)  # post-order: children precede parents


def holds_on_empty_trace(phi: Formula) -> bool:
    f = to_core(phi)

    def ev(g: Formula) -> bool:
        if isinstance(g, TrueF):
            return True
        if isinstance(g, Not):
            return not ev(g.arg)
        if isinstance(g, And):
            return ev(g.left) and ev(g.right)
        return False  # Prop, Next, Until need a position

    return ev(f)


@dataclass
class LabelledGraph:
    """States ``0..n-1`` with initial state 0; ``edges[i]`` lists ``(label, j)``."""

    states: list[Hashable]
    edges: list[list[tuple[Any, int]]]

    @property
    def initial(self) -> int:
        return 0

    def deadlocks(self) -> list[int]:
        return [i for i, out in enumerate(self.edges) if not out]

    def edge_list(self) -> list[tuple[int, Any, int]]:
        return [(i, lab, j) for i, out in enumerate(self.edges) for lab, j in out]


def holds_on_all_traces(
    graph: LabelledGraph,
    phi: Formula,
    holds: Callable[[Any, Any], bool],
) -> bool:
    """True iff every maximal trace from the initial state satisfies ``phi``.

    ``holds(atom, label)`` decides a proposition on one edge label.
    """
    return find_trace(graph, Not(phi), holds) is None


def find_trace(graph: LabelledGraph, psi: Formula, holds: Callable[[Any, Any], bool]):
    """A maximal trace satisfying ``psi``, as ``(stem_edges, loop_edges)``, or None.

    Edges are ``(src, label, tgt)`` triples; ``loop_edges`` is empty for a
    finite trace ending in a deadlock.
    """
    core = to_core(psi)
    edge_list = graph.edge_list()
    if not graph.edges[graph.initial]:
        return ([], []) if holds_on_empty_trace(core) else None

    subs = _subformulas(core)
    index = {f: k for k, f in enumerate(subs)}
    free = [f for f in subs if isinstance(f, (Next, Until))]
    untils = [f for f in subs if isinstance(f, Until)]
    nexts = [f for f in subs if isinstance(f, Next)]

    def elementary(label: Any) -> list[tuple[bool, ...]]:
        out = []
        for choice in itertools.product((False, True), repeat=len(free)):
            val = [False] * len(subs)
            chosen = dict(zip(free, choice))
            ok = True
            for k, f in enumerate(subs):
                if isinstance(f, TrueF):
                    val[k] = True
                elif isinstance(f, Prop):
                    val[k] = bool(holds(f.atom, label))
                elif isinstance(f, Not):
                    val[k] = not val[index[f.arg]]
                elif isinstance(f, And):
                    val[k] = val[index[f.left]] and val[index[f.right]]
                elif isinstance(f, Next):
                    val[k] = chosen[f]
                else:  # Until: local consistency
                    v, lhs, rhs = chosen[f], val[index[f.left]], val[index[f.right]]
                    if rhs and not v:
                        ok = False
                    if not rhs and not lhs and v:
                        ok = False
                    val[k] = v
            if ok:
                out.append(tuple(val))
        return out

    label_cache: dict[Any, list[tuple[bool, ...]]] = {}
    atoms_of_edge = []
    for _, lab, _ in edge_list:
        if lab not in label_cache:
            label_cache[lab] = elementary(lab)
        atoms_of_edge.append(label_cache[lab])

    out_edges: dict[int, list[int]] = {}
    for e, (src, _, _) in enumerate(edge_list):
        out_edges.setdefault(src, []).append(e)
    deadlock = {i for i, out in enumerate(graph.edges) if not out}

    def compatible(m: tuple[bool, ...], m2: tuple[bool, ...]) -> bool:
        for f in nexts:
            if m[index[f]] != m2[index[f.arg]]:
                return False
        for f in untils:
            want = m[index[f.right]] or (m[index[f.left]] and m2[index[f]])
            if m[index[f]] != want:
                return False
        return True

    def final(m: tuple[bool, ...]) -> bool:
        if any(m[index[f]] for f in nexts):
            return False
        return all(m[index[f]] == m[index[f.right]] for f in untils)

    root = index[core]
    start = [
        (e, m)
        for e in out_edges.get(graph.initial, [])
        for m in atoms_of_edge[e]
        if m[root]
    ]

    # forward exploration of the product
    parent: dict[tuple[int, tuple], tuple | None] = {n: None for n in start}
    succ: dict[tuple[int, tuple], list] = {}
    frontier = list(start)
    while frontier:
        node = frontier.pop()
        e, m = node
        tgt = edge_list[e][2]
        nxt = []
        if tgt not in deadlock:
            for e2 in out_edges.get(tgt, []):
                for m2 in atoms_of_edge[e2]:
                    if compatible(m, m2):
                        n2 = (e2, m2)
                        nxt.append(n2)
                        if n2 not in parent:
                            parent[n2] = node
                            frontier.append(n2)
        succ[node] = nxt

    def path_to(node) -> list:
        path = []
        while node is not None:
            path.append(node)
            node = parent[node]
        return path[::-1]

    for node in parent:
        e, m = node
        if edge_list[e][2] in deadlock and final(m):
            return ([edge_list[n[0]] for n in path_to(node)], [])

    for comp in _sccs(list(parent), succ):
        members = set(comp)
        if len(comp) == 1 and comp[0] not in succ[comp[0]]:
            continue
        fair = all(
            any((not m[index[f]]) or m[index[f.right]] for _, m in comp) for f in untils
        )
        if fair:
            entry = comp[0]
            loop = _tour(entry, members, succ, untils, index)
            stem = path_to(entry)[:-1]
            return ([edge_list[n[0]] for n in stem], [edge_list[n[0]] for n in loop])
    return None


def _tour(entry, members, succ, untils, index) -> list:
    """A cycle from ``entry`` inside one SCC visiting an accepting node of every Until."""
    path = [entry]
    cur = entry
    for f in untils:
        goal = next(n for n in members if (not n[1][index[f]]) or n[1][index[f.right]])
        if goal != cur:
            path.extend(_path(cur, goal, members, succ))
            cur = goal
    path.extend(_path(cur, entry, members, succ))
    return path[:-1]


def _path(src, dst, members, succ) -> list:
    """Nodes of a shortest non-empty path ``src -> ... -> dst`` (``src`` excluded)."""
    prev = {}
    queue = deque([src])
    while queue:
        n = queue.popleft()
        for m in succ[n]:
            if m not in members or m in prev:
                continue
            prev[m] = n
            if m == dst:
                out = [m]
                while prev[out[-1]] != src:
                    out.append(prev[out[-1]])
                return out[::-1]
            queue.append(m)
    raise AssertionError("node unreachable inside its own SCC")


def _sccs(nodes: Sequence, succ: dict) -> list[list]:
    """Tarjan's algorithm, iterative."""
    index_of: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    result: list[list] = []
    counter = 0
    for root in nodes:
        if root in index_of:
            continue
        work = [(root, iter(succ[root]))]
        index_of[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for m in it:
                if m not in index_of:
                    index_of[m] = low[m] = counter
                    counter += 1
                    stack.append(m)
                    on_stack.add(m)
                    work.append((m, iter(succ[m])))
                    advanced = True
                    break
                if m in on_stack:
                    low[node] = min(low[node], index_of[m])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index_of[node]:
                comp = []
                while True:
                    m = stack.pop()
                    on_stack.discard(m)
                    comp.append(m)
                    if m == node:
                        break
                result.append(comp)
    return result


def sccs(nodes: Sequence, succ: dict) -> list[list]:
    return _sccs(nodes, succ)
