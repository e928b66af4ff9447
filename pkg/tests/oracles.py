"""Independent reference implementations used by the property tests.

They follow the definitions literally (enumerating subsets and traces) and
share no code with the kernel beyond the formula datatypes.
"""
from __future__ import annotations

import itertools
import random

from co2calc import ltl, pcl
from co2calc.terms import principal

# -- PCL Horn fragment -----------------------------------------------------------------
# A clause set is a list of (kind, sayer, premises, heads): kind in {fact, imp, cimp};
# premises are (principal, atom) promises; heads are atom names (facts: "!a").

PRINCIPALS = ["A", "B", "C"]
ATOMS = ["a", "b", "c", "d"]


def random_clause_set(rng: random.Random, max_clauses: int = 8):
    out = []
    for _ in range(rng.randint(1, max_clauses)):
        kind = rng.choice(["fact", "fact", "imp", "cimp", "cimp"])
        sayer = rng.choice(PRINCIPALS)
        if kind == "fact":
            name = rng.choice(ATOMS)
            out.append((kind, sayer, (), ("!" + name if rng.random() < 0.3 else name,)))
        else:
            prem = tuple(sorted({(rng.choice(PRINCIPALS), rng.choice(ATOMS)) for _ in range(rng.randint(1, 2))}))
            heads = tuple(sorted(set(rng.sample(ATOMS, rng.randint(1, 2)))))
            out.append((kind, sayer, prem, heads))
    return out


def to_formulas(clauses):
    fs = []
    for kind, sayer, prem, heads in clauses:
        who = principal(sayer)
        head = pcl.conj(*(pcl.PAtom(h.lstrip("!"), h.startswith("!")) for h in heads))
        if kind == "fact":
            fs.append(pcl.says(who, head))
        else:
            p = pcl.conj(*(pcl.says(principal(b), pcl.atom(a)) for b, a in prem))
            fs.append(pcl.says(who, pcl.imp(p, head) if kind == "imp" else pcl.cimp(p, head)))
    return fs


def _facts(clauses):
    out = set()
    for kind, sayer, _, heads in clauses:
        if kind == "fact":
            for h in heads:
                out.add((sayer, h.lstrip("!"), h.startswith("!")))
                out.add((sayer, h.lstrip("!"), False))
    return out


def _chain(atoms, rules):
    atoms = set(atoms)
    changed = True
    while changed:
        changed = False
        for sayer, prem, heads in rules:
            if all((b, a, False) in atoms for b, a in prem):
                for h in heads:
                    if (sayer, h, False) not in atoms:
                        atoms.add((sayer, h, False))
                        changed = True
    return atoms


def oracle_derivable(clauses):
    """Union, over every self-supporting subset W of the -->> clauses, of what follows
    from the facts, the heads of W and every clause used as ->."""
    facts = _facts(clauses)
    rules = [(s, p, h) for k, s, p, h in clauses if k != "fact"]
    cimps = [(s, p, h) for k, s, p, h in clauses if k == "cimp"]
    result = _chain(facts, [r for k, *r in clauses if k == "imp"])
    for r in range(1, len(cimps) + 1):
        for w in itertools.combinations(cimps, r):
            assumed = facts | {(s, h, False) for s, _, hs in w for h in hs}
            atoms = _chain(assumed, rules)
            if all((b, a, False) in atoms for _, p, _ in w for b, a in p):
                result |= atoms
    return result


# -- LTL on finite and ultimately periodic traces -------------------------------------

def eval_finite(phi, word, i, holds):
    if isinstance(phi, ltl.TrueF):
        return True
    if isinstance(phi, ltl.FalseF):
        return False
    if isinstance(phi, ltl.Not):
        return not eval_finite(phi.arg, word, i, holds)
    if isinstance(phi, ltl.And):
        return eval_finite(phi.left, word, i, holds) and eval_finite(phi.right, word, i, holds)
    if isinstance(phi, ltl.Or):
        return eval_finite(phi.left, word, i, holds) or eval_finite(phi.right, word, i, holds)
    n = len(word)
    if isinstance(phi, ltl.Prop):
        return i < n and holds(phi.atom, word[i])
    if isinstance(phi, ltl.Next):
        return i + 1 < n and eval_finite(phi.arg, word, i + 1, holds)
    if isinstance(phi, ltl.Eventually):
        return any(eval_finite(phi.arg, word, k, holds) for k in range(i, n))
    if isinstance(phi, ltl.Always):
        return all(eval_finite(phi.arg, word, k, holds) for k in range(i, n))
    if isinstance(phi, ltl.Until):
        for k in range(i, n):
            if eval_finite(phi.right, word, k, holds):
                return True
            if not eval_finite(phi.left, word, k, holds):
                return False
        return False
    raise TypeError(phi)


def eval_lasso(phi, stem, loop, holds):
    """Truth at position 0 of ``stem loop^omega`` (positions folded into stem+loop)."""
    word = list(stem) + list(loop)
    n, start = len(word), len(stem)

    def nxt(i):
        return i + 1 if i + 1 < n else start

    memo = {}

    def ev(f, i):
        key = (f, i)
        if key in memo:
            return memo[key]
        if isinstance(f, ltl.TrueF):
            v = True
        elif isinstance(f, ltl.FalseF):
            v = False
        elif isinstance(f, ltl.Not):
            v = not ev(f.arg, i)
        elif isinstance(f, ltl.And):
            v = ev(f.left, i) and ev(f.right, i)
        elif isinstance(f, ltl.Or):
            v = ev(f.left, i) or ev(f.right, i)
        elif isinstance(f, ltl.Prop):
            v = holds(f.atom, word[i])
        elif isinstance(f, ltl.Next):
            v = ev(f.arg, nxt(i))
        else:
            left = ltl.TRUE if isinstance(f, ltl.Eventually) else (f.left if isinstance(f, ltl.Until) else None)
            if isinstance(f, ltl.Always):
                v = all(ev(f.arg, j) for j in _future(i, n, start))
            else:
                right = f.arg if isinstance(f, ltl.Eventually) else f.right
                v = False
                for j in _future(i, n, start):
                    if ev(right, j):
                        v = True
                        break
                    if not ev(left, j):
                        break
        memo[key] = v
        return v

    return ev(phi, 0)


def _future(i, n, start):
    """Positions visited from ``i`` on, each once, in order."""
    seen = []
    while i not in seen:
        seen.append(i)
        i = i + 1 if i + 1 < n else start
    return seen


def maximal_traces(graph, max_len):
    """Finite maximal traces and lassos with at most ``max_len`` edges."""
    out = []

    def dfs(state, path, visits):
        if not graph.edges[state]:
            out.append(("finite", [lab for _, lab, _ in path], []))
            return
        if len(path) >= max_len:
            return
        for lab, tgt in graph.edges[state]:
            p2 = path + [(state, lab, tgt)]
            for k, (src, _, _) in enumerate(p2):
                if src == tgt:
                    labels = [l for _, l, _ in p2]
                    out.append(("lasso", labels[:k], labels[k:]))
            dfs(tgt, p2, visits)

    dfs(graph.initial, [], {})
    return out


def oracle_all_traces(graph, phi, holds, max_len):
    for kind, stem, loop in maximal_traces(graph, max_len):
        ok = eval_finite(phi, stem, 0, holds) if kind == "finite" else eval_lasso(phi, stem, loop, holds)
        if not ok:
            return False
    return True


def random_graph(rng: random.Random, max_states: int = 20, labels=("p", "q", "r"), max_out: int = 2):
    n = rng.randint(1, max_states)
    edges = []
    for i in range(n):
        k = rng.choice([0] + [1] * 3 + [2] * 2) if i else rng.randint(1, max_out)
        k = min(k, max_out)
        edges.append(sorted({(rng.choice(labels), rng.randrange(n)) for _ in range(k)}))
    return ltl.LabelledGraph(list(range(n)), edges)


def random_ltl(rng: random.Random, depth: int, labels=("p", "q", "r")):
    if depth == 0 or rng.random() < 0.25:
        return ltl.Prop(rng.choice(labels)) if rng.random() < 0.9 else ltl.TRUE
    op = rng.choice(["not", "and", "or", "next", "ev", "al", "until"])
    if op == "not":
        return ltl.Not(random_ltl(rng, depth - 1, labels))
    if op == "next":
        return ltl.Next(random_ltl(rng, depth - 1, labels))
    if op == "ev":
        return ltl.Eventually(random_ltl(rng, depth - 1, labels))
    if op == "al":
        return ltl.Always(random_ltl(rng, depth - 1, labels))
    l, r = random_ltl(rng, depth - 1, labels), random_ltl(rng, depth - 1, labels)
    return {"and": ltl.And, "or": ltl.Or, "until": ltl.Until}[op](l, r)
