"""The ``co2`` command-line driver.

Exit codes: 0 success / true / honest, 1 false / dishonest, 2 inconclusive,
3 error.  JSON goes to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

from . import ccs, encoding, ltl, pcl, pretty
from .errors import Co2Error, ParseError
from .parser import SourceFile, make_model, parse_contracts, parse_file, parse_observable, parse_pcl
from .runtime import Reducer, normalise
from .runtime.honesty import DEFAULT_MAX_DEPTH, DEFAULT_MAX_STATES, check_honesty
from .runtime.reduction import agreement_search
from .runtime.trace import index_strategy, parse_strategy, run_trace, step_json
from .terms import Ident, Kind

EXIT_OK, EXIT_FALSE, EXIT_INCONCLUSIVE, EXIT_ERROR = 0, 1, 2, 3


class CliError(Co2Error):
    pass


# -- helpers -------------------------------------------------------------------------

def corpus_names() -> list[str]:
    root = resources.files("co2calc") / "corpus"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".co2"))


def resolve_source(name: str) -> Path:
    """A path, or the name of a shipped corpus file (with or without ``.co2``)."""
    p = Path(name)
    if p.exists():
        return p
    stem = p.name[:-4] if p.name.endswith(".co2") else p.name
    candidate = resources.files("co2calc") / "corpus" / f"{stem}.co2"
    if candidate.is_file():
        return Path(str(candidate))
    raise CliError(f"no such file or corpus entry: {name} (corpus: {', '.join(corpus_names())})")


def load(name: str) -> tuple[SourceFile, Path]:
    path = resolve_source(name)
    try:
        return parse_file(str(path)), path
    except ParseError as e:
        for d in e.diagnostics:
            print(f"{path}:{d}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def initial(sf: SourceFile):
    return normalise(sf.system, sf.model, sf.defs), Reducer(sf.model, sf.defs)


def emit(obj, as_json: bool, text: str) -> None:
    if as_json:
        print(json.dumps(obj, indent=2))
    else:
        print(text)


def env_cap(default: int) -> int:
    return int(os.environ.get("CO2_STATE_CAP", default))


def principal_arg(text: str) -> Ident:
    if not text[:1].isupper():
        raise CliError(f"principal names start with an uppercase letter: {text!r}")
    return Ident(Kind.PRINCIPAL_NAME, text)


def describe_step(i: int, st, model) -> str:
    j = step_json(i, st, model)
    bits = [f"{j['step']:>3}. {j['rule']:<5} {', '.join(j['agents'])}"]
    if "session" in j:
        bits.append(f"@{j['session']}")
    if "label" in j:
        bits.append("<" + ", ".join(j["label"]) + ">")
    if "sigma" in j:
        bits.append("{" + ", ".join(f"{k} -> {v}" for k, v in j["sigma"].items()) + "}")
    return " ".join(bits) + "\n       " + j["state"]


# -- commands ------------------------------------------------------------------------

def cmd_run(args) -> int:
    sf, _ = load(args.file)
    cfg, red = initial(sf)
    if args.strategy == "interactive":
        strategy = _interactive(sf)
    else:
        strategy = parse_strategy(args.strategy)
    rec = run_trace(cfg, red, strategy, args.max_steps)
    data = rec.to_json(sf.model)
    lines = [f"    {data['initial']}"]
    lines += [describe_step(i + 1, st, sf.model) for i, st in enumerate(rec.steps)]
    status = "stuck" if rec.stuck else ("max steps exceeded" if rec.max_steps_exceeded else "stopped")
    lines.append(f"{len(rec.steps)} steps, {status}")
    emit(data, args.json, "\n".join(lines))
    return EXIT_OK


def _interactive(sf: SourceFile):
    def choose(steps, n):
        for k, st in enumerate(steps):
            print(f"[{k}] {describe_step(n, st, sf.model)}", file=sys.stderr)
        print("choose a step (empty input stops): ", end="", file=sys.stderr, flush=True)
        line = sys.stdin.readline()
        if not line.strip():
            return None
        return index_strategy([int(line)])(steps, n)

    return choose


def cmd_steps(args) -> int:
    sf, _ = load(args.file)
    cfg, red = initial(sf)
    steps = red.steps(cfg)
    data = [step_json(k + 1, st, sf.model) for k, st in enumerate(steps)]
    text = "\n".join(f"[{k}] {describe_step(k + 1, st, sf.model)}" for k, st in enumerate(steps)) or "no steps enabled"
    emit(data, args.json, text)
    return EXIT_OK


def cmd_honesty(args) -> int:
    sf, _ = load(args.file)
    cfg, red = initial(sf)
    who = [principal_arg(args.principal)] if args.principal else cfg.principals
    verdicts = []
    code = EXIT_OK
    lines = []
    for p in who:
        if cfg.agent(p) is None:
            raise CliError(f"no agent named {p} in the system")
        v = check_honesty(cfg, red, p, args.max_depth, env_cap(DEFAULT_MAX_STATES) if args.max_states is None else args.max_states)
        verdicts.append(v.to_json(sf.model))
        code = max(code, v.exit_code)
        line = f"{p}: {v.verdict} ({v.reason}; {v.states} states)"
        if v.verdict == "dishonest":
            line += f"\n  session {v.session}, pending obligations: {', '.join(v.obligations or []) or '-'}"
            for i, st in enumerate(v.witness or []):
                line += "\n  " + describe_step(i + 1, st, sf.model)
            if v.loop:
                line += "\n  then forever:"
                for i, st in enumerate(v.loop):
                    line += "\n  " + describe_step(len(v.witness or []) + i + 1, st, sf.model)
        lines.append(line)
    emit(verdicts[0] if args.principal else verdicts, args.json, "\n".join(lines))
    # dishonest beats inconclusive in the exit code
    codes = {x["verdict"] for x in verdicts}
    return EXIT_FALSE if "dishonest" in codes else code


def _contracts_from(args, model_name: str):
    """Contracts given inline, or the contracts of a session at the end of a run."""
    if args.contracts is not None:
        return make_model(model_name), tuple(parse_contracts(args.contracts, model_name))
    if args.file is None:
        raise CliError("give --contracts or a source file")
    sf, _ = load(args.file)
    cfg, red = initial(sf)
    final = run_trace(cfg, red, "first").final
    sessions = dict(final.sessions)
    if args.session:
        name = Ident(Kind.SESSION_NAME, args.session)
        if name not in sessions:
            raise CliError(f"no session {args.session} in the final state (sessions: {', '.join(map(str, sessions)) or 'none'})")
    elif sessions:
        name = sorted(sessions)[0]
    else:
        raise CliError("the run of the file creates no session")
    return sf.model, sessions[name]


def cmd_prove(args) -> int:
    model, env = _contracts_from(args, args.model)
    if model.name != "pcl":
        args.formula = args.goal
        return _ltl(model, env, args)
    goal = parse_pcl(args.goal)
    start = time.perf_counter()
    result = pcl.pcl_entails(env, goal)
    d = pcl.derivation(env)
    data = {
        "goal": pcl.pretty(goal),
        "contracts": [pcl.pretty(c) for c in env],
        "result": result,
        "derived": sorted(pcl.show_tatom(t) for t in d.atoms),
        "disjunctions": sorted(" \\/ ".join(sorted(pcl.show_tatom(t) for t in c)) for c in d.disjunctions),
        "contractualFixpoint": [pcl.show_clause(c) for c in d.fired_cimps],
        "seconds": round(time.perf_counter() - start, 4),
    }
    text = (f"{'true' if result else 'false'}: {data['contracts']} |- {data['goal']}\n"
            f"  derived: {', '.join(data['derived']) or '-'}\n"
            f"  contractual implications in the fixpoint: {', '.join(data['contractualFixpoint']) or '-'}")
    emit(data, args.json, text)
    return EXIT_OK if result else EXIT_FALSE


def cmd_ltl(args) -> int:
    model, env = _contracts_from(args, "ccs")
    if model.name != "ccs":
        raise CliError("ltl needs process contracts")
    return _ltl(model, env, args)


def _ltl(model, env, args) -> int:
    phi = parse_observable(args.formula, "ccs")
    c = ccs.from_components(env)
    graph = ccs.ccs_reachable(c, env_cap(ccs.DEFAULT_STATE_CAP))
    counter = ltl.find_trace(graph, ltl.Not(phi), ccs.label_satisfies)
    result = counter is None
    data = {"formula": ccs.pretty_formula(phi), "contract": ccs.pretty(c), "result": result,
            "states": len(graph.states)}
    text = f"{'true' if result else 'false'}: {data['contract']} |= {data['formula']} ({data['states']} states)"
    if counter is not None:
        stem, loop = counter
        data["counterexample"] = {"stem": [str(lab) for _, lab, _ in stem],
                                  "loop": [str(lab) for _, lab, _ in loop]}
        text += "\n  counterexample: " + " ".join(data["counterexample"]["stem"])
        if loop:
            text += " (" + " ".join(data["counterexample"]["loop"]) + ")^omega"
        elif not stem:
            text += "(empty trace)"
    emit(data, args.json, text)
    return EXIT_OK if result else EXIT_FALSE


def cmd_encode(args) -> int:
    f = encoding.from_formula(parse_pcl(args.formula))
    enc = encoding.encode(f)
    acts = sorted(encoding.latent_actions(f))
    data = {
        "formula": str(f),
        "clauses": [ccs.pretty(encoding.encode_clause(c)) for c in f.conjuncts],
        "encoding": ccs.pretty(enc),
        "latentActions": [f"{w} says {q}" for w, q in acts],
    }
    text = [f"formula:  {data['formula']}", f"encoding: {data['encoding']}",
            f"latent actions: {', '.join(data['latentActions']) or '-'}"]
    if args.check:
        t1, t2 = encoding.check_theorem1(f), encoding.check_theorem2(f)
        data["theorem1"], data["theorem2"] = t1.to_json(), t2.to_json()
        text.append(f"theorem 2: provable={t2.lhs} zero-reachable={t2.rhs} ({'agree' if t2.agrees else 'DISAGREE'})")
        text.append(f"theorem 1: lhs={t1.lhs} rhs={t1.rhs} ({'agree' if t1.agrees else 'DISAGREE'})")
    emit(data, args.json, "\n".join(text))
    return EXIT_OK


def saturate_tells(cfg, red, limit: int = 1000):
    """Fire Tau/Tell steps (first enabled) until none is left."""
    for _ in range(limit):
        pre = [s for s in red.steps(cfg) if s.rule in ("Tau", "Tell1", "Tell2")]
        if not pre:
            return cfg
        cfg = pre[0].target
    return cfg


def cmd_agree(args) -> int:
    sf, _ = load(args.file)
    cfg, red = initial(sf)
    broker = principal_arg(args.broker)
    cfg = saturate_tells(cfg, red)
    comps = cfg.agent(broker)
    if comps is None:
        raise CliError(f"no agent named {broker}")
    from .runtime.congruence import fresh_session, universe
    from .runtime.syntax import Latent
    from .terms import fresh_text

    latents = [c for c in comps if isinstance(c, Latent)]
    phi = parse_observable(args.phi, sf.model_name)
    x = Ident(Kind.SESSION_VAR, fresh_text("x", {i.text for i in universe(cfg, sf.model)}))
    s = fresh_session(cfg, sf.model)
    bound = set(cfg.delims) | {x} | set(sf.model.observable_fv(phi))
    found = agreement_search(sf.model, broker, latents, phi, x, cfg.principals, s, bound)
    data = []
    lines = [f"{broker} holds {len(latents)} latent contracts; {len(found)} minimal agreements"]
    for w in found:
        d = w.describe(sf.model)
        d["sigma"].pop(str(x), None)
        contracts = sf.model.normalize(sf.model.subst_contract(k.contract, w.sigma) for k in w.fused)
        d["obligations"] = {str(p): sf.model.obligations(contracts, p) for p in cfg.principals
                            if sf.model.obligations(contracts, p)}
        data.append(d)
        lines.append(f"  fuse {', '.join(d['fused'])}\n    sigma {d['sigma']}\n    obligations {d['obligations']}")
    emit(data, args.json, "\n".join(lines))
    return EXIT_OK if found else EXIT_FALSE


def cmd_theorems(args) -> int:
    corpus = encoding.random_corpus(args.corpus, args.seed)
    start = time.perf_counter()
    bad = []
    for f in corpus:
        for r in (encoding.check_theorem2(f), encoding.check_theorem1(f)):
            if not r.agrees:
                bad.append(r.to_json())
    secs = time.perf_counter() - start
    data = {"formulas": len(corpus), "seed": args.seed, "discrepancies": bad, "seconds": round(secs, 2)}
    emit(data, args.json, f"{len(corpus)} formulas (seed {args.seed}): {len(bad)} discrepancies in {secs:.1f}s")
    return EXIT_OK if not bad else EXIT_FALSE


def cmd_pretty(args) -> int:
    sf, _ = load(args.file)
    out = [f"model {sf.model_name}", ""]
    for name, c in sf.contracts.items():
        out.append(f"contract {name} = {sf.model.pretty_contract(c)};")
    for d in sf.defs.values():
        out.append(pretty.definition(d, sf.model))
    out.append(f"system {pretty.system(sf.system, sf.model)}")
    print("\n".join(out))
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="co2", description="Run, check and explore CO2 systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    def src(p, required=True):
        p.add_argument("file", nargs=None if required else "?",
                       help="a .co2 file, or the name of a shipped example")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("run", help="run a system under a scheduling strategy")
    src(p)
    p.add_argument("--strategy", default="first", help="first | random:SEED | interactive | indices:I,J,...")
    p.add_argument("--max-steps", type=int, default=1000)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("steps", help="list the steps enabled in the initial system")
    src(p)
    p.set_defaults(fn=cmd_steps)

    p = sub.add_parser("honesty", help="decide whether principals are honest")
    src(p)
    p.add_argument("--principal", help="check one principal (default: every agent)")
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p.add_argument("--max-states", type=int, default=None,
                   help=f"default {DEFAULT_MAX_STATES}, or CO2_STATE_CAP")
    p.set_defaults(fn=cmd_honesty)

    p = sub.add_parser("prove", help="contract entailment (PCL provability or LTL for processes)")
    src(p, required=False)
    p.add_argument("--goal", required=True)
    p.add_argument("--contracts", help="comma-separated contracts (instead of a file)")
    p.add_argument("--session", help="with a file: which session of the final state")
    p.add_argument("--model", choices=["pcl", "ccs"], default="pcl", help="model of --contracts")
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("ltl", help="check an LTL formula on process contracts")
    src(p, required=False)
    p.add_argument("--formula", required=True)
    p.add_argument("--contracts", help="comma-separated process contracts (instead of a file)")
    p.add_argument("--session")
    p.set_defaults(fn=cmd_ltl)

    p = sub.add_parser("encode", help="encode a PCL- formula into process contracts")
    p.add_argument("--formula", required=True)
    p.add_argument("--check", action="store_true", help="also check both theorems on it")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("agree", help="list the minimal agreements a broker can find")
    src(p)
    p.add_argument("--broker", required=True)
    p.add_argument("--phi", required=True, help="the broker's observable")
    p.set_defaults(fn=cmd_agree)

    p = sub.add_parser("theorems", help="check the encoding theorems on random formulae")
    p.add_argument("--corpus", type=int, default=500)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_theorems)

    p = sub.add_parser("pretty", help="parse a file and print it back")
    p.add_argument("file")
    p.set_defaults(fn=cmd_pretty)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit as e:
        return int(e.code or 0)
    except ParseError as e:
        for d in e.diagnostics:
            print(f"<argument>:{d}", file=sys.stderr)
        return EXIT_ERROR
    except (Co2Error, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
