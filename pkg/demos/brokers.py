"""Brokered sessions: a third party (C) fuses the sale, and an escrow agent (E)
sits between buyer and seller. Both runs end with every agent and the session at 0."""
from co2calc.cli import resolve_source
from co2calc.parser import parse_file
from co2calc.runtime import Reducer, normalise
from co2calc.runtime.trace import run_trace

for name in ["broker", "escrow"]:
    sf = parse_file(str(resolve_source(name)))
    cfg = normalise(sf.system, sf.model, sf.defs)
    data = run_trace(cfg, Reducer(sf.model, sf.defs)).to_json(sf.model)
    print(f"== {name}")
    for st in data["steps"]:
        extra = f" {' '.join(st['label'])}" if "label" in st else ""
        print(f"  {st['step']:2d}. {st['rule']:<5} {', '.join(st['agents'])}{extra}")
    print("  final:", data["final"], "\n")
