"""The sale scenario, three ways.

1. As process contracts: the buyer's and seller's contracts interact until both are 0.
2. As logic contracts: the two promises together entail payment and shipping.
3. As a CO2 system: two agents advertise, a broker fuses a session, they act.
"""
from co2calc import ccs, pcl
from co2calc.cli import resolve_source
from co2calc.parser import parse_contracts, parse_file, parse_pcl
from co2calc.runtime import Reducer, normalise
from co2calc.runtime.trace import run_trace

print("== contracts as processes")
c = ccs.from_components(parse_contracts("A says (pay?.ship^), B says (pay!)", "ccs"))
g = ccs.ccs_reachable(c)
i = 0
print("  ", ccs.pretty(g.states[i]))
while g.edges[i]:
    lab, i = g.edges[i][0]
    print("  --", lab, "->", ccs.pretty(g.states[i]))

print("\n== contracts as formulae")
env = [parse_pcl("A says ((B says pay) -> ship)"), parse_pcl("B says pay")]
goal = parse_pcl("(A says ship) /\\ (B says pay)")
print("   A says (B says pay -> ship), B says pay  |-  A says ship /\\ B says pay :",
      pcl.pcl_entails(env, goal))

print("\n== the CO2 system")
sf = parse_file(str(resolve_source("sale_pcl")))
cfg = normalise(sf.system, sf.model, sf.defs)
rec = run_trace(cfg, Reducer(sf.model, sf.defs))
data = rec.to_json(sf.model)
print("  ", data["initial"])
for st in data["steps"]:
    print(f"  {st['step']}. {st['rule']:<5} {' '.join(st['agents'])}")
print("   final:", data["final"])
