"""Who keeps their word? Honesty verdicts for the snake-oil seller, its
contract-faithful variant, and the two e-commerce systems."""
from co2calc.cli import resolve_source
from co2calc.parser import parse_file
from co2calc.runtime import Reducer, normalise
from co2calc.runtime.honesty import check_honesty

for name in ["sale_pcl", "snakeoil_promise_ship", "snakeoil_contract", "ecommerce_ccs", "ecommerce_pcl"]:
    sf = parse_file(str(resolve_source(name)))
    cfg = normalise(sf.system, sf.model, sf.defs)
    red = Reducer(sf.model, sf.defs)
    print(f"== {name}")
    for p in cfg.principals:
        v = check_honesty(cfg, red, p)
        line = f"  {p}: {v.verdict}"
        if v.verdict == "dishonest":
            line += f" -- stuck with {', '.join(v.obligations)} in {v.session} after " \
                    f"{' '.join(s.rule for s in v.witness)}"
        print(line)
