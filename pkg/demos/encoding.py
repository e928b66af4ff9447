"""Logic contracts as processes: encode a few PCL- formulae, and check that
provability of the latent actions coincides with the encoding reaching 0."""
from co2calc import ccs, encoding
from co2calc.parser import parse_pcl

for text in ["A says ((B says b) -> a) /\\ B says b",
             "A says ((B says b) -> a) /\\ B says ((A says a) -> b)",
             "A says ((B says b) -->> a) /\\ B says ((A says a) -->> b)"]:
    f = parse_pcl(text)
    t2 = encoding.check_theorem2(f)
    print(text)
    print("   encoding:", ccs.pretty(encoding.encode(f)))
    print(f"   provable={t2.lhs}  reaches 0={t2.rhs}  agree={t2.agrees}\n")

corpus = encoding.random_corpus(100, seed=2024)
bad = sum(not encoding.check_theorem2(f).agrees or not encoding.check_theorem1(f).agrees for f in corpus)
print(f"{len(corpus)} random formulae: {bad} discrepancies")
