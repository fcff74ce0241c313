"""Small grammars end to end: matching, distance, scoring."""

from bagsearch import fixtures
from bagsearch import (baseline_match, distance, distance_between, match, match_trace,
                       opt_match, rho_max, score_exact, serialize_grammar)

chain = fixtures.load("chain")
print(serialize_grammar(chain))

# match: does some execution contain every keyword?
for q in ("s1 b", "s1 s2", "b c"):
    print(f"{q!r:10} match={match(chain, q)} opt={opt_match(chain, q)} "
          f"baseline={baseline_match(chain, q)}")

tr = match_trace(chain, "s1 b")
print("iterations:", tr.iterations, "early exit:", tr.early_exit)

# longest simple production sequences bound the fixpoint rounds
print("d(S->C) =", distance_between(chain, "S", "C"))
print("d(S->B) =", distance_between(chain, "S", "B"))
print("d(G)    =", distance(chain))

# score: best tree generating Q relative to the best tree overall
print("rho_max =", rho_max(chain, exact=True))
print("score('b c') =", score_exact(chain, "b c"))

# the disease-susceptibility workflow, from its module form
disease = fixtures.load("disease-modules")
for q in ("23andMe HapMap", "OMIM PubMed"):
    print(f"{q!r:18} {opt_match(disease, q)}")
