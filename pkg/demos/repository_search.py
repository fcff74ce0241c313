"""Generate a synthetic repository, index it, and run boolean and top-k search."""

import random
import statistics
import sys
import tempfile
import time

from bagsearch import (GenParams, SearchStats, TopKStats, build_indexes, check_repository,
                       generate_repository, search_all, top_k)
from bagsearch.search import grammar_keywords

n = int(sys.argv[1]) if len(sys.argv) > 1 else 100
out_dir = tempfile.mkdtemp(prefix="bagsearch-")
repo = generate_repository(GenParams(n_grammars=n), out_dir)
sizes = [repo[g].size for g in repo.ids]
print(f"{len(repo)} grammars in {out_dir}")
print(f"size median={statistics.median(sizes)} mean={statistics.mean(sizes):.0f} max={max(sizes)}")
print("reuse edges:", len(repo.reuse_edges), "violations:", check_repository(repo))

t0 = time.perf_counter()
idx = build_indexes(repo)
print(f"indexed {len(idx.inverted)} keywords in {time.perf_counter() - t0:.1f}s")

rng = random.Random(1)
for _ in range(5):
    kws = grammar_keywords(repo[rng.choice(repo.ids)])
    q = rng.sample(kws, min(2, len(kws)))
    st = SearchStats()
    hits = search_all(repo, q, idx, stats=st)
    ts = TopKStats()
    best = top_k(repo, q, 3, idx, stats=ts)
    print(f"{' '.join(q):16} matches={len(hits):3} candidates={st.candidates:3} "
          f"evaluated={sum(st.evaluations.values()):3} implied={st.implied:2} | "
          f"top3 full scores={ts.full_scores}/{ts.candidates} "
          + ", ".join(f"{g}:{s:.3g}" for g, s in best))
