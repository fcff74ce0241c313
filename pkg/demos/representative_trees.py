"""Representative parse trees on the 8-rule grammar used in the rpTree experiments."""

from bagsearch import fixtures, is_rptree, parse_tree, top_k_rptrees, tree_subsumes

g = fixtures.load("ranking")

out = top_k_rptrees(g, "s2 b3", 8)
print(f"heuristic={out.heuristic} partial={out.partial} capacity={out.capacity}")
for i, t in enumerate(out, 1):
    print(f"#{i}  rho={t.rho} ({float(t.rho):.3f})  {t.key}")

t2 = parse_tree(g, "(r1 (r3 s2) (r8 b3))")
t7 = parse_tree(g, "(r1 (r1 (r3 s2) (r8 b3)) (r8 b3))")
t8 = parse_tree(g, "(r1 (r2 (r3 s2) (r5 a2) (r5 a2) s1) (r8 b3))")

# t7 repeats t2's recursion, so t2 subsumes it and t7 is left out
print("t2 subsumes t7:", tree_subsumes(t2, t7))
print("t7 representative:", is_rptree(g, t7, t7.height))
print("t8 representative:", is_rptree(g, t8, t8.height))
print(t8.ascii())

# general recursion: a subsumed tree can be more probable than its subsumer
ce = fixtures.load("counterexample")
small = parse_tree(ce, "(r1 (r2 (r5 a) (r7 b)) (r2 (r5 a) (r7 b)) (r3 s1))")
big = parse_tree(ce, "(r1 (r2 (r4 (r5 a) (r5 a)) (r6 (r7 b) (r7 b))) (r3 s1) (r3 s1))")
print(f"{float(small.rho):.6f} < {float(big.rho):.6f}, subsumes: {tree_subsumes(small, big)}")
