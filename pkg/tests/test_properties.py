import random

from hypothesis import given, settings, strategies as st

from bagsearch.grammar import parse_grammar, serialize_grammar
from bagsearch.matcher import maximal, product_union
from bagsearch.trees import path_subsumes

from randgram import random_grammar

labels = st.sampled_from(["r1", "r2", "r3", "r4"])
paths = st.builds(lambda body, end: tuple(body) + (end,),
                  st.lists(labels, max_size=6), st.sampled_from(["a", "b"]))


@given(paths)
def test_path_subsumption_reflexive(p):
    assert path_subsumes(p, p)


@given(paths, paths, paths)
def test_path_subsumption_transitive(p, q, r):
    if path_subsumes(p, q) and path_subsumes(q, r):
        assert path_subsumes(p, r)


@given(paths, labels, st.integers(min_value=0, max_value=6))
def test_inserting_a_label_keeps_subsumption(p, label, pos):
    pos = min(pos, len(p) - 1)
    assert path_subsumes(p, p[:pos] + (label,) + p[pos:])


masks = st.frozensets(st.integers(min_value=0, max_value=15), max_size=6)


@given(st.lists(masks.filter(bool), min_size=1, max_size=3))
def test_domination_keeps_the_maximal_unions(families):
    full = product_union(families, dominate=False)
    assert product_union(families, dominate=True) == set(maximal(full))


@settings(max_examples=60)
@given(st.integers(min_value=0, max_value=10 ** 6), st.sampled_from(["nonrec", "linear", "any"]))
def test_serialize_round_trip(seed, mode):
    g = random_grammar(random.Random(seed), mode)
    text = serialize_grammar(g)
    assert parse_grammar(text) == g
    assert serialize_grammar(parse_grammar(text)) == text
