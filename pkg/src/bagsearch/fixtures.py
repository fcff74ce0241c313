"""Small hand-written grammars used by the tests, demos, and CLI smoke runs."""

from .grammar import Grammar, compile_keywords, parse_grammar

CHAIN = """\
grammar chain
start S
prod r1: S -> A S ;
prod r2: S -> s1 ;
prod r3: S -> s2 ;
prod r4: A -> B C ;
prod r5: B -> b ;
prod r6: C -> B ;
prod r7: C -> c ;
"""

# disease susceptibility workflow, already in bag-grammar form
DISEASE = """\
grammar disease
start M0
prod r1: M0 -> M1 M2 ;
prod r2: M1 -> M3 M4 ;
prod r3: M3 -> M5 M3 ;
prod r4: M3 -> M8 M3 ;
prod r5: M3 -> M9 ;
prod r6: M4 -> lookup M6 ;
prod r7: M4 -> lookup M7 ;
prod r8: M2 -> evaluate ;
prod r9: M5 -> 23andMe ;
prod r10: M9 -> check ;
prod r11: M6 -> OMIM ;
prod r12: M7 -> PubMed ;
prod r13: M8 -> HapMap ;
"""

# the same workflow in module form, keywords as annotations
DISEASE_MODULES = """\
grammar disease-src
start M0
module M0
module M1
module M3
module M4 kw "lookup"
module M2 atomic kw "evaluate"
module M5 atomic kw "23andMe"
module M9 atomic kw "check"
module M6 atomic kw "OMIM"
module M7 atomic kw "PubMed"
module M8 atomic kw "HapMap"
prod r1: M0 -> M1 M2 ;
prod r2: M1 -> M3 M4 ;
prod r3: M3 -> M5 M3 ;
prod r4: M3 -> M8 M3 ;
prod r5: M3 -> M9 ;
prod r6: M4 -> M6 ;
prod r7: M4 -> M7 ;
"""

TERNARY = """\
grammar ternary
start S
prod r1: S -> S S S ; p=0.5
prod r2: S -> a ; p=0.5
"""

SUBSUMPTION_EXAMPLE = """\
grammar subsumption
start S
prod r1: S -> S A ;
prod r2: S -> S S B ;
prod r3: S -> s ;
prod r4: A -> a ;
prod r5: B -> B S ;
prod r6: B -> b ;
"""

RANKING = """\
grammar top1
start S
prod r1: S -> S B ;
prod r2: S -> A A S s1 ;
prod r3: S -> s2 ;
prod r4: A -> B a1 ;
prod r5: A -> a2 ;
prod r6: B -> S b1 ;
prod r7: B -> S b2 ;
prod r8: B -> b3 ;
"""

COUNTEREXAMPLE = """\
grammar counterexample
start S
prod r1: S -> S S S ; p=0.01
prod r2: S -> A B ; p=0.09
prod r3: S -> s1 ; p=0.9
prod r4: A -> A A ; p=0.5
prod r5: A -> a ; p=0.5
prod r6: B -> B B ; p=0.5
prod r7: B -> b ; p=0.5
"""

TEXTS = {
    "chain": CHAIN,
    "disease": DISEASE,
    "disease-modules": DISEASE_MODULES,
    "ternary": TERNARY,
    "subsumption": SUBSUMPTION_EXAMPLE,
    "ranking": RANKING,
    "counterexample": COUNTEREXAMPLE,
}


def load(name: str) -> Grammar:
    """Parsed and compiled fixture grammar."""
    return compile_keywords(parse_grammar(TEXTS[name]))
