"""Keyword search over repositories of probabilistic workflow bag grammars."""

from .grammar import (GENERAL_RECURSIVE, LINEAR_RECURSIVE, NON_RECURSIVE, DistanceBudgetExceeded,
                      Grammar, GrammarError, GrammarSyntaxError, ModuleDecl, Production,
                      SccOrder, Symbol, Violation, compile_keywords, distance, distance_between,
                      iteration_bound, load_grammar, parse_grammar, recursion_class, scc_order,
                      serialize_grammar, validate_proper)
from .matcher import (MAX_QUERY, KeywordSetFamily, Query, QueryTooLarge, baseline_match,
                      binarize, match, match_trace, opt_match)
from .scorer import opt_score, rho_max, score, score_exact
from .trees import ParseTree, parse_tree, path_subsumes, strictly_subsumes, tree_subsumes
from .rptree import (BoundedBuffer, RpTreeList, default_capacity, is_rptree, top_k_rptrees,
                     top_k_trees_nonrecursive)
from .oracle import (EnumerationBudget, EnumerationBudgetExceeded, brute_match, brute_rptrees,
                     brute_score, brute_subsumes, enumerate_trees)
from .repository import Repository, check_repository, load_repository
from .search import (Indexes, SearchStats, StaleIndex, TopKStats, build_indexes,
                     exhaustive_top_k, read_index, search_all, top_k, write_index)
from .generator import GenParams, generate_grammars, generate_repository, write_repository

__version__ = "0.1.0"
