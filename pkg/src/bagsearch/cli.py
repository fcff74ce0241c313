"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 budget exceeded (enumeration, distance, or rpTree buffer capacity).
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from typing import List, Optional, Sequence

from . import fixtures
from .generator import GenParams, generate_repository
from .grammar import (GENERAL_RECURSIVE, DistanceBudgetExceeded, Grammar, GrammarError,
                      compile_keywords, load_grammar, recursion_class, validate_proper)
from .matcher import Query, QueryTooLarge, baseline_match, match, opt_match
from .oracle import (EnumerationBudget, EnumerationBudgetExceeded, brute_match,
                     brute_rptrees, brute_score_exact, enumerate_trees)
from .repository import Repository, check_repository, load_repository
from .rptree import top_k_rptrees
from .scorer import opt_score, score, score_exact, write_rho_max_sidecar
from .search import (StaleIndex, build_indexes, grammar_keywords, read_index, search_all,
                     top_k, write_index)

OK, USAGE, DATA, BUDGET = 0, 1, 2, 3
BENCH_HEADER = "bucket_lo,bucket_hi,algo,avg_ms,max_ms,n"
BENCH_ALGOS = ("match", "opt_match", "baseline_match", "score", "opt_score")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_threads() -> int:
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--repo", help="repository manifest")
    common.add_argument("--index", help="persisted index file")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--seed", type=int, default=GenParams.seed)

    p = _Parser(prog="bagsearch", description="Keyword search over workflow bag grammars.")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("gen", parents=[common], help="generate a synthetic repository")
    s.add_argument("out", help="output directory")
    s.add_argument("--n-grammars", type=int, default=GenParams.n_grammars)
    s.add_argument("--params", help="gen-params.txt to start from")
    s.add_argument("--general-recursion", action="store_true")

    s = sub.add_parser("validate", parents=[common], help="properness and repository consistency")
    s.add_argument("grammars", nargs="*", help="grammar files; defaults to the repository")

    s = sub.add_parser("index", parents=[common], help="build and persist indexes and sidecars")
    s.add_argument("--out", help="index path (default: index.tsv beside the manifest)")

    for name, helptext in (("match", "does G generate Q"), ("score", "relevance of G to Q")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("grammar", help="grammar file, repository id, or fixture:<name>")
        s.add_argument("query")
        if name == "match":
            s.add_argument("--algo", choices=("match", "opt", "baseline"), default="opt")
        else:
            s.add_argument("--exact", action="store_true", help="print the exact fraction")

    s = sub.add_parser("search", parents=[common], help="every grammar matching Q")
    s.add_argument("query")

    s = sub.add_parser("topk", parents=[common], help="k most relevant grammars")
    s.add_argument("query")
    s.add_argument("-k", type=int, default=10)

    s = sub.add_parser("rptrees", parents=[common], help="top-k representative parse trees")
    s.add_argument("grammar")
    s.add_argument("query")
    s.add_argument("-k", type=int, default=3)
    s.add_argument("-c", "--capacity", type=int, default=None)
    s.add_argument("--heuristic-ok", action="store_true",
                   help="accept best-effort results on general-recursive grammars")

    s = sub.add_parser("oracle", parents=[common], help="brute-force references")
    s.add_argument("what", choices=("match", "score", "rptrees", "enumerate"))
    s.add_argument("grammar")
    s.add_argument("query", nargs="?", default="")
    s.add_argument("--height", type=int, default=6)
    s.add_argument("--max-trees", type=int, default=200_000)
    s.add_argument("-k", type=int, default=3)

    s = sub.add_parser("bench", parents=[common], help="per-size-bucket timings as CSV")
    s.add_argument("--queries", type=int, default=3, help="queries per grammar")
    s.add_argument("--query-size", type=int, default=2)
    s.add_argument("--bucket", type=int, default=100)
    s.add_argument("--algos", default=",".join(BENCH_ALGOS))
    return p


# ---------------------------------------------------------------- helpers

def _repo(args) -> Repository:
    if not args.repo:
        raise UsageError("--repo is required")
    if not os.path.isfile(args.repo):
        raise FileNotFoundError(args.repo)
    return load_repository(args.repo)


def _grammar(args, ref: str) -> Grammar:
    if ref.startswith("fixture:"):
        name = ref.split(":", 1)[1]
        if name not in fixtures.TEXTS:
            raise GrammarError(f"unknown fixture {name}")
        return fixtures.load(name)
    if os.path.isfile(ref):
        return compile_keywords(load_grammar(ref))
    if args.repo:
        repo = _repo(args)
        if ref in repo.grammars:
            return repo[ref]
    raise FileNotFoundError(f"no grammar file or repository id {ref}")


def _indexes(args, repo: Repository):
    if args.index:
        if not os.path.isfile(args.index):
            raise FileNotFoundError(args.index)
        return read_index(args.index, repo)
    return build_indexes(repo, workers=_workers(args))


def _workers(args) -> int:
    return args.threads if args.threads else _default_threads()


def _fmt_float(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------- subcommands

def cmd_gen(args, out) -> int:
    base = GenParams()
    if args.params:
        with open(args.params, encoding="utf-8") as fh:
            base = GenParams.from_text(fh.read())
    p = GenParams(**{**base.__dict__, "seed": args.seed, "n_grammars": args.n_grammars,
                     "general_recursion": args.general_recursion or base.general_recursion})
    repo = generate_repository(p, args.out)
    manifest = os.path.join(args.out, "manifest.txt")
    if args.format == "structured":
        out.write(f"manifest\t{manifest}\ngrammars\t{len(repo)}\n")
    else:
        out.write(f"wrote {len(repo)} grammars; manifest {manifest}\n")
    return OK


def cmd_validate(args, out) -> int:
    bad = 0
    if args.grammars:
        named = [(path, compile_keywords(load_grammar(path))) for path in args.grammars]
        repo = Repository.from_grammars([g for _, g in named])
    else:
        repo = _repo(args)
        named = [(gid, repo[gid]) for gid in repo.ids]
    for name, g in named:
        for v in validate_proper(g):
            out.write(f"{name}\t{v}\n")
            bad += 1
    for v in check_repository(repo):
        out.write(f"repository\t{v}\n")
        bad += 1
    if args.format == "text" and not bad:
        out.write(f"ok: {len(named)} grammars\n")
    return DATA if bad else OK


def cmd_index(args, out) -> int:
    repo = _repo(args)
    idx = build_indexes(repo, workers=_workers(args))
    path = args.out or args.index or os.path.join(os.path.dirname(os.path.abspath(args.repo)),
                                                  "index.tsv")
    for gid in repo.ids:
        write_rho_max_sidecar(repo[gid], repo.paths[gid])
    write_index(path, repo, idx)
    if args.format == "structured":
        out.write(f"index\t{path}\nkeywords\t{len(idx.inverted)}\n")
    else:
        out.write(f"indexed {len(repo)} grammars, {len(idx.inverted)} keywords -> {path}\n")
    return OK


def cmd_match(args, out) -> int:
    g = _grammar(args, args.grammar)
    q = Query.parse(args.query)
    fn = {"match": match, "opt": opt_match, "baseline": baseline_match}[args.algo]
    out.write("true\n" if fn(g, q) else "false\n")
    return OK


def cmd_score(args, out) -> int:
    g = _grammar(args, args.grammar)
    q = Query.parse(args.query)
    if args.exact:
        out.write(f"{score_exact(g, q)}\n")
    else:
        out.write(_fmt_float(score(g, q)) + "\n")
    return OK


def cmd_search(args, out) -> int:
    repo = _repo(args)
    idx = _indexes(args, repo)
    for gid in sorted(search_all(repo, Query.parse(args.query), idx)):
        out.write(gid + "\n")
    return OK


def cmd_topk(args, out) -> int:
    if args.k < 1:
        raise UsageError("-k must be positive")
    repo = _repo(args)
    q = Query.parse(args.query)
    if not q.keywords:
        if args.format == "structured":
            out.write("flag\tdegenerate\n")
        else:
            sys.stderr.write("note: empty query, every grammar matches with score 1.0\n")
    idx = _indexes(args, repo)
    for gid, s in top_k(repo, q, args.k, idx):
        out.write(f"{gid}\t{_fmt_float(s)}\n")
    return OK


def cmd_rptrees(args, out) -> int:
    if args.k < 1:
        raise UsageError("-k must be positive")
    g = _grammar(args, args.grammar)
    q = Query.parse(args.query)
    general = recursion_class(g) == GENERAL_RECURSIVE
    res = top_k_rptrees(g, q, args.k, c=args.capacity)
    if args.format == "structured":
        if res.heuristic:
            out.write("flag\theuristic\n")
        if res.partial:
            out.write(f"flag\tpartial\t{res.capacity}\n")
        for t in res:
            out.write(f"tree\t{t.rho}\t{t.key}\n")
    else:
        for i, t in enumerate(res, 1):
            out.write(f"#{i} rho={t.rho} ({float(t.rho):.6g})\n{t.key}\n{t.ascii()}\n\n")
        if res.heuristic:
            out.write("heuristic: grammar is general-recursive; results are best effort\n")
        if res.partial:
            out.write(f"partial: buffers could not certify {args.k} trees at capacity "
                      f"{res.capacity}\n")
    if res.partial:
        return BUDGET
    if general and not args.heuristic_ok:
        sys.stderr.write("warning: general-recursive grammar; pass --heuristic-ok to accept\n")
        return DATA
    return OK


def cmd_oracle(args, out) -> int:
    g = _grammar(args, args.grammar)
    budget = EnumerationBudget(args.height, args.max_trees)
    q = Query.parse(args.query)
    if args.what == "match":
        out.write("true\n" if brute_match(g, q, budget) else "false\n")
    elif args.what == "score":
        s = brute_score_exact(g, q, budget)
        out.write(f"{s}\n" if args.format == "structured" else f"{_fmt_float(s)}\n")
    elif args.what == "rptrees":
        for t in brute_rptrees(g, q, args.k, budget):
            out.write(f"tree\t{t.rho}\t{t.key}\n")
    else:
        trees = sorted(enumerate_trees(g, budget=budget), key=lambda t: (-t.rho, t.key))
        for t in trees:
            out.write(f"tree\t{t.rho}\t{t.key}\n")
    return OK


def _bench_queries(g: Grammar, n: int, size: int, rng: random.Random) -> List[Query]:
    kws = grammar_keywords(g)
    if not kws:
        return []
    return [Query(tuple(rng.sample(kws, min(size, len(kws))))) for _ in range(n)]


def cmd_bench(args, out) -> int:
    repo = _repo(args)
    algos = [a for a in args.algos.split(",") if a]
    unknown = set(algos) - set(BENCH_ALGOS)
    if unknown:
        raise UsageError(f"unknown algorithms: {', '.join(sorted(unknown))}")
    fns = {"match": match, "opt_match": opt_match, "baseline_match": baseline_match,
           "score": score, "opt_score": opt_score}
    rng = random.Random(args.seed)
    samples = {}  # (bucket, algo) -> per-grammar average ms
    for gid in repo.ids:
        g = repo[gid]
        qs = _bench_queries(g, args.queries, args.query_size, rng)
        if not qs:
            continue
        bucket = g.size // args.bucket
        for algo in algos:
            fn = fns[algo]
            t0 = time.perf_counter()
            for q in qs:
                fn(g, q)
            ms = (time.perf_counter() - t0) * 1000 / len(qs)
            samples.setdefault((bucket, algo), []).append(ms)
    out.write(BENCH_HEADER + "\n")
    for (bucket, algo) in sorted(samples, key=lambda e: (e[0], algos.index(e[1]))):
        xs = samples[(bucket, algo)]
        lo = bucket * args.bucket
        out.write(f"{lo},{lo + args.bucket},{algo},{sum(xs) / len(xs):.3f},{max(xs):.3f},"
                  f"{len(xs)}\n")
    return OK


COMMANDS = {"gen": cmd_gen, "validate": cmd_validate, "index": cmd_index, "match": cmd_match,
            "score": cmd_score, "search": cmd_search, "topk": cmd_topk, "rptrees": cmd_rptrees,
            "oracle": cmd_oracle, "bench": cmd_bench}


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return USAGE
    except SystemExit as exc:  # --help
        return OK if not exc.code else USAGE
    try:
        return COMMANDS[args.cmd](args, out)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return USAGE
    except (EnumerationBudgetExceeded, DistanceBudgetExceeded) as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return BUDGET
    except (GrammarError, QueryTooLarge, StaleIndex, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return DATA


def main() -> None:
    sys.exit(run())
