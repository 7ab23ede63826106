"""Command-line front end.

Subcommands: classify, count, access, inv, permute, bench, oracle-check.
Queries live one per file; data is a directory of headerless CSV files,
one per relation, file stem = relation symbol, column types inferred
(all-integer columns load as int64, anything else as string).  Answer
output is TSV, one answer per line, values in head-variable order.

Exit codes: 0 success, 1 usage, 2 unsupported query class, 3 data error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bench import baseline_sample_with_rejection, bench_run
from .engine import UnsupportedQueryError, build_union_sets, compile_cq
from .index import NOT_AN_ANSWER, OUT_OF_BOUND
from .mcucq import NOT_MC_UCQ, aligned_structure, build_mcucq
from .oracle import brute_force_answers
from .queries import UCQ, Const, ParseError, QueryClass, Var, is_free_connex, parse_query
from .shuffle import Rng, random_permutation
from .union_enum import union_random_permutation
from .values import Database, DataError, infer_column_types, load_csv

USAGE_EXIT = 1
CLASS_EXIT = 2
DATA_EXIT = 3

DATA_ENV = "QSHUFFLE_DATA"


class _CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # map argparse's exit(2) onto usage exit 1
        raise _CliError(message, USAGE_EXIT)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qshuffle", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("query", help="path to the query file")
        p.add_argument("--data", default=os.environ.get(DATA_ENV, "."),
                       help=f"data directory (default: ${DATA_ENV} or '.')")
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        p.add_argument("--mode", choices=["auto", "union-enum", "mc-access"],
                       default="auto", help="union strategy (default auto)")
        return p

    common(sub.add_parser("classify", help="report the class of each disjunct"))
    common(sub.add_parser("count", help="number of answers"))
    p = common(sub.add_parser("access", help="answer at a given index"))
    p.add_argument("index", type=int)
    p = common(sub.add_parser("inv", help="index of a given answer"))
    p.add_argument("answer", nargs="*", help="answer values in head order")
    p = common(sub.add_parser("permute", help="all answers in random order"))
    p.add_argument("--limit", type=int, default=None, help="stop after N answers")
    p = common(sub.add_parser("bench", help="timing and rejection report (TSV)"))
    p.add_argument("--percent", default="10,50,100",
                   help="comma-separated percentages of answers to enumerate")
    p.add_argument("--repeat", type=int, default=1, help="runs to average")
    p.add_argument("--baseline", type=int, default=None, metavar="K",
                   help="also sample K distinct answers with the rejection baseline")
    common(sub.add_parser("oracle-check", help="engine vs brute force"))
    return parser


# ---------------------------------------------------------------------------


def _load(args) -> tuple[UCQ, Database]:
    try:
        text = Path(args.query).read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliError(f"cannot read query file: {exc}", DATA_EXIT)
    try:
        ucq = parse_query(text)
    except ParseError as exc:
        raise _CliError(f"query parse error: {exc}", DATA_EXIT)

    arities: dict[str, int] = {}
    for d in ucq.disjuncts:
        for a in d.atoms:
            arities[a.relation] = len(a.terms)
    rels = []
    for name in sorted(arities):
        path = Path(args.data) / f"{name}.csv"
        try:
            types = infer_column_types(path, arities[name])
            rels.append(load_csv(path, name, types))
        except DataError as exc:
            raise _CliError(str(exc), DATA_EXIT)
    return ucq, Database.of(rels)


def _require_free_connex(ucq: UCQ) -> None:
    for i, d in enumerate(ucq.disjuncts):
        kind = is_free_connex(d).kind
        if kind is not QueryClass.FREE_CONNEX:
            raise _CliError(
                f"disjunct {i + 1} is {kind.value}: this engine evaluates "
                "free-connex queries only",
                CLASS_EXIT,
            )


def _plan(ucq: UCQ, db: Database, mode: str):
    """Returns ('cq'|'mc', handle) or ('union', None)."""
    _require_free_connex(ucq)
    if len(ucq.disjuncts) == 1:
        return "cq", compile_cq(ucq.disjuncts[0], db).index
    if mode in ("auto", "mc-access"):
        mc = build_mcucq(ucq, db)
        if mc is not NOT_MC_UCQ:
            return "mc", mc
        if mode == "mc-access":
            raise _CliError(
                "union is not structurally aligned; random access unavailable "
                "(use --mode union-enum)",
                CLASS_EXIT,
            )
    return "union", None


def _emit_answer(answer) -> str:
    return "\t".join(str(v) for v in answer)


def _head_value_types(ucq: UCQ, db: Database) -> list[type]:
    """Expected Python type per head position, read off binding columns."""
    types: list[type] = []
    first = ucq.disjuncts[0]
    for v in first.head:
        bound: type = str
        done = False
        for atom in first.atoms:
            for pos, term in enumerate(atom.terms):
                if isinstance(term, Var) and term.name == v:
                    rel = db[atom.relation]
                    if rel.tuples:
                        bound = type(rel.tuples[0][pos])
                    done = True
                    break
            if done:
                break
        types.append(bound)
    return types


def _cmd_classify(args) -> int:
    ucq, db = _load(args)
    kinds = [is_free_connex(d).kind for d in ucq.disjuncts]
    for i, kind in enumerate(kinds):
        print(f"disjunct {i + 1}: {kind.value}")
    if len(ucq.disjuncts) > 1:
        if all(k is QueryClass.FREE_CONNEX for k in kinds) and aligned_structure(ucq):
            print("union: mc-ucq (random access available)")
        else:
            print("union: not recognized as mc-ucq (random-order enumeration only)")
    return 0


def _cmd_count(args) -> int:
    ucq, db = _load(args)
    kind, handle = _plan(ucq, db, args.mode)
    if kind in ("cq", "mc"):
        print(handle.count())
        return 0
    stream, _ = union_random_permutation(build_union_sets(ucq, db), Rng(args.seed))
    print(sum(1 for _ in stream))
    return 0


def _cmd_access(args) -> int:
    ucq, db = _load(args)
    kind, handle = _plan(ucq, db, args.mode)
    if kind == "union":
        raise _CliError(
            "this union only supports random-order enumeration, not random "
            "access (disjuncts are not structurally aligned)",
            CLASS_EXIT,
        )
    if args.index < 0:
        raise _CliError("answer index must be nonnegative", USAGE_EXIT)
    answer = handle.access(args.index)
    print("out-of-bound" if answer is OUT_OF_BOUND else _emit_answer(answer))
    return 0


def _cmd_inv(args) -> int:
    ucq, db = _load(args)
    kind, handle = _plan(ucq, db, args.mode)
    if kind == "union":
        raise _CliError(
            "this union only supports random-order enumeration, not inverted "
            "access (disjuncts are not structurally aligned)",
            CLASS_EXIT,
        )
    types = _head_value_types(ucq, db)
    if len(args.answer) != len(types):
        raise _CliError(f"expected {len(types)} answer values", USAGE_EXIT)
    answer = tuple(
        int(text) if want is int else text for text, want in zip(args.answer, types)
    )
    j = handle.inverted_access(answer)
    print("not-an-answer" if j is NOT_AN_ANSWER else j)
    return 0


def _cmd_permute(args) -> int:
    ucq, db = _load(args)
    kind, handle = _plan(ucq, db, args.mode)
    rng = Rng(args.seed)
    if kind == "union":
        stream, _ = union_random_permutation(build_union_sets(ucq, db), rng)
    else:
        stream = random_permutation(handle, rng)
    emitted = 0
    for answer in stream:
        print(_emit_answer(answer))
        emitted += 1
        if args.limit is not None and emitted >= args.limit:
            break
    return 0


def _cmd_bench(args) -> int:
    ucq, db = _load(args)
    _require_free_connex(ucq)
    try:
        percents = [int(p) for p in args.percent.split(",") if p]
    except ValueError:
        raise _CliError("--percent wants a comma-separated integer list", USAGE_EXIT)
    try:
        report = bench_run(ucq, db, percents, repeat=args.repeat,
                           seed=args.seed, mode=args.mode)
    except ValueError as exc:
        raise _CliError(str(exc), CLASS_EXIT)
    print(report.to_tsv())
    if args.baseline is not None:
        kind, handle = _plan(ucq, db, "auto" if args.mode == "union-enum" else args.mode)
        if kind == "union":
            raise _CliError("baseline sampling needs a random-access handle", CLASS_EXIT)
        _, trials = baseline_sample_with_rejection(handle, args.baseline, Rng(args.seed))
        print()
        print("baseline_k\tbaseline_trials")
        print(f"{args.baseline}\t{trials}")
    return 0


def _cmd_oracle_check(args) -> int:
    ucq, db = _load(args)
    _require_free_connex(ucq)
    expected = brute_force_answers(ucq, db)
    failures = 0

    def check(label: str, ok: bool) -> None:
        nonlocal failures
        print(f"{'ok' if ok else 'MISMATCH'}\t{label}")
        failures += 0 if ok else 1

    kind, handle = _plan(ucq, db, args.mode)
    if kind in ("cq", "mc"):
        check("count", handle.count() == len(expected))
        got = [handle.access(j) for j in range(handle.count())]
        check("sequential access answers", sorted(got) == sorted(expected))
        check("no duplicates", len(set(got)) == len(got))
        check(
            "inverted access bijection",
            all(handle.inverted_access(a) == j for j, a in enumerate(got)),
        )
        perm = list(random_permutation(handle, Rng(args.seed)))
        check("random permutation answers", sorted(perm) == sorted(expected))
    if len(ucq.disjuncts) > 1:
        stream, stats = union_random_permutation(build_union_sets(ucq, db), Rng(args.seed))
        got = list(stream)
        check("union enumeration answers", sorted(got) == sorted(expected))
        check("union iteration bound", stats.iterations <= 2 * len(expected))
    return 0 if failures == 0 else 1


_COMMANDS = {
    "classify": _cmd_classify,
    "count": _cmd_count,
    "access": _cmd_access,
    "inv": _cmd_inv,
    "permute": _cmd_permute,
    "bench": _cmd_bench,
    "oracle-check": _cmd_oracle_check,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _CliError as exc:
        print(f"qshuffle: {exc}", file=sys.stderr)
        return exc.code
    except UnsupportedQueryError as exc:
        print(f"qshuffle: {exc}", file=sys.stderr)
        return CLASS_EXIT
    except (DataError, ParseError) as exc:
        print(f"qshuffle: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
