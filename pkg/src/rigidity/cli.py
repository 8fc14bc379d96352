"""Command-line entry point.

Exit codes: 0 success, 1 a verification check failed, 2 usage or guard error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .automorphism import profile
from .census import (
    CensusReport,
    CheckpointError,
    default_threads,
    ratio_table,
    run_census,
)
from .groups import Permutation, close
from .structures import (
    Structure,
    TooLargeError,
    Vocabulary,
    VocabularyError,
    decode,
    read_structure,
)
from .theory import (
    BetaParams,
    PreconditionError,
    beta,
    beta_gap,
    is_full,
    membership_S,
    predict,
    verify_lemma_suite,
)

logger = logging.getLogger("rigidity")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_vocab(p: argparse.ArgumentParser) -> None:
    p.add_argument("--arities", default="2", help="comma list of arities (default: 2)")
    p.add_argument("--class", dest="structure_class", default="all",
                   choices=["all", "irreflexive", "irreflexive-symmetric"])
    p.add_argument("--vocab-file", help='JSON vocabulary, e.g. {"arities":[2,2],"class":"all"}')


def _add_output(p: argparse.ArgumentParser, formats=("table", "json")) -> None:
    p.add_argument("--format", choices=formats, default="table")
    p.add_argument("--out", help="also write the result to this file")


def _vocab(args) -> Vocabulary:
    if args.vocab_file:
        return Vocabulary.from_json(Path(args.vocab_file).read_text())
    return Vocabulary.parse(args.arities, args.structure_class)


def _parse_hex(text: str) -> int:
    try:
        return int(text, 16)
    except ValueError:
        raise UsageError(f"not a hex encoding: {text!r}") from None


def _structure(vocab: Vocabulary, n: int | None, encoding: str | None, path: str | None) -> Structure:
    if path:
        M = read_structure(Path(path).read_bytes(), vocab.structure_class)
        if M.vocab.arities != vocab.arities:
            raise UsageError("structure file arities differ from the vocabulary")
        return M
    if n is None or encoding is None:
        raise UsageError("give --n and --encoding, or --file")
    return decode(vocab, n, _parse_hex(encoding))


def _group(text: str, n: int):
    gens = [Permutation.from_cycles(g, n) for g in text.split(";") if g.strip()]
    return close(gens, degree=n)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rigidity", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("census", help="exhaustive census of S_n")
    _add_vocab(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--checkpoint", help="checkpoint file to save to and resume from")
    _add_output(p, ("table", "json", "csv"))

    p = sub.add_parser("sample", help="sampled census of S_n")
    _add_vocab(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--checkpoint")
    _add_output(p, ("table", "json", "csv"))

    p = sub.add_parser("trend", help="ratio table across census reports")
    p.add_argument("--reports", required=True, help="comma list of report JSON files")
    p.add_argument("--num", required=True, help='numerator predicate, e.g. "spt*=3"')
    p.add_argument("--den", required=True, help='denominator predicate, e.g. "spt*=2"')
    p.add_argument("--unlabelled", action="store_true")
    _add_output(p, ("table", "json", "csv"))

    p = sub.add_parser("aut", help="automorphism profile of one structure")
    _add_vocab(p)
    p.add_argument("--n", type=int)
    p.add_argument("--encoding", help="hex encoding of the structure")
    p.add_argument("--file", help="structure file (RSTR format)")
    _add_output(p)

    p = sub.add_parser("beta", help="evaluate beta(x, y, z)")
    for name in ("x", "y", "z", "k", "l", "r"):
        p.add_argument(f"--{name}", type=int, required=True)
    _add_output(p)

    p = sub.add_parser("beta-gap", help="beta gap identity for one i")
    for name in ("i", "k", "l", "r"):
        p.add_argument(f"--{name}", type=int, required=True)
    _add_output(p)

    p = sub.add_parser("predict", help="typical spt* and automorphism groups")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    _add_output(p)

    p = sub.add_parser("verify-lemmas", help="run the finite lemma checks")
    p.add_argument("--max-degree", type=int, default=6)
    _add_output(p)

    p = sub.add_parser("membership", help="test M in S_n(A, H)")
    _add_vocab(p)
    p.add_argument("--a-n", type=int, required=True, help="universe size of A")
    p.add_argument("--a", required=True, help="hex encoding of A")
    p.add_argument("--h", required=True, help='generators of H, e.g. "(1 2);(3 4)"')
    p.add_argument("--n", type=int, required=True, help="universe size of M")
    p.add_argument("--m", required=True, help="hex encoding of M")
    p.add_argument("--full", action="store_true", help="also test fullness")
    _add_output(p)
    return parser


def _table(rows: list[dict]) -> str:
    if not rows:
        return "(empty)\n"
    cols = list(rows[0])
    cells = [[("" if r.get(c) is None else str(r.get(c))) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    lines = [",".join(cols)]
    lines += [",".join("" if r.get(c) is None else str(r.get(c)) for c in cols) for r in rows]
    return "\n".join(lines) + "\n"


def _render_report(rep: CensusReport, fmt: str) -> str:
    if fmt == "json":
        return rep.to_json()
    if fmt == "csv":
        return rep.to_csv()
    rows = []
    for k in rep.sorted_keys():
        row = {**k.to_dict(), "count": rep.counts[k]}
        if rep.unlabelled is not None:
            row["unlabelled"] = rep.unlabelled.get(k, 0)
        rows.append(row)
    head = f"n={rep.n} vocab={rep.vocab.to_dict()} mode={rep.mode} total={rep.total}"
    if rep.unlabelled is not None:
        head += f" unlabelled={sum(rep.unlabelled.values())}"
    return head + "\n" + _table(rows)


def _run(args) -> tuple[str, int]:
    cmd = args.command
    if cmd in ("census", "sample"):
        vocab = _vocab(args)
        threads = args.threads if args.threads is not None else default_threads()
        if cmd == "census":
            rep = run_census(vocab, args.n, threads=threads, checkpoint_path=args.checkpoint)
        else:
            rep = run_census(vocab, args.n, "sampled", samples=args.samples, seed=args.seed,
                             threads=threads, checkpoint_path=args.checkpoint)
        logger.info("census finished in %.2fs", rep.elapsed)
        return _render_report(rep, args.format), 0

    if cmd == "trend":
        reports = [CensusReport.from_json(Path(p.strip()).read_text())
                   for p in args.reports.split(",") if p.strip()]
        rows = [r.to_dict() for r in ratio_table(reports, args.num, args.den, args.unlabelled)]
        if args.format == "json":
            doc = {"numerator": args.num, "denominator": args.den, "rows": rows}
            return json.dumps(doc, indent=2) + "\n", 0
        return (_csv(rows) if args.format == "csv" else _table(rows)), 0

    if cmd == "aut":
        vocab = _vocab(args)
        M = _structure(vocab, args.n, args.encoding, args.file)
        prof = profile(M).to_dict()
        if args.format == "json":
            return json.dumps(prof, indent=2) + "\n", 0
        prof["generators"] = " ".join(prof["generators"]) or "()"
        prof["spt_star_set"] = "{" + ", ".join(map(str, prof["spt_star_set"])) + "}"
        return _table([prof]), 0

    if cmd == "beta":
        value = beta(args.x, args.y, args.z, BetaParams(args.k, args.l, args.r))
        doc = {"x": args.x, "y": args.y, "z": args.z, "k": args.k, "l": args.l, "r": args.r,
               "beta": value}
        return (json.dumps(doc) + "\n" if args.format == "json" else f"{value}\n"), 0

    if cmd == "beta-gap":
        gap, ok = beta_gap(args.i, BetaParams(args.k, args.l, args.r))
        if args.format == "json":
            return json.dumps({"i": args.i, "gap": gap, "check": ok}) + "\n", 0 if ok else 1
        return f"{gap} check={'pass' if ok else 'fail'}\n", 0 if ok else 1

    if cmd == "predict":
        pred = predict(args.m, args.r)
        if args.format == "json":
            return json.dumps(pred.to_dict()) + "\n", 0
        return f"m'={pred.m_prime} classes: {', '.join(c.label() for c in pred.classes)}\n", 0

    if cmd == "verify-lemmas":
        results = verify_lemma_suite(args.max_degree)
        code = 0 if all(r.passed for r in results) else 1
        if args.format == "json":
            return json.dumps([r.to_dict() for r in results], indent=2) + "\n", code
        rows = [{"check": r.check, "scope": r.scope, "pass": r.passed,
                 "inspected": r.inspected, "counterexample": r.counterexample} for r in results]
        return _table(rows), code

    if cmd == "membership":
        vocab = _vocab(args)
        A = decode(vocab, args.a_n, _parse_hex(args.a))
        M = decode(vocab, args.n, _parse_hex(args.m))
        H = _group(args.h, args.a_n)
        res = membership_S(A, H, M)
        doc = {"member": res.member,
               "witness": None if res.witness_map() is None
               else {str(k): v for k, v in res.witness_map().items()}}
        if args.full and res.member:
            doc["full"] = is_full(A, H, M)
        if args.format == "json":
            return json.dumps(doc) + "\n", 0
        return "  ".join(f"{k}={v}" for k, v in doc.items()) + "\n", 0

    raise UsageError(f"unknown command {cmd}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"rigidity: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text, code = _run(args)
    except (UsageError, TooLargeError, VocabularyError, PreconditionError,
            CheckpointError, ValueError, OSError) as exc:
        print(f"rigidity: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    return code


dispatch = main


if __name__ == "__main__":
    sys.exit(main())
