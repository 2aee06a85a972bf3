"""Command line front end: ``mipkit <command> ...``.

Group arguments are ``.pcp`` files (several groups may be separated by
``---`` lines), ``named:D8`` for a built-in group, or ``corpus:27`` for all
bundled groups of an order.

Exit codes: 0 success or split, 1 usage error, 2 bad input, 3 unresolved or
unknown.
"""
from __future__ import annotations

import argparse
import sys

from .algtable import TableFormatError, build_aug_table, format_table, load_table
from .canon import canonical_form
from .caps import CapExceeded
from .corpus import corpus_groups, named, parse_many
from .pcgroup import PresentationError

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_UNRESOLVED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_groups(spec: str) -> list:
    if spec.startswith("named:"):
        try:
            return [named(spec[6:])]
        except KeyError:
            raise ValueError(f"unknown group name {spec[6:]!r}") from None
    if spec.startswith("corpus:"):
        return corpus_groups(int(spec[7:]))
    with open(spec) as fh:
        groups = parse_many(fh.read())
    if not groups:
        raise ValueError(f"{spec}: no group found")
    return groups


def _groups(specs) -> list:
    out = []
    for s in specs:
        out.extend(load_groups(s))
    return out


def _one(spec):
    gs = load_groups(spec)
    if len(gs) != 1:
        raise ValueError(f"{spec}: expected exactly one group, found {len(gs)}")
    return gs[0]


def cmd_invariants(args) -> int:
    from .invariants import _Labeler, fingerprint, format_fingerprint
    labeler = _Labeler()
    blocks = [format_fingerprint(fingerprint(g), labeler) for g in _groups(args.files)]
    sys.stdout.write("\n".join(blocks))
    return EXIT_OK


def cmd_bin(args) -> int:
    from .invariants import bin_groups, format_bins
    sys.stdout.write(format_bins(bin_groups(_groups(args.files))))
    return EXIT_OK


def cmd_split(args) -> int:
    from .driver import Split, bound_rows, format_bound_rows, format_split, mip_bin_split
    gs = _groups(args.files)
    res = mip_bin_split(gs, args.start, args.step, args.max, budget=args.budget)
    sys.stdout.write(format_split(res))
    sys.stdout.write(format_bound_rows(bound_rows(res, gs)))
    return EXIT_OK if isinstance(res.verdict, Split) else EXIT_UNRESOLVED


def cmd_jennings(args) -> int:
    from .jennings import format_report, jennings_bound, jennings_series
    G = _one(args.file)
    sys.stdout.write(format_report(jennings_series(G)))
    if args.pair:
        H = _one(args.pair)
        sys.stdout.write(f"jennings_bound {jennings_bound(G, H)}\n")
    return EXIT_OK


def cmd_table(args) -> int:
    t = build_aug_table(_one(args.file), args.trunc)
    text = format_table(t)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_canon(args) -> int:
    t = load_table(args.file)
    if args.level > t.trunc:
        raise ValueError(f"level {args.level} exceeds the table level {t.trunc}")
    try:
        cert = canonical_form(t, args.level, budget=args.budget)
    except CapExceeded as exc:
        print(f"unresolved {exc}")
        return EXIT_UNRESOLVED
    print(f"level {cert.level}")
    print(f"digest {cert.digest}")
    return EXIT_OK


def cmd_smallring(args) -> int:
    from .smallring import contains_normal_copy, format_report, small_unit_group
    G = _one(args.file)
    sr = small_unit_group(G)
    verdicts = {}
    if args.contains:
        H = _one(args.contains)
        verdicts[H.name] = contains_normal_copy(sr, H, args.budget)
    sys.stdout.write(format_report(sr, verdicts))
    return EXIT_UNRESOLVED if "unknown" in verdicts.values() else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mipkit", description="Modular isomorphism problem toolkit")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("invariants", help="group-theoretical fingerprints")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("bin", help="partition groups by fingerprint")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_bin)

    p = sub.add_parser("split", help="split a bin by canonical forms of I/I^n")
    p.add_argument("files", nargs="+")
    p.add_argument("--start", type=int, default=0, help="start level (0: Jennings bound + 1)")
    p.add_argument("--step", type=int, default=2)
    p.add_argument("--max", type=int, default=0, help="max level (0: largest nilpotency index)")
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("jennings", help="dimension subgroup series")
    p.add_argument("file")
    p.add_argument("--pair")
    p.set_defaults(func=cmd_jennings)

    p = sub.add_parser("table", help="structure constants of I/I^s")
    p.add_argument("file")
    p.add_argument("--trunc", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("canon", help="canonical form digest of a table")
    p.add_argument("file")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("smallring", help="unit group of the small group ring")
    p.add_argument("file")
    p.add_argument("--contains")
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_smallring)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PresentationError, TableFormatError, OSError, ValueError) as exc:
        print(f"mipkit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
