"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 computation budget exceeded,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import __version__, report
from ._arith import require_prime
from .cache import ResultCache
from .errors import BudgetExceeded, DomainError, InvariantViolation
from .families import FAMILY_I, STAIRCASE, family_J_spec, parse_family

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for budget overruns here
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _common(sp):
    sp.add_argument("--format", choices=("csv", "json", "table"), default="table")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cache", default=None, help="JSON-lines cache path (default: $SYLOWLAB_CACHE)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sylowlab", description="Sylow subgroups of GL2 over finite and pseudofinite fields")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("families", help="list primes of a family")
    sp.add_argument("--kind", required=True, choices=("I", "J", "staircase"))
    sp.add_argument("--N", type=int, default=None, dest="N")
    sp.add_argument("--limit", type=int, required=True)
    _common(sp)

    sp = sub.add_parser("sylow", help="Sylow l-subgroups of GL2(F_p)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--ell", type=int, default=2)
    sp.add_argument("--enumerate", action="store_true")
    _common(sp)

    sp = sub.add_parser("volvachev", help="V1-V3 over F_p")
    sp.add_argument("--p", type=int, required=True)
    _common(sp)

    sp = sub.add_parser("evidence", help="evaluate a statement along a family")
    sp.add_argument("--family", required=True)
    sp.add_argument("--stmt", required=True)
    sp.add_argument("--limit", type=int, required=True)
    _common(sp)

    sp = sub.add_parser("conjugacy", help="classify Sylow 2-conjugacy in the limit")
    sp.add_argument("--family", required=True)
    sp.add_argument("--limit", type=int, required=True)
    _common(sp)

    sp = sub.add_parser("prufer", help="order counts in C_{p^i}")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--levels", type=int, required=True)
    _common(sp)
    return ap


def _families(args, cache):
    if args.N is not None and args.kind != "J":
        raise UsageError("--N is only valid with --kind J")
    if args.kind == "J":
        if args.N is None:
            raise UsageError("--kind J requires --N")
        fam = family_J_spec(args.N)
    else:
        fam = FAMILY_I if args.kind == "I" else STAIRCASE
    return report.families_report(fam, args.limit)


def _sylow(args, cache):
    require_prime(args.p, "p")
    require_prime(args.ell, "ell")
    return report.sylow_cmd_report(args.p, args.ell, args.enumerate, args.seed)


def _volvachev(args, cache):
    return report.volvachev_report(args.p)


def _evidence(args, cache):
    return report.evidence_report(parse_family(args.family), args.stmt, args.limit, args.seed, cache=cache)


def _conjugacy(args, cache):
    return report.conjugacy_report(parse_family(args.family), args.limit, args.seed, cache=cache)


def _prufer(args, cache):
    return report.prufer_report(args.p, args.levels)


COMMANDS = {
    "families": _families,
    "sylow": _sylow,
    "volvachev": _volvachev,
    "evidence": _evidence,
    "conjugacy": _conjugacy,
    "prufer": _prufer,
}


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cache = ResultCache.from_env(args.cache)
        rep = COMMANDS[args.command](args, cache)
    except UsageError as e:
        print(str(e), file=stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=stderr)
        return EXIT_BUDGET
    except InvariantViolation as e:
        print(f"internal invariant violated: {e}", file=stderr)
        return EXIT_INVARIANT
    except DomainError as e:
        # parse errors carry their position in the message; print as is
        print(f"error: {e}", file=stderr)
        return EXIT_USAGE
    for w in rep.get("warnings", ()):
        print(f"warning: {w}", file=stderr)
    stdout.write(report.RENDERERS[args.format](rep))
    return EXIT_OK


def run():
    sys.exit(main())
