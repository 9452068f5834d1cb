"""Command-line front end.

Exit codes: 0 success / SAT / valid, 1 UNSAT / invalid, 2 unknown or budget
exhausted, 64 usage error, 65 input format error. Lines starting with ``#``
are diagnostics and may vary between runs; everything else on stdout is
reproducible for a fixed seed.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from . import __version__
from .certify import ParseError, decode_model, format_certificate, load_certificate, save_certificate, verify
from .dpll import ResourceBudget, Status, solve_complete
from .encoder import (
    CTheory,
    FormatError,
    SymmetryMode,
    encode_cnf,
    encode_ps,
    parse_vdw_header,
    read_dimacs,
    read_xdimacs,
    vdw_header,
    write_dimacs,
    write_xdimacs,
)
from .model import Certificate, Params
from .search import ExactResult, search_exact, search_lower_bound, theoretical_bounds
from .walk import BLOCK_MOVE, FLIP, WalkConfig, solve_local

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_FORMAT = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: {message}")


def _add_instance(p: argparse.ArgumentParser, need_m: bool = True) -> None:
    p.add_argument("--k", type=int, help="number of blocks")
    p.add_argument("--l", type=int, help="progression length")
    if need_m:
        p.add_argument("--m", type=int, help="segment length")


def _add_walk_flags(p: argparse.ArgumentParser) -> None:
    d = WalkConfig()
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--noise", type=float, default=d.noise)
    p.add_argument("--max-flips", type=int, default=d.max_flips)
    p.add_argument("--restarts", type=int, default=d.restarts)
    p.add_argument("--neighborhood", choices=[FLIP, BLOCK_MOVE], default=None,
                   help="default: block-move for ccnf theories, flip for plain cnf")
    p.add_argument("--jobs", type=int, default=1, help="parallel restarts")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vdw", description="van der Waerden numbers via satisfiability")
    parser.add_argument("--version", action="version", version=f"vdw {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("encode", help="write the clause theory for (k, l, m)")
    _add_instance(p)
    p.add_argument("--format", choices=["cnf", "ccnf"], default="cnf")
    p.add_argument("--symmetry", choices=[s.value for s in SymmetryMode], default="none")
    p.add_argument("-o", "--output", help="output file (default: stdout)")

    p = sub.add_parser("solve", help="decide one instance")
    p.add_argument("--engine", choices=["dpll", "walk"], required=True)
    p.add_argument("--format", choices=["cnf", "ccnf"], default=None,
                   help="theory to build (default: cnf for dpll, ccnf for walk) or format of -i")
    p.add_argument("--symmetry", choices=[s.value for s in SymmetryMode], default="none")
    _add_instance(p)
    p.add_argument("-i", "--input", help="read a DIMACS / xDIMACS theory instead of --k --l --m")
    _add_walk_flags(p)
    p.add_argument("--timeout", type=float, default=None, help="seconds (dpll)")
    p.add_argument("--cert-dir", default=".", help="where certificates are written")
    p.add_argument("--quiet", action="store_true", help="print only the summary line")

    p = sub.add_parser("verify", help="check a certificate file")
    p.add_argument("--cert", required=True)
    p.add_argument("--l", type=int, default=None, help="progression length (overrides the file)")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("search", help="exact value or lower bound of W(k, l)")
    _add_instance(p, need_m=False)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="complete search (default)")
    mode.add_argument("--lower", action="store_true", help="local-search lower bound")
    p.add_argument("--start", type=int, help="first m for --lower")
    p.add_argument("--target", type=int, help="stop --lower once this m is certified")
    p.add_argument("--max-m", type=int)
    p.add_argument("--symmetry", choices=[s.value for s in SymmetryMode], default="lex")
    p.add_argument("--galloping", action="store_true")
    p.add_argument("--timeout", type=float, default=None)
    _add_walk_flags(p)
    p.add_argument("--cert-dir", default=".")
    p.add_argument("--manifest", help="run manifest path")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("bounds", help="classical lower bounds")
    _add_instance(p, need_m=False)
    return parser


def _params(args: argparse.Namespace, need_m: bool = True) -> Params:
    missing = [f"--{n}" for n in ("k", "l", "m") if (n != "m" or need_m) and getattr(args, n) is None]
    if missing:
        raise UsageError(f"missing {' '.join(missing)}")
    try:
        return Params(args.k, args.l, args.m if need_m else 1)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _walk_config(args: argparse.Namespace, neighborhood: str) -> WalkConfig:
    try:
        return WalkConfig(args.noise, args.max_flips, args.restarts, args.seed, neighborhood)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cmd_encode(args: argparse.Namespace) -> int:
    params = _params(args)
    sym = SymmetryMode(args.symmetry)
    out = open(args.output, "w", encoding="ascii", newline="\n") if args.output else sys.stdout
    try:
        comments = [vdw_header(params, sym)]
        if args.format == "cnf":
            write_dimacs(encode_cnf(params, sym), out, comments)
        else:
            write_xdimacs(encode_ps(params, sym), out, comments)
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def _write_cert(cert: Certificate, cert_dir: str) -> str:
    os.makedirs(cert_dir, exist_ok=True)
    p = cert.params
    path = os.path.join(cert_dir, f"w{p.k}_{p.l}_{p.m}.txt")
    save_certificate(cert, path)
    return path


def _cmd_solve(args: argparse.Namespace) -> int:
    fmt = args.format or ("cnf" if args.engine == "dpll" else "ccnf")
    params: Params | None = None
    if args.input:
        if any(getattr(args, n) is not None for n in ("k", "l", "m")):
            raise UsageError("give either -i FILE or --k --l --m, not both")
        with open(args.input, encoding="utf-8") as f:
            theory, comments = (read_dimacs if fmt == "cnf" else read_xdimacs)(f)
        found = parse_vdw_header(comments)
        params = found[0] if found else None
    else:
        params = _params(args)
        sym = SymmetryMode(args.symmetry)
        theory = encode_cnf(params, sym) if fmt == "cnf" else encode_ps(params, sym)

    if args.engine == "dpll":
        if isinstance(theory, CTheory):
            raise UsageError("the dpll engine needs a plain cnf theory")
        result = solve_complete(theory, ResourceBudget(seconds=args.timeout), diagnostics=sys.stderr)
        summary = result.status.value
    else:
        ctheory = theory if isinstance(theory, CTheory) else CTheory.from_cnf(theory)
        neighborhood = args.neighborhood or (BLOCK_MOVE if fmt == "ccnf" else FLIP)
        config = _walk_config(args, neighborhood)
        result = solve_local(ctheory, config, progress=sys.stderr, jobs=args.jobs)
        summary = (f"SAT seed={result.metadata['restart_seed']} flips={result.metadata['flips']}"
                   if result.is_sat else "UNKNOWN")

    if result.status is Status.UNSAT:
        print(summary)
        return EXIT_NO
    if result.status is Status.UNKNOWN:
        print(summary if args.engine == "walk" else f"UNKNOWN {result.reason}")
        return EXIT_UNKNOWN
    if params is None:
        # foreign theory: no instance to decode, print the model instead
        if not args.quiet:
            print("v " + " ".join(map(str, result.assignment.literals())) + " 0")
        print(summary)
        return EXIT_OK
    cert = Certificate(params, decode_model(result.assignment, params), f"{args.engine} solve")
    report = verify(cert)
    if not report.valid:
        raise AssertionError(report.summary())
    path = _write_cert(cert, args.cert_dir)
    if not args.quiet:
        sys.stdout.write(format_certificate(cert))
    print(f"{summary} cert={path}")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    cert = load_certificate(args.cert, l=args.l)
    report = verify(cert)
    if args.quiet:
        print(report.summary())
    else:
        sys.stdout.write(report.render())
    return EXIT_OK if report.valid else EXIT_NO


def _cmd_search(args: argparse.Namespace) -> int:
    base = _params(args, need_m=False)
    k, l = base.k, base.l
    if args.lower:
        if args.start is None:
            raise UsageError("--lower needs --start M")
        if args.start <= k:
            raise UsageError("--start must exceed k")
        config = _walk_config(args, args.neighborhood or BLOCK_MOVE)
        res = search_lower_bound(k, l, args.start, config, target=args.target, max_m=args.max_m,
                                 jobs=args.jobs, cert_dir=args.cert_dir, manifest=args.manifest,
                                 progress=sys.stderr)
        if res.certificate is None:
            print(f"no witness found at m={args.start}")
            return EXIT_UNKNOWN
        path = next(a.certificate_path for a in res.attempts if a.m == res.m)
        if not args.quiet:
            sys.stdout.write(format_certificate(res.certificate))
        print(f"W({k},{l}) > {res.m} cert={path}")
        return EXIT_OK

    res = search_exact(k, l, ResourceBudget(seconds=args.timeout), SymmetryMode(args.symmetry),
                       galloping=args.galloping, cert_dir=args.cert_dir, manifest=args.manifest,
                       diagnostics=sys.stderr)
    if isinstance(res, ExactResult):
        print(f"W({k},{l}) = {res.value}")
        return EXIT_OK
    print(f"W({k},{l}) > {res.m} ({res.reason})")
    return EXIT_UNKNOWN


def _cmd_bounds(args: argparse.Namespace) -> int:
    base = _params(args, need_m=False)
    for line in theoretical_bounds(base.k, base.l).lines():
        print(line)
    return EXIT_OK


_COMMANDS = {"encode": _cmd_encode, "solve": _cmd_solve, "verify": _cmd_verify,
             "search": _cmd_search, "bounds": _cmd_bounds}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, ParseError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


def main() -> None:
    sys.exit(run())
