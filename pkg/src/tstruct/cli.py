"""Command-line front end.

Exit codes: 0 pass, 1 criterion failure / no solution / failed check,
2 parse or validation error, 3 certificate failure inside truncation.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from . import io
from .errors import CertificateFailure, TStructError
from .linalg import Field
from .mutations import KNOWN, mutated
from .space import enumerate_spaces
from .supports import NoSolution, check_t_criterion, convolve, dual_star, enumerate_data, residuate
from .suites import SUITES, RunConfig, run_suites
from .tstructure import heart_cohomology, truncate

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_CERT = 0, 1, 2, 3


def _emit(obj) -> None:
    sys.stdout.write(io.dumps(obj) + "\n")


def _space(args):
    return io.load_space(args.space) if args.space else None


def _datum(args, which: str = "datum"):
    path = getattr(args, which)
    if not path:
        raise io.ParseError(f"--{which.replace('_', '-')} is required")
    return io.load_datum(path, _space(args))


def _complex(args, space):
    if not args.complex:
        raise io.ParseError("--complex is required")
    fld = Field.parse(args.field) if args.field else None
    return io.load_complex(args.complex, space, fld)


def cmd_check_datum(args) -> int:
    rep = check_t_criterion(_datum(args), strict=False)
    _emit(rep.to_json())
    return EXIT_OK if rep.holds else EXIT_FAIL


def cmd_convolve(args) -> int:
    phi, psi = _datum(args), _datum(args, "datum2")
    _emit(io.datum_to_json(convolve(phi, psi, check=True)))
    return EXIT_OK


def cmd_dual(args) -> int:
    _emit(io.datum_to_json(dual_star(_datum(args))))
    return EXIT_OK


def cmd_residuate(args) -> int:
    res = residuate(_datum(args), _datum(args, "datum2"))
    if isinstance(res, NoSolution):
        _emit({"no_solution": True, "witness": list(res.witness), "candidate": res.candidate.as_map()})
        return EXIT_FAIL
    _emit(io.datum_to_json(res))
    return EXIT_OK


def _certs(space, *certs) -> list:
    return [c.to_json(space) for c in certs]


def cmd_truncate(args) -> int:
    phi = _datum(args)
    M = _complex(args, phi.space)
    T = truncate(M, phi)
    _emit(
        {
            "lt": io.complex_to_json(T.M_lt),
            "geq": io.complex_to_json(T.M_geq),
            "cohomology": {"lt": io.cohomology_to_json(T.M_lt), "geq": io.cohomology_to_json(T.M_geq)},
            "certificates": {"lt": T.cert_lt.to_json(phi.space), "geq": T.cert_geq.to_json(phi.space)},
            "iterations": [
                {"n": n, "removed": {str(k): list(v) for k, v in sorted(d.items())}} for n, d in T.iterations
            ],
        }
    )
    return EXIT_OK


def cmd_phi_cohomology(args) -> int:
    if args.n is None:
        raise io.ParseError("--n is required")
    phi = _datum(args)
    M = _complex(args, phi.space)
    H = heart_cohomology(M, phi, args.n)
    _emit(
        {
            "n": args.n,
            "complex": io.complex_to_json(H.complex),
            "cohomology": io.cohomology_to_json(H.complex),
            "certificates": _certs(phi.space, H.cert_leq, H.cert_geq),
        }
    )
    return EXIT_OK


def _seed(args) -> int:
    env = os.environ.get("TSTRUCT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise io.ParseError(f"TSTRUCT_SEED={env!r} is not an integer") from None
    return args.seed


def cmd_verify(args) -> int:
    suites = []
    for s in args.suite or []:
        suites.extend(x for x in s.split(",") if x)
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise io.ParseError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    kw = dict(seed=_seed(args), suites=tuple(suites) or SUITES)
    if args.field:
        kw["field"] = Field.parse(args.field)
    if args.max_points is not None:
        kw["max_points"] = args.max_points
    if args.samples is not None:
        kw["samples"] = args.samples
        kw["aux_samples"] = args.samples
    cfg = RunConfig(**kw)
    with mutated(*(args.mutate or [])):
        recs = run_suites(cfg)
    for r in recs:
        _emit(r.to_json())
    failed = sum(not r.verdict for r in recs)
    counts: dict[str, list[int]] = {}
    for r in recs:
        c = counts.setdefault(r.suite.split("/")[0], [0, 0])
        c[0 if r.verdict else 1] += 1
    sys.stderr.write(io.dumps({"summary": {k: {"pass": a, "fail": b} for k, (a, b) in sorted(counts.items())}, "failed": failed}) + "\n")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_enumerate(args) -> int:
    """Spaces up to ``--max-points``, or with ``--space`` every datum in the window with its verdict."""
    if args.space:
        space = io.load_space(args.space)
        for row in enumerate_data(space):
            phi = io.SupportDatum(space, tuple(int(v) for v in row))
            rep = check_t_criterion(phi)
            _emit({"p": phi.as_map(), "t_structure": rep.holds})
        return EXIT_OK
    for space in enumerate_spaces(args.max_points or 3):
        _emit(space.to_json())
    return EXIT_OK


COMMANDS = {
    "check-datum": cmd_check_datum,
    "convolve": cmd_convolve,
    "dual": cmd_dual,
    "residuate": cmd_residuate,
    "truncate": cmd_truncate,
    "phi-cohomology": cmd_phi_cohomology,
    "verify": cmd_verify,
    "enumerate": cmd_enumerate,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_PARSE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tstruct", description="Support data, their calculus and t-structure truncations on finite spaces.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--space", help="space JSON file or one of SIER, CHAIN3, VSPACE, point")
    ap.add_argument("--datum", help="support datum JSON file")
    ap.add_argument("--datum2", help="second datum (convolve, residuate)")
    ap.add_argument("--complex", help="complex JSON file")
    ap.add_argument("--n", type=int, help="degree for phi-cohomology")
    ap.add_argument("--field", help="F2, Fp:<p> or Q")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-points", type=int, dest="max_points")
    ap.add_argument("--samples", type=int)
    ap.add_argument("--suite", action="append", help=f"suites to run (comma separated): {', '.join(SUITES)}")
    ap.add_argument("--mutate", action="append", choices=KNOWN, help=argparse.SUPPRESS)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CertificateFailure as e:
        sys.stderr.write(io.dumps({"error": "certificate", "detail": str(e)}) + "\n")
        return EXIT_CERT
    except (TStructError, ValueError, KeyError, OSError) as e:
        sys.stderr.write(io.dumps({"error": type(e).__name__, "detail": str(e)}) + "\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
