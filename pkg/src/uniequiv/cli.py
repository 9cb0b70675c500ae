"""Command-line front end.

Exit codes: 0 = YES, 1 = NO, 2 = INCONCLUSIVE, 3 = malformed file or shape
mismatch, 4 = invalid algebra, 5 = unmet precondition (e.g. degenerate
spectrum in generic-mixed mode), 64 = usage error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import serialize
from .algebra import span_residual
from .errors import (
    InputError,
    InvalidAlgebraError,
    MalformedInstanceError,
    NotGenericError,
    UniequivError,
)
from .linalg import Tolerances, frobenius
from .oracle import random_no_instance, random_yes_instance
from .solver import SamplerConfig, decide_invertible_equivalence, decide_uep
from .states import generic_mixed_lu, simultaneous_lu_pure, unilocal_mixed_equivalence

EXIT_YES = 0
EXIT_NO = 1
EXIT_INCONCLUSIVE = 2
EXIT_MALFORMED = 3
EXIT_INVALID_ALGEBRA = 4
EXIT_PRECONDITION = 5
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="uniequiv",
                     description="Decide simultaneous unitary equivalence of matrix sets "
                                 "and local-unitary equivalence of bipartite quantum states.")
    sub = parser.add_subparsers(dest="command", required=True)

    decide = sub.add_parser("decide", help="decide an instance file")
    decide.add_argument("instance", help="path to the JSON instance file")
    decide.add_argument("--mode", choices=serialize.MODES,
                        help="override the mode recorded in the file")
    decide.add_argument("--seed", type=int, required=True,
                        help="sampler seed (recorded in the verdict document)")
    decide.add_argument("--trials", type=int, default=32)
    decide.add_argument("--sample-max", type=int, default=1_000_000)
    decide.add_argument("--tol-rank", type=float, default=1e-10)
    decide.add_argument("--tol-residual", type=float, default=1e-8)
    decide.add_argument("--phase-grid", type=int, default=12,
                        help="grid points per circle for generic-mixed phase fallback")
    decide.add_argument("--verbose", action="store_true")
    decide.add_argument("-o", "--output", help="write the verdict document here instead of stdout")

    gen = sub.add_parser("gen", help="generate a reproducible test instance")
    kind = gen.add_mutually_exclusive_group(required=True)
    kind.add_argument("--yes", action="store_true", help="planted YES instance")
    kind.add_argument("--no", dest="no_", action="store_true",
                      help="NO instance violating the singular-value prefilter")
    gen.add_argument("--d1", type=int, required=True)
    gen.add_argument("--d2", type=int, required=True)
    gen.add_argument("--m", type=int, default=0, help="polynomial degree (m+1 pairs)")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--g1", default="full", help='"full" or "factor:a,b"')
    gen.add_argument("--g2", default="full", help='"full" or "factor:a,b"')
    gen.add_argument("-o", "--output", help="instance file path (default stdout)")
    gen.add_argument("--witness", help="also write the planted (U0, V0) here (YES only)")

    verify = sub.add_parser("verify", help="independently check a certificate")
    verify.add_argument("instance", help="path to the JSON instance file (matrix-pairs mode)")
    verify.add_argument("certificate", help="path to the certificate JSON with U, V")
    verify.add_argument("--tol-residual", type=float, default=1e-8)
    return parser


def _parse_algebra_flag(flag: str, name: str):
    if flag == "full":
        return "full"
    if flag.startswith("factor:"):
        try:
            a, b = (int(x) for x in flag[len("factor:"):].split(","))
            return ("factor", a, b)
        except ValueError:
            pass
    raise MalformedInstanceError(f'--{name}: expected "full" or "factor:a,b", got {flag!r}')


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_decide(args) -> int:
    tol = Tolerances(rank_rel=args.tol_rank, residual_abs=args.tol_residual)
    cfg = SamplerConfig(sample_max=args.sample_max, trials=args.trials, seed=args.seed)
    doc, (mode, payload) = serialize.load_instance(args.instance)
    if args.mode is not None and args.mode != mode:
        mode, payload = serialize.parse_instance({**doc, "mode": args.mode})
    start = time.perf_counter()
    if mode == "matrix-pairs":
        verdict = decide_uep(payload, cfg, tol)
    elif mode == "matpoly":
        verdict = decide_invertible_equivalence(payload[0], payload[1], cfg, tol)
    elif mode == "pure-sets":
        verdict = simultaneous_lu_pure(payload[0], payload[1], cfg, tol)
    elif mode == "unilocal-mixed":
        verdict = unilocal_mixed_equivalence(payload[0], payload[1], cfg, tol)
    else:
        verdict = generic_mixed_lu(payload[0], payload[1], cfg, tol, phase_grid=args.phase_grid)
    timing = time.perf_counter() - start
    out = serialize.verdict_document(verdict, mode=mode, seed=args.seed,
                                     timing=timing, verbose=args.verbose)
    _write(serialize.dumps_document(out), args.output)
    return {"YES": EXIT_YES, "NO": EXIT_NO}.get(verdict.verdict, EXIT_INCONCLUSIVE)


def cmd_gen(args) -> int:
    g1 = _parse_algebra_flag(args.g1, "g1")
    g2 = _parse_algebra_flag(args.g2, "g2")
    if args.d1 < 1 or args.d2 < 1 or args.m < 0:
        raise MalformedInstanceError("dimensions must be positive and m non-negative")
    if args.yes:
        inst, (U0, V0) = random_yes_instance(args.d1, args.d2, args.m, g1, g2, seed=args.seed)
        if args.witness:
            _write(serialize.dumps_document(serialize.certificate_to_json(U0, V0)), args.witness)
    else:
        if (g1, g2) != ("full", "full"):
            raise MalformedInstanceError("NO instances are generated over the full algebras")
        inst = random_no_instance(args.d1, args.d2, args.m, seed=args.seed)
    doc = serialize.instance_to_json(inst, mode="matrix-pairs", seed=args.seed)
    _write(serialize.dumps_document(doc), args.output)
    return 0


def cmd_verify(args) -> int:
    """Recompute unitarity, algebra membership and every pair residual.

    Deliberately shares nothing with the solver's internal verification
    beyond the basic matrix kernels.
    """
    tol_residual = args.tol_residual
    _, (mode, payload) = serialize.load_instance(args.instance)
    if mode != "matrix-pairs":
        raise MalformedInstanceError("verify supports matrix-pairs instances")
    inst = payload
    try:
        with open(args.certificate, "r", encoding="utf-8") as fh:
            import json
            cert_doc = json.load(fh)
    except Exception as exc:
        raise MalformedInstanceError(f"cannot read certificate: {exc}") from exc
    U, V = serialize.certificate_from_json(cert_doc)
    if U is None or V is None:
        raise MalformedInstanceError("certificate must provide both U and V")
    if U.shape != (inst.d1, inst.d1) or V.shape != (inst.d2, inst.d2):
        raise MalformedInstanceError(
            f"certificate shapes {U.shape}/{V.shape} do not match dimensions "
            f"{inst.d1}/{inst.d2}"
        )
    worst = max(
        frobenius(U.conj().T @ U - np.eye(inst.d1)),
        frobenius(V.conj().T @ V - np.eye(inst.d2)),
        span_residual(inst.G1, U),
        span_residual(inst.G2, V),
    )
    for X, Y in inst.pairs:
        worst = max(worst, frobenius(U @ X @ V.conj().T - Y) / max(1.0, frobenius(Y)))
    print(f"max residual: {worst:.6e}")
    return EXIT_YES if worst <= tol_residual else EXIT_NO


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "decide":
            return cmd_decide(args)
        if args.command == "gen":
            return cmd_gen(args)
        return cmd_verify(args)
    except MalformedInstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except InvalidAlgebraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_ALGEBRA
    except NotGenericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InputError, UniequivError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    raise SystemExit(main())
