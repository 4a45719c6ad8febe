"""Command-line interface.

Subcommands cover the full workflow: generate a random sparse signal,
compute its autocorrelation, recover a signal back by either algorithm,
enumerate all consistent signals, compare two signals up to equivalence,
and run a Monte Carlo sweep from a config file.

Exit codes: 0 success (and "equal" for check-equal); 1 not equal or I/O
failure; 2 malformed file or arguments; 3 dimension mismatch; 4 recovery
failed (a structured JSON report is still written).
"""

import argparse
import json
import sys

from .combinatorial import recover_signal as recover_combinatorial
from .errors import RecoveryError
from .experiment import parse_config_file, run_experiment
from .oracle import enumerate_factorizations
from .sdp import recover_signal as recover_sdp
from .signals import (
    SparseModelParams,
    autocorrelation,
    equivalent,
    load_autocorrelation,
    load_signal,
    random_sparse_signal,
    save_autocorrelation,
    save_signal,
    signal_to_obj,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_NOT_EQUAL = 1
EXIT_IO = 1
EXIT_MALFORMED = 2
EXIT_DIMENSION = 3
EXIT_RECOVERY = 4


class _DimensionMismatch(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phaseret",
        description="sparse signal recovery from autocorrelation data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="draw a random sparse signal")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--s", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--dist", default="standard_normal")
    gen.add_argument("--out", required=True)

    auto = sub.add_parser("autocorr", help="autocorrelation of a signal file")
    auto.add_argument("--in", dest="infile", required=True)
    auto.add_argument("--out", required=True)

    rec = sub.add_parser("recover", help="recover a signal from autocorrelation")
    rec.add_argument("--algo", choices=("comb", "sdp"), required=True)
    rec.add_argument("--in", dest="infile", required=True)
    rec.add_argument("--k", type=int, default=None,
                     help="sparsity (required for --algo sdp)")
    rec.add_argument("--out", required=True)

    fac = sub.add_parser("factorize", help="enumerate all consistent signals")
    fac.add_argument("--in", dest="infile", required=True)
    fac.add_argument("--tol", type=float, default=1e-6)
    fac.add_argument("--out", required=True)

    chk = sub.add_parser("check-equal", help="compare two signals up to equivalence")
    chk.add_argument("--a", required=True)
    chk.add_argument("--b", required=True)
    chk.add_argument("--tol", type=float, default=1e-6)

    exp = sub.add_parser("experiment", help="run a Monte Carlo sweep")
    exp.add_argument("--config", required=True)

    return parser


def _cmd_generate(args) -> int:
    params = SparseModelParams(
        n=args.n, s=args.s, seed=args.seed, value_dist=args.dist
    )
    save_signal(random_sparse_signal(params), args.out)
    return EXIT_OK


def _cmd_autocorr(args) -> int:
    save_autocorrelation(autocorrelation(load_signal(args.infile)), args.out)
    return EXIT_OK


def _cmd_recover(args) -> int:
    a = load_autocorrelation(args.infile)
    try:
        if args.algo == "comb":
            recovered = recover_combinatorial(a)
        else:
            if args.k is None:
                print("recover --algo sdp requires --k", file=sys.stderr)
                return EXIT_MALFORMED
            recovered = recover_sdp(a, args.k)
    except RecoveryError as exc:
        report = {"error": exc.kind, "message": str(exc)}
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
        print(f"recovery failed: {exc.kind}: {exc}", file=sys.stderr)
        return EXIT_RECOVERY
    save_signal(recovered, args.out)
    return EXIT_OK


def _cmd_factorize(args) -> int:
    a = load_autocorrelation(args.infile)
    classes = enumerate_factorizations(a, tol=args.tol)
    payload = {
        "n": a.n,
        "count": len(classes),
        "classes": [signal_to_obj(sig) for sig in classes],
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def _cmd_check_equal(args) -> int:
    first = load_signal(args.a)
    second = load_signal(args.b)
    if first.n != second.n:
        raise _DimensionMismatch(
            f"signals have different lengths {first.n} and {second.n}"
        )
    if equivalent(first, second, tol=args.tol):
        print("equal")
        return EXIT_OK
    print("not-equal")
    return EXIT_NOT_EQUAL


def _cmd_experiment(args) -> int:
    cfg = parse_config_file(args.config)
    rows = run_experiment(cfg)
    for row in rows:
        print(
            f"{row.algorithm} n={row.n} s={row.s}: "
            f"{row.successes}/{row.trials} ({row.success_rate:.3f})"
        )
    if cfg.output_path:
        print(f"wrote {cfg.output_path}")
    return EXIT_OK


_HANDLERS = {
    "generate": _cmd_generate,
    "autocorr": _cmd_autocorr,
    "recover": _cmd_recover,
    "factorize": _cmd_factorize,
    "check-equal": _cmd_check_equal,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code not in (0, None) else EXIT_OK
    try:
        return _HANDLERS[args.command](args)
    except _DimensionMismatch as exc:
        print(f"dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
