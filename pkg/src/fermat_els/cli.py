"""Command-line surface: solubility verdicts, exact densities, constants,
the census, and the verification suites.

Scalar subcommands print one JSON object on stdout; ``census`` prints CSV.
Exact rationals are serialized as "num/den" strings, floats with 12
significant digits.  Exit codes: 0 success, 1 verification failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import verify as verify_mod
from .census import census_sweep, write_census_csv
from .constants import alpha, leading_constant
from .densities import DensityCache, delta_p
from .local import ExponentContext, els, qp_soluble
from .arith import FactorTable

ENV_CACHE_DIR = "FERMAT_ELS_CACHE_DIR"


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _f12(x: float) -> float:
    return float(f"{x:.12g}")


def _triple(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated integers")
    try:
        a = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return a  # type: ignore[return-value]


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fermat-els",
        description="Local solubility, local densities, and the everywhere-"
        "locally-soluble census for a1*x^n + a2*y^n + a3*z^n = 0.",
    )
    ap.add_argument(
        "--cache-dir",
        default=None,
        help=f"density cache directory (overrides ${ENV_CACHE_DIR})",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("solvable", help="Q_p solubility verdict for one triple")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--a", type=_triple, required=True, metavar="A1,A2,A3")

    sp = sub.add_parser("els", help="everywhere-local solubility of one triple")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--a", type=_triple, required=True, metavar="A1,A2,A3")

    sp = sub.add_parser("delta-p", help="exact local density delta_p(n)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument(
        "--method",
        choices=["auto", "direct", "classed", "closed"],
        default="auto",
    )
    sp.add_argument("--exact", action="store_true", help="include exact rationals")
    sp.add_argument("--force", action="store_true", help="override the direct-enumeration budget")

    sp = sub.add_parser("alpha", help="the exponent alpha_n, exactly")
    sp.add_argument("--n", type=int, required=True)

    sp = sub.add_parser("constant", help="leading constant C_n report")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--pmax", type=int, default=10_000)
    sp.add_argument("--factors", action="store_true", help="include the per-prime factor log")

    sp = sub.add_parser("census", help="count ELS triples up to |a_i| <= B")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--bmax", type=int, required=True)
    sp.add_argument("--step", type=int, default=None)
    sp.add_argument("--pmax", type=int, default=10_000)
    sp.add_argument("--checkpoint", default=None)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--strategy", choices=["symmetric", "direct"], default="symmetric")
    sp.add_argument("--output", default=None, help="CSV path (default: stdout)")

    sp = sub.add_parser("verify", help="run the cross-check suites")
    sp.add_argument("--suite", choices=["quick", "full"], default="quick")

    return ap


def _cache_from(args) -> DensityCache | None:
    cache_dir = args.cache_dir or os.environ.get(ENV_CACHE_DIR)
    if not cache_dir:
        return None
    os.makedirs(cache_dir, exist_ok=True)
    return DensityCache(os.path.join(cache_dir, "densities.jsonl"))


def _emit(obj: dict) -> None:
    json.dump(obj, sys.stdout)
    sys.stdout.write("\n")


def main(argv: list[str] | None = None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.cmd == "solvable":
        ctx = ExponentContext.for_exponent(args.n)
        verdict = qp_soluble(args.a, ctx, args.p)
        _emit({"n": args.n, "p": args.p, "a": list(args.a), "soluble": verdict})
        return 0

    if args.cmd == "els":
        ctx = ExponentContext.for_exponent(args.n)
        bound = max(2, *(abs(x) for x in args.a))
        verdict = els(args.a, ctx, FactorTable.build(bound))
        _emit({"n": args.n, "a": list(args.a), "els": verdict})
        return 0

    if args.cmd == "delta-p":
        ctx = ExponentContext.for_exponent(args.n)
        d = delta_p(ctx, args.p, args.method, cache=_cache_from(args), force=args.force)
        out = {
            "n": args.n,
            "p": args.p,
            "method": d.method,
            "delta_float": _f12(float(d.exact)),
        }
        if args.exact:
            out["exact"] = _frac(d.exact)
            out["normalized"] = _frac(d.normalized)
        _emit(out)
        return 0

    if args.cmd == "alpha":
        a = alpha(args.n)
        _emit({"n": args.n, "alpha": _frac(a), "alpha_float": _f12(float(a))})
        return 0

    if args.cmd == "constant":
        ctx = ExponentContext.for_exponent(args.n)
        rep = leading_constant(
            ctx, args.pmax, cache=_cache_from(args), include_factors=args.factors
        )
        _emit(rep.to_json_dict())
        return 0

    if args.cmd == "census":
        ctx = ExponentContext.for_exponent(args.n)
        if args.step:
            b_list = list(range(args.step, args.bmax + 1, args.step))
            if not b_list or b_list[-1] != args.bmax:
                b_list.append(args.bmax)
        else:
            b_list = [args.bmax]
        rows = census_sweep(
            ctx,
            b_list,
            p_max=args.pmax,
            checkpoint_path=args.checkpoint,
            strategy=args.strategy,
            threads=args.threads,
            cache=_cache_from(args),
        )
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                write_census_csv(rows, fh)
        else:
            write_census_csv(rows, sys.stdout)
        return 0

    if args.cmd == "verify":
        results = verify_mod.run_suite(args.suite)
        failed = 0
        for name, ok, detail in results:
            print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
            failed += not ok
        print(f"{len(results) - failed}/{len(results)} checks passed ({args.suite} suite)")
        return 1 if failed else 0

    raise AssertionError(f"unhandled command {args.cmd!r}")


if __name__ == "__main__":
    sys.exit(main())
