"""Command-line front end: bound evaluation, table regeneration, sweeps, verification.

Subcommands: ``bound``, ``table``, ``sweep``, ``verify``, ``optimize``.
CSV output is UTF-8, comma-separated, with a header row and '.' decimals;
rates are printed with at least six significant digits.  The environment
variable ``SYNCHAN_THREADS`` caps sweep parallelism (default 1); results are
assembled in grid order regardless of the thread count.

The SNR flag assumes unit-energy antipodal signalling with noise variance
sigma^2, so SNR = 1/sigma^2 and --snr-db maps to sigma = 10^(-snr_db/20).
Pass --sigma or --noise-var directly to sidestep that convention.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Callable, Sequence

from .bounds import ChannelParams, evaluate_bound, optimize_block_length
from .reference_tables import CellDiff, table1_diffs, table2_diffs
from .verification import Check, run_scopes

_METHODS = {
    "gallager": "gallager",
    "deletion": "deletion",
    "del-sub": "deletion_substitution",
    "del-awgn": "deletion_awgn",
    "insertion": "random_insertion",
    "del-small-p": "deletion_small_p",
    "ins-small-p": "random_insertion_small_p",
}

_SCOPES = ("properties", "oracle", "chains", "simulators")


def _thread_count() -> int:
    raw = os.environ.get("SYNCHAN_THREADS", "").strip()
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def _parallel_map(fn: Callable, items: Sequence) -> list:
    threads = _thread_count()
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _sigma_from_args(args) -> float:
    given = [
        name
        for name in ("sigma", "snr_db", "noise_var")
        if getattr(args, name, None) is not None
    ]
    if len(given) > 1:
        raise ValueError("pass at most one of --sigma, --snr-db, --noise-var")
    if not given:
        return 0.0
    if args.sigma is not None:
        return args.sigma
    if args.noise_var is not None:
        if args.noise_var < 0:
            raise ValueError("--noise-var must be nonnegative")
        return math.sqrt(args.noise_var)
    return 10.0 ** (-args.snr_db / 20.0)


def _params_from_args(args) -> ChannelParams:
    return ChannelParams(
        p_d=getattr(args, "pd", 0.0) or 0.0,
        p_e=getattr(args, "pe", 0.0) or 0.0,
        p_i=getattr(args, "pi", 0.0) or 0.0,
        sigma=_sigma_from_args(args),
    )


def _print_result(result, as_json: bool) -> None:
    if as_json:
        print(
            json.dumps(
                {
                    "method": result.method,
                    "block_length": result.block_length,
                    "rate": result.rate,
                    "components": result.components,
                },
                indent=2,
            )
        )
        return
    print(f"method        {result.method}")
    if result.block_length is not None:
        print(f"block length  {result.block_length}")
    print(f"rate          {result.rate:.6g} bits/channel use")
    for name, value in result.components.items():
        print(f"  {name:<24s} {value:+.6g}")


def cmd_bound(args) -> int:
    method = _METHODS[args.method]
    params = _params_from_args(args)
    if args.optimize_n is not None:
        n_star, result = optimize_block_length(method, params, args.optimize_n)
        if not args.json:
            print(f"optimal n     {n_star}")
        _print_result(result, args.json)
        return 0
    result = evaluate_bound(method, params, args.n)
    _print_result(result, args.json)
    return 0


def _format_cell(diff: CellDiff) -> str:
    value = f"{diff.computed:.6g}"
    if not diff.within:
        value += " [DEVIATES ref {0:g}{1}]".format(
            diff.expected, ", known misprint" if diff.known_discrepant else ""
        )
    return value


def _write_diff_csv(path: str, diffs: list[CellDiff]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["table", "p_first", "p_second", "column", "reference", "computed", "kind", "within"]
        )
        for d in diffs:
            writer.writerow(
                [d.table, f"{d.row[0]:g}", f"{d.row[1]:g}", d.column]
                + [f"{d.expected:.8g}", f"{d.computed:.8g}", d.kind, int(d.within)]
            )


def cmd_table(args) -> int:
    which = args.which.upper()
    diffs = table1_diffs() if which in ("I", "1") else table2_diffs()
    by_row: dict[tuple[str, tuple[float, float]], list[CellDiff]] = {}
    for d in diffs:
        by_row.setdefault((d.table, d.row), []).append(d)
    current_block = None
    for (block, row), cells in by_row.items():
        if block != current_block:
            print(f"\n[{block}]")
            header = ["p".ljust(10), "p2".ljust(10)] + [c.column.ljust(22) for c in cells]
            print("  ".join(header))
            current_block = block
        fields = [f"{row[0]:<10g}", f"{row[1]:<10g}"] + [
            _format_cell(c).ljust(22) for c in cells
        ]
        print("  ".join(fields))
    bad = [d for d in diffs if not d.within]
    print(f"\n{len(diffs)} cells regenerated, {len(bad)} beyond tolerance")
    for d in bad:
        note = " (known misprint in the source table)" if d.known_discrepant else ""
        print(
            f"  {d.table} row {d.row} {d.column}: computed {d.computed:.6g}"
            f" vs reference {d.expected:.6g}{note}"
        )
    if args.csv:
        _write_diff_csv(args.csv, diffs)
    return 1 if bad else 0


def _parse_axis(text: str | None, integer: bool = False) -> list | None:
    """Parse a comma list or a lo:hi:count:{lin,log} range specification.

    ``None`` (flag absent) maps to ``None``; an empty string is an empty axis.
    """
    if text is None:
        return None
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ValueError(f"range must be lo:hi:count[:lin|log], got {text!r}")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        spacing = parts[3] if len(parts) == 4 else "lin"
        if count < 1:
            raise ValueError("range count must be positive")
        if count == 1:
            values = [lo]
        elif spacing == "log":
            if lo <= 0 or hi <= 0:
                raise ValueError("log spacing requires positive endpoints")
            ratio = (hi / lo) ** (1.0 / (count - 1))
            values = [lo * ratio**i for i in range(count)]
        elif spacing == "lin":
            step = (hi - lo) / (count - 1)
            values = [lo + step * i for i in range(count)]
        else:
            raise ValueError(f"unknown spacing {spacing!r}")
    else:
        values = [float(v) for v in text.split(",")]
    return [int(round(v)) for v in values] if integer else values


def cmd_sweep(args) -> int:
    def axis(text, default, integer=False):
        parsed = _parse_axis(text, integer=integer)
        return default if parsed is None else parsed

    methods = args.method or ["gallager"]
    internal = [_METHODS[m] for m in methods]
    pd_axis = axis(args.pd, [0.0])
    pe_axis = axis(args.pe, [0.0])
    pi_axis = axis(args.pi, [0.0])
    if args.snr_db is not None:
        sigma_axis = [10.0 ** (-db / 20.0) for db in axis(args.snr_db, [])]
    else:
        sigma_axis = axis(args.sigma, [0.0])
    n_axis = axis(args.n, [None], integer=True)
    needs_n = [m for m in internal if m != "gallager"]
    if needs_n and n_axis == [None]:
        raise ValueError(f"--n is required for methods {needs_n}")
    grid = list(product(pd_axis, pe_axis, pi_axis, sigma_axis, n_axis))

    def evaluate(point):
        p_d, p_e, p_i, sigma, n = point
        params = ChannelParams(p_d=p_d, p_e=p_e, p_i=p_i, sigma=sigma)
        return [evaluate_bound(m, params, n).rate for m in internal]

    rates = _parallel_map(evaluate, grid)
    out = open(args.csv, "w", newline="", encoding="utf-8") if args.csv else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["p_d", "p_e", "p_i", "sigma", "snr_db", "n"] + methods)
        for point, row in zip(grid, rates):
            p_d, p_e, p_i, sigma, n = point
            snr = f"{-20.0 * math.log10(sigma):.8g}" if sigma > 0 else ""
            writer.writerow(
                [f"{p_d:.8g}", f"{p_e:.8g}", f"{p_i:.8g}", f"{sigma:.8g}", snr]
                + ["" if n is None else str(n)]
                + [f"{r:.8g}" for r in row]
            )
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_verify(args) -> int:
    scopes = args.scope or ["all"]
    if "all" in scopes:
        scopes = list(_SCOPES)
    scale = args.mc_samples / 1_000_000.0
    results = run_scopes(scopes, seed=args.seed, mc_scale=scale)
    failures: list[str] = []
    for scope in scopes:
        checks: list[Check] = results.get(scope, [])
        if not args.json:
            print(f"[{scope}]")
            for check in checks:
                print(f"  {check}")
        failures.extend(f"{scope}:{c.name}" for c in checks if not c.passed)
    if args.json:
        payload = {
            "scopes": {
                scope: [
                    {"name": c.name, "passed": c.passed, "detail": c.detail}
                    for c in results.get(scope, [])
                ]
                for scope in scopes
            },
            "failures": failures,
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"{len(failures)} failing checks" if failures else "all checks passed")
    return 1 if failures else 0


def cmd_optimize(args) -> int:
    method = _METHODS[args.method]
    params = _params_from_args(args)
    n_star, result = optimize_block_length(method, params, args.n_max, args.n_min)
    if not args.json:
        print(f"optimal n     {n_star}")
    _print_result(result, args.json)
    return 0


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pd", type=float, default=0.0, help="deletion probability")
    parser.add_argument("--pe", type=float, default=0.0, help="substitution probability")
    parser.add_argument("--pi", type=float, default=0.0, help="insertion probability")
    parser.add_argument("--sigma", type=float, default=None, help="AWGN noise std-dev")
    parser.add_argument("--snr-db", type=float, default=None, help="SNR in dB (1/sigma^2)")
    parser.add_argument("--noise-var", type=float, default=None, help="AWGN noise variance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synchan",
        description="Capacity lower bounds and verification for synchronization-error channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="evaluate one bound")
    p_bound.add_argument("--method", choices=sorted(_METHODS), required=True)
    p_bound.add_argument("--n", type=int, default=None, help="block length")
    p_bound.add_argument(
        "--optimize-n", type=int, default=None, metavar="MAX", help="scan block lengths up to MAX"
    )
    _add_param_flags(p_bound)
    p_bound.add_argument("--json", action="store_true")
    p_bound.set_defaults(func=cmd_bound)

    p_table = sub.add_parser("table", help="regenerate a reference table and diff it")
    p_table.add_argument("which", choices=["I", "II", "1", "2", "i", "ii"])
    p_table.add_argument("--csv", default=None, help="write the cell diff as CSV")
    p_table.set_defaults(func=cmd_table)

    p_sweep = sub.add_parser("sweep", help="evaluate bounds over a parameter grid")
    p_sweep.add_argument(
        "--method", action="append", choices=sorted(_METHODS), help="repeatable method flag"
    )
    p_sweep.add_argument("--pd", default=None, help="axis: comma list or lo:hi:count[:lin|log]")
    p_sweep.add_argument("--pe", default=None, help="axis")
    p_sweep.add_argument("--pi", default=None, help="axis")
    p_sweep.add_argument("--sigma", default=None, help="axis")
    p_sweep.add_argument("--snr-db", default=None, help="axis (dB)")
    p_sweep.add_argument("--n", default=None, help="axis (integers)")
    p_sweep.add_argument("--csv", default=None, help="output path (default stdout)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the verification suite")
    p_verify.add_argument(
        "--scope",
        action="append",
        choices=list(_SCOPES) + ["all"],
        help="repeatable; default all",
    )
    p_verify.add_argument("--seed", type=int, default=20250809)
    p_verify.add_argument(
        "--mc-samples",
        type=float,
        default=1_000_000,
        help="statistical-test sample budget (scales the registered sizes)",
    )
    p_verify.add_argument("--json", action="store_true")
    p_verify.set_defaults(func=cmd_verify)

    p_opt = sub.add_parser("optimize", help="find the best block length for a bound")
    p_opt.add_argument("--method", choices=sorted(_METHODS), required=True)
    p_opt.add_argument("--n-max", type=int, required=True)
    p_opt.add_argument("--n-min", type=int, default=None)
    _add_param_flags(p_opt)
    p_opt.add_argument("--json", action="store_true")
    p_opt.set_defaults(func=cmd_optimize)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
