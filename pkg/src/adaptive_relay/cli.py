"""Command-line interface.

Set ``ADAPTIVE_RELAY_LOG`` (e.g. ``INFO`` or ``DEBUG``) to change log verbosity.
Exit status is 0 on success, 1 when a simulation or verification fails and 2
on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .bounds import upper_bound
from .channel import GENERATORS, MODES, read_pair_file, sample_pair, write_pair_file
from .errors import AdaptiveRelayError
from .field import DEFAULT_FIELD_ORDER
from .harness import SWEEP_FIELDS, run_session, run_sweep, verify_exhaustive
from .params import achievable_rate, derive_params, nonadaptive_rate

log = logging.getLogger("adaptive_relay")


def _code_args(p: argparse.ArgumentParser, field: bool = True):
    p.add_argument("--n1", type=int, required=True, help="first-link erasures per window")
    p.add_argument("--n2", type=int, required=True, help="second-link erasures per window")
    p.add_argument("--t", type=int, required=True, help="decoding delay in slots")
    if field:
        p.add_argument("--q", type=int, default=DEFAULT_FIELD_ORDER, help="field order")
        p.add_argument("--c", type=int, default=1, help="packets sharing one header")


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_params(args) -> int:
    params = derive_params(args.n1, args.n2, args.t, args.q, args.c)
    out = params.to_dict()
    for name, value in (
        ("achievable_rate", achievable_rate(params)),
        ("achievable_rate_no_header", achievable_rate(params, include_header=False)),
        ("nonadaptive_rate", nonadaptive_rate(args.n1, args.n2, args.t)),
        ("packet_rate", params.packet_rate),
    ):
        out[name] = str(value)
        out[name + "_float"] = float(value)
    _emit(out)
    return 0


def cmd_simulate(args) -> int:
    params = derive_params(args.n1, args.n2, args.t, args.q, args.c)
    if args.pattern_file:
        pair = read_pair_file(args.pattern_file, args.mode)
        if args.horizon is not None and args.horizon != pair.horizon:
            raise SystemExit(f"--horizon {args.horizon} disagrees with the pattern length {pair.horizon}")
    else:
        if args.horizon is None:
            raise SystemExit("--horizon is required with --adversary")
        pair = sample_pair(args.n1, args.n2, args.t, args.horizon, args.seed, args.adversary, args.mode)
    messages = None
    if args.messages_file:
        messages = np.loadtxt(args.messages_file, dtype=np.int64, ndmin=2)
    report = run_session(params, pair, messages=messages, seed=args.seed, mode=pair.mode)
    out = report.to_dict()
    if not args.fills:
        out.pop("fills")
    _emit(out)
    return 0 if report.success else 1


def cmd_verify(args) -> int:
    params = derive_params(args.n1, args.n2, args.t, args.q)
    rep = verify_exhaustive(params, args.horizon, args.mode, seed=args.seed)
    _emit(rep.to_dict())
    if rep.success:
        print("PASS", file=sys.stderr)
        return 0
    write_pair_file(args.counterexample, rep.counterexample)
    print(f"FAIL: counterexample written to {args.counterexample}", file=sys.stderr)
    return 1


def cmd_bounds(args) -> int:
    report = upper_bound(args.n1, args.n2, args.t, tau=args.tau, period_cap=args.period_cap or None)
    print(report.to_json())
    return 0


def cmd_sweep(args) -> int:
    rows = run_sweep(args.samples, args.seed, tau=args.tau, multiplex=args.c)
    records = [r.as_record() for r in rows]
    out = Path(args.out)
    if args.json:
        out.write_text(json.dumps(records, indent=2) + "\n")
    else:
        header = []
        for name in SWEEP_FIELDS:
            header.append(name)
            if name + "_decimal" in records[0]:
                header.append(name + "_decimal")
        with out.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=header, lineterminator="\n")
            writer.writeheader()
            writer.writerows(records)
    log.info("wrote %d rows to %s", len(rows), out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaptive-relay",
        description="Adaptive streaming codes over a three-node relay network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="derive code dimensions and rates")
    _code_args(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("simulate", help="run one source-relay-destination session")
    _code_args(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--pattern-file", help="two lines of 0/1 flags: source link, relay link")
    src.add_argument("--adversary", choices=GENERATORS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=int)
    p.add_argument("--mode", choices=MODES, default="window")
    p.add_argument("--messages-file", help="one message per line, whitespace-separated symbols")
    p.add_argument("--fills", action="store_true", help="include per-slot relay fill")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-exhaustive", help="simulate every admissible erasure pair")
    _code_args(p, field=False)
    p.add_argument("--q", type=int, default=DEFAULT_FIELD_ORDER)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--mode", choices=MODES, default="window")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--counterexample", default="counterexample.txt")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="upper bounds on the achievable rate")
    _code_args(p, field=False)
    p.add_argument("--tau", type=int, default=10_000)
    p.add_argument("--period-cap", type=int, default=0, help="0 skips the periodic search")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="randomized comparison of rates and bounds")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau", type=int, default=2000)
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true", help="write JSON instead of CSV")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("ADAPTIVE_RELAY_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AdaptiveRelayError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
