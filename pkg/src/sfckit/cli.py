"""Command line front end.

Subcommands: design, place, simulate, validate, bench.  Every command
reads a scenario file (defaulting to the bundled four-service catalog),
writes CSV tables under --out and prints a short summary.  Exit codes:
0 success, 1 validation failure, 2 input error.

The SFCKIT_EXACT_LIMIT environment variable overrides the request-count
threshold above which the exact solver is skipped (default 60).
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from . import pipeline
from .errors import ParseError, SfcError, ValidationError
from .placement import PlacementMethod
from .queueing import QueueSetting
from .scenario import bundled_scenario_path, load_scenario

DEFAULT_EXACT_LIMIT = 60
_METHOD_ALIASES = {m.value: m for m in PlacementMethod}


def exact_limit() -> int:
    raw = os.environ.get("SFCKIT_EXACT_LIMIT")
    if raw is None:
        return DEFAULT_EXACT_LIMIT
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(
            [f"SFCKIT_EXACT_LIMIT must be an integer, got {raw!r}"])


def _settings_from(arg: str):
    if arg == "both":
        return (QueueSetting.MM1, QueueSetting.MMM)
    return (QueueSetting(arg),)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", type=Path,
                        default=bundled_scenario_path(),
                        help="scenario JSON file (default: bundled catalog)")
    parser.add_argument("--setting", choices=("mm1", "mmm", "both"),
                        default="both", help="queueing setting(s) to run")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    parser.add_argument("--out", type=Path, default=Path("results"),
                        help="output directory for CSV tables")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfckit",
        description="Design reliability-guaranteed service chains and place "
                    "them on substrate nodes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="run the chain design pipeline")
    _add_common(p)

    p = sub.add_parser("place", help="place a seeded request set")
    _add_common(p)
    p.add_argument("--methods", default="ilp,mma,mdm,ffd",
                   help="comma list from: ilp,mma,mdm,ffd")

    p = sub.add_parser("simulate", help="discrete-event response-time sweep")
    _add_common(p)
    p.add_argument("--arrivals", type=int, default=200_000,
                   help="arrivals per simulation run")

    p = sub.add_parser("validate",
                       help="check closed forms against simulation oracles")
    _add_common(p)
    p.add_argument("--arrivals", type=int, default=200_000,
                   help="arrivals per simulation run")

    p = sub.add_parser("bench", help="wall-clock comparison of placers")
    _add_common(p)
    p.add_argument("--sizes", default="10,20,30,40,50,60",
                   help="comma list of request counts")
    p.add_argument("--methods", default="ilp,mma,mdm",
                   help="comma list from: ilp,mma,mdm,ffd")
    return parser


def _load(args):
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
    return scenario


def _parse_methods(raw: str):
    methods = []
    for token in raw.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token not in _METHOD_ALIASES:
            raise ValidationError([f"unknown placement method {token!r}"])
        methods.append(_METHOD_ALIASES[token])
    if not methods:
        raise ValidationError(["no placement methods selected"])
    return methods


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = _load(args)
        out: Path = args.out
        if args.command == "design":
            rows = pipeline.design_report(scenario,
                                          _settings_from(args.setting))
            write_to = out / "design.csv"
            pipeline.write_csv(write_to, rows, pipeline.DESIGN_COLUMNS)
            print(f"wrote {len(rows)} design rows to {write_to}")
            return 0
        if args.command == "place":
            rows = pipeline.place_report(scenario,
                                         _parse_methods(args.methods),
                                         exact_limit())
            write_to = out / "place.csv"
            pipeline.write_csv(write_to, rows, pipeline.PLACE_COLUMNS)
            for row in rows:
                label = (f"{row['method']}: {row['active_nodes']} nodes"
                         if row["active_nodes"] != "" else
                         f"{row['method']}: {row['note']}")
                print(label)
            print(f"wrote {write_to}")
            return 0
        if args.command == "simulate":
            rows = pipeline.simulate_report(
                scenario, _settings_from(args.setting),
                arrivals=args.arrivals, seed=args.seed)
            write_to = out / "simulate.csv"
            pipeline.write_csv(write_to, rows, pipeline.SIM_COLUMNS)
            print(f"wrote {len(rows)} simulation rows to {write_to}")
            return 0
        if args.command == "validate":
            rows, ok = pipeline.validate_report(
                scenario, arrivals=args.arrivals, seed=args.seed,
                settings=_settings_from(args.setting))
            write_to = out / "validate.csv"
            pipeline.write_csv(write_to, rows, pipeline.VALIDATE_COLUMNS)
            for row in rows:
                print(f"[{row['status']}] {row['check']} {row['setting']} "
                      f"{row['subject']}: {row['criterion']}")
            print(f"wrote {write_to}")
            return 0 if ok else 1
        if args.command == "bench":
            sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
            rows = pipeline.bench_report(scenario, sizes,
                                         _parse_methods(args.methods),
                                         exact_limit())
            write_to = out / "bench.csv"
            pipeline.write_csv(write_to, rows, pipeline.BENCH_COLUMNS)
            print(f"wrote {len(rows)} bench rows to {write_to}")
            return 0
        raise AssertionError(f"unhandled command {args.command}")
    except (ParseError, ValidationError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except SfcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
