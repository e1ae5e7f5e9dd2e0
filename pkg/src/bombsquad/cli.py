"""Command-line front end.

    bombsquad run INSTANCE.json --alg one-axis [--a A] [--events log.jsonl]
    bombsquad search --alg visible-wait [--domain dom.json] [--budget N] [--jobs N] [--out trace.csv]
    bombsquad bounds [--out bounds.csv]

Exit codes: 0 ok, 2 invalid input, 3 model violation, 4 nontermination.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .analysis import SearchDomain, adversarial_search, bound_rows, default_domain, default_jobs
from .core import (
    BombSquadError,
    ConfigurationError,
    InvalidInstanceError,
    ModelViolationError,
    NonterminationError,
    instance_to_dict,
    load_instance,
)
from .offline import offline_optimal_time
from .strategies import ALGORITHMS, run

EXIT_INPUT = 2
EXIT_MODEL = 3
EXIT_NONTERMINATION = 4

CSV_COLUMNS = ["level", "d1", "d2", "v_slow", "D", "ratio"]


def _params(args) -> dict:
    return {"a": args.a} if args.a is not None else {}


def cmd_run(args) -> int:
    try:
        text = Path(args.instance).read_text()
    except OSError as exc:
        raise InvalidInstanceError(f"cannot read {args.instance}: {exc.strerror}") from None
    inst = load_instance(text)
    params = _params(args)
    if args.events:
        with open(args.events, "w") as log:
            outcome = run(inst, args.alg, params, event_log=log)
    else:
        outcome = run(inst, args.alg, params)
    t_opt = offline_optimal_time(inst)
    report = {
        "instance": instance_to_dict(inst),
        "algorithm": args.alg,
        "params": params,
        "delivery_time": outcome.delivery_time,
        "offline_time": t_opt,
        "ratio": outcome.delivery_time / t_opt,
        "events": args.events,
    }
    print(json.dumps(report, indent=2))
    return 0


def cmd_search(args) -> int:
    base = default_domain(args.alg, args.Dmax)
    if args.domain:
        src = args.domain
        try:
            text = Path(src).read_text() if not src.lstrip().startswith("{") else src
        except OSError as exc:
            raise ConfigurationError(f"cannot read {src}: {exc.strerror}") from None
        domain = SearchDomain.from_json(text, base)
    else:
        domain = base
    jobs = args.jobs if args.jobs is not None else default_jobs()
    started = time.perf_counter()
    result = adversarial_search(args.alg, domain, args.budget, jobs, _params(args))
    elapsed = time.perf_counter() - started

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for level, p, ratio in result.refinement_trace:
        writer.writerow([level] + [repr(x) for x in p] + [repr(ratio)])
    writer.writerow(["best"] + [repr(x) for x in result.best_params] + [repr(result.best_ratio)])
    if args.out:
        Path(args.out).write_text(buf.getvalue())
        summary = {
            "algorithm": args.alg,
            "best_params": dict(zip(CSV_COLUMNS[1:5], result.best_params)),
            "best_ratio": result.best_ratio,
            "evaluations": result.evaluations,
            "levels": len(result.refinement_trace),
        }
        print(json.dumps(summary, indent=2))
    else:
        sys.stdout.write(buf.getvalue())
    print(f"search: {result.evaluations} evaluations in {elapsed:.2f}s", file=sys.stderr)
    return 0


def cmd_bounds(args) -> int:
    rows = bound_rows()
    header = f"{'axis':<5} {'boundary':<13} {'bound':<6} {'computed':>12} {'reference':>12} {'abs diff':>10}  source"
    print(header)
    print("-" * len(header))
    for r in rows:
        print(f"{r.axis:<5} {r.boundary:<13} {r.kind:<6} {r.computed:>12.6f} {r.reference:>12.6f} "
              f"{r.difference:>10.1e}  {r.source}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["axis", "boundary", "bound", "computed", "reference", "abs_diff", "source"])
    for r in rows:
        writer.writerow([r.axis, r.boundary, r.kind, repr(r.computed), repr(r.reference), repr(r.difference),
                         r.source])
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        print()
        sys.stdout.write(buf.getvalue())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bombsquad", description="Two-robot bomb delivery simulator and analysis tools.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one instance and report its competitive ratio")
    r.add_argument("instance", help="instance JSON file")
    r.add_argument("--alg", required=True, choices=ALGORITHMS)
    r.add_argument("--a", type=float, default=None, help="expansion factor for zigzag strategies")
    r.add_argument("--events", metavar="PATH", help="write the event log as JSON lines")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("search", help="adversarial grid search for the worst instance")
    s.add_argument("--alg", required=True, choices=[a for a in ALGORITHMS if a != "generic-zigzag"])
    s.add_argument("--domain", help="domain JSON file or inline JSON object")
    s.add_argument("--budget", type=int, default=None, help="maximum number of grid evaluations")
    s.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    s.add_argument("--out", metavar="PATH", help="write the CSV trace here instead of stdout")
    s.add_argument("--a", type=float, default=None, help="expansion factor for invisible-zigzag")
    s.add_argument("--Dmax", type=float, default=180.0, help="upper end of the D axis for invisible-zigzag")
    s.add_argument("--seed", type=int, default=None, help="accepted for compatibility; the search is deterministic")
    s.set_defaults(func=cmd_search)

    b = sub.add_parser("bounds", help="recompute the upper/lower competitive-ratio bounds")
    b.add_argument("--out", metavar="PATH", help="write the CSV here instead of stdout")
    b.set_defaults(func=cmd_bounds)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ModelViolationError as exc:
        print(f"error: model violation: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except NonterminationError as exc:
        print(f"error: nontermination: {exc}", file=sys.stderr)
        return EXIT_NONTERMINATION
    except (BombSquadError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
