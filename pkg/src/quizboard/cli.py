"""Command-line toolchain.

Subcommands:
    compile  <in.csv> -o <bank.json>      build a question bank from CSV
    validate <bank.json> --images <dir>   check a bank's content
    selfplay --game G --mode M --games N  headless simulation with statistics
    serve    --port N --bank B --assets D run the game service

Exit codes: 0 success, 1 validation/parse failure, 2 invariant violation,
3 environment failure (unreadable files, busy port).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bank import compile_bank, load_bank, parse_question_csv, validate_bank
from .boards import GameKind, SpeedMode
from .selfplay import TURN_CAP, render_table, run_batch

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VIOLATION = 2
EXIT_ENV = 3


def cmd_compile(args: argparse.Namespace) -> int:
    try:
        text = Path(args.input).read_bytes()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_ENV
    bank, errors = parse_question_csv(text)
    if errors:
        for err in errors:
            print(f"{args.input}: {err}", file=sys.stderr)
        print(f"{len(errors)} error(s), no bank written", file=sys.stderr)
        return EXIT_INVALID
    data = compile_bank(bank)
    try:
        Path(args.output).write_bytes(data)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_ENV
    print(f"wrote {args.output} ({len(data)} bytes)")
    for lang in sorted(bank.languages):
        for topic_id, name, count in bank.catalog(lang):
            print(f"  {lang}  {topic_id:<28} {name:<28} {count:>3} questions")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        data = Path(args.bank).read_bytes()
    except OSError as exc:
        print(f"error: cannot read {args.bank}: {exc}", file=sys.stderr)
        return EXIT_ENV
    try:
        bank = load_bank(data)
    except Exception as exc:
        print(f"error: {args.bank}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    issues = validate_bank(bank, args.images)
    for issue in issues:
        print(f"{issue.code}: {issue.detail}")
    if issues:
        print(f"{len(issues)} issue(s)", file=sys.stderr)
        return EXIT_INVALID
    print("bank is valid")
    return EXIT_OK


def cmd_selfplay(args: argparse.Namespace) -> int:
    if not 0 < args.p_correct <= 1:
        print("error: --p-correct must be in (0, 1]: a team that never answers "
              "correctly can never move, so no game would ever finish",
              file=sys.stderr)
        return EXIT_INVALID
    if args.games < 1:
        print("error: --games must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    report = run_batch(
        kind=GameKind(args.game),
        mode=SpeedMode(args.mode),
        games=args.games,
        team_count=args.teams,
        seed=args.seed,
        p_correct=args.p_correct,
        check_each_turn=True,
        workers=args.workers,
    )
    print(render_table([report]))
    doc = json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n"
    if args.json:
        Path(args.json).write_text(doc)
        print(f"report written to {args.json}")
    else:
        print(doc, end="")
    if report.unfinished:
        print(f"error: {report.unfinished} game(s) still running after "
              f"{TURN_CAP} team-turns", file=sys.stderr)
        return EXIT_VIOLATION
    if report.violations:
        print(f"error: {report.violations} invariant violation(s)", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import run_server  # imported lazily: asyncio setup is heavier

    try:
        data = Path(args.bank).read_bytes()
    except OSError as exc:
        print(f"error: cannot read bank {args.bank}: {exc}", file=sys.stderr)
        return EXIT_ENV
    try:
        bank = load_bank(data)
    except Exception as exc:
        print(f"error: {args.bank}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    issues = validate_bank(bank, args.assets)
    for issue in issues:
        print(f"warning: {issue.code}: {issue.detail}", file=sys.stderr)
    try:
        run_server(
            host=args.host,
            port=args.port,
            bank=bank,
            asset_root=Path(args.assets) if args.assets else None,
            client_dir=Path(args.client) if args.client else None,
            seed=args.seed,
        )
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_ENV
    except KeyboardInterrupt:
        print("\nstopped")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quizboard",
        description="Quiz-gated board games: bank tools, simulator, service.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="build a bank file from a question CSV")
    p.add_argument("input", help="question CSV path")
    p.add_argument("-o", "--output", required=True, help="bank JSON output path")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("validate", help="check a compiled bank")
    p.add_argument("bank", help="bank JSON path")
    p.add_argument("--images", default=None, help="asset root for image checks")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("selfplay", help="run headless self-play statistics")
    p.add_argument("--game", required=True, choices=[k.value for k in GameKind])
    p.add_argument("--mode", required=True, choices=[m.value for m in SpeedMode])
    p.add_argument("--games", type=int, default=1000)
    p.add_argument("--teams", type=int, default=2, choices=(2, 3, 4))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p-correct", type=float, default=0.85,
                   help="probability the simulated team answers correctly")
    p.add_argument("--workers", type=int, default=1,
                   help="shard games over processes (never changes results)")
    p.add_argument("--json", default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_selfplay)

    p = sub.add_parser("serve", help="run the protocol service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8401)
    p.add_argument("--bank", required=True, help="compiled bank JSON path")
    p.add_argument("--assets", default=None, help="question image root")
    p.add_argument("--client", default=None, help="static web client directory")
    p.add_argument("--seed", type=int, default=0,
                   help="base seed for sessions created without one")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
