#!/usr/bin/env python3
"""How much faster is fast mode? Monte Carlo over all three games.

Usage: python scripts/speedup_study.py [--games N] [--teams K] [--seed S]
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from quizboard.boards import GameKind, SpeedMode
from quizboard.selfplay import render_table, run_batch


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--games", type=int, default=2000)
    parser.add_argument("--teams", type=int, default=2, choices=(2, 3, 4))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", default=None)
    args = parser.parse_args()

    reports = []
    rows = []
    for kind in GameKind:
        per_mode = {}
        for mode in SpeedMode:
            rep = run_batch(kind, mode, games=args.games, team_count=args.teams,
                            seed=args.seed, p_correct=1.0)
            reports.append(rep)
            per_mode[mode] = rep
        classic = per_mode[SpeedMode.CLASSIC].mean_turns
        fast = per_mode[SpeedMode.FAST].mean_turns
        rows.append((kind.value, classic, fast, classic / fast))

    print(render_table(reports))
    print()
    print(f"{'game':<12}{'classic':>9}{'fast':>8}{'speedup':>9}")
    for game, classic, fast, ratio in rows:
        print(f"{game:<12}{classic:>9.1f}{fast:>8.1f}{ratio:>8.1f}x")

    if args.json:
        doc = [rep.as_dict() for rep in reports]
        Path(args.json).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        print(f"\nwrote {args.json}")


if __name__ == "__main__":
    main()
