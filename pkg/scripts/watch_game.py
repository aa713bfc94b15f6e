#!/usr/bin/env python3
"""Play one random game and print the full event stream, move by move.

Usage: python scripts/watch_game.py [--game goose] [--mode classic] [--seed 7]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from quizboard.boards import GameKind, SpeedMode
from quizboard.engine import TurnPhase
from quizboard.rng import SplitMix64
from quizboard.selfplay import DRILL_TOPIC, drill_bank
from quizboard.session import DiceThrow, Session, SessionConfig


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--game", default="goose",
                        choices=[k.value for k in GameKind])
    parser.add_argument("--mode", default="classic",
                        choices=[m.value for m in SpeedMode])
    parser.add_argument("--teams", type=int, default=2, choices=(2, 3, 4))
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--p-correct", type=float, default=0.8)
    args = parser.parse_args()

    config = SessionConfig(
        kind=GameKind(args.game),
        mode=SpeedMode(args.mode),
        team_count=args.teams,
        team_names=tuple(f"Team {i + 1}" for i in range(args.teams)),
        per_team_topics=tuple(frozenset({DRILL_TOPIC}) for _ in range(args.teams)),
        dice_throw=DiceThrow.MANUAL,
        seed=args.seed,
    )
    session = Session(config, drill_bank())
    session.start()
    state = session.state
    policy = SplitMix64(args.seed + 1)
    print(f"{args.game} ({args.mode}), {args.teams} teams, seed {args.seed}; "
          f"team {state.active_team} starts")

    while state.phase is not TurnPhase.GAME_OVER:
        if state.phase is TurnPhase.AWAIT_ROLL:
            events = session.command_roll()
        elif state.phase is TurnPhase.AWAIT_ANSWER:
            q = session.current_question
            correct = policy.random() < args.p_correct
            choice = q.correct_index if correct else \
                (q.correct_index + 1) % len(q.options)
            events = session.command_answer(state.active_team, choice)
        else:
            chosen = policy.choice(state.pending_candidates)
            events = session.command_choose_marker(chosen.marker_id)
        for event in events:
            print(f"  [{state.turn_counter:>4}] {event}")

    print(f"team {state.winner} wins after {state.turn_counter} team-turns")


if __name__ == "__main__":
    main()
