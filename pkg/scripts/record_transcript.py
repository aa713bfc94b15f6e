#!/usr/bin/env python3
"""Record one seeded game as a wire transcript (commands, events, snapshot).

The output JSON is what any client on the protocol would have received;
the browser client's replay tests feed on it.

Usage: python scripts/record_transcript.py --game goose --seed 12 -o out.json
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from quizboard.bank import parse_question_csv
from quizboard.protocol import GameService
from quizboard.rng import SplitMix64

DATA = Path(__file__).resolve().parent.parent / "data"


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--game", default="goose")
    parser.add_argument("--mode", default="classic")
    parser.add_argument("--teams", type=int, default=2)
    parser.add_argument("--seed", type=int, default=12)
    parser.add_argument("--p-correct", type=float, default=0.8)
    parser.add_argument("-o", "--output", required=True)
    args = parser.parse_args()

    bank, errors = parse_question_csv((DATA / "questions.csv").read_bytes())
    assert not errors
    service = GameService(bank)
    policy = SplitMix64(args.seed * 7 + 1)
    commands: list[dict] = []
    events: list[dict] = []

    def send(**cmd):
        commands.append(cmd)
        for _, text in service.handle_line("rec", json.dumps(cmd)):
            events.append(json.loads(text))

    topic_cycle = [["food"], ["sport", "animals"], ["animals-kids"],
                   ["symbols-in-everyday-live"]]
    send(cmd="create_session", game=args.game, mode=args.mode,
         language="en", dice="manual", seed=args.seed,
         teams=[{"name": f"Team {i + 1}", "topics": topic_cycle[i % 4]}
                for i in range(args.teams)])
    sid = events[0]["session"]
    send(cmd="start", session=sid)

    phase = "await_roll"
    for _ in range(20_000):
        if phase == "game_over":
            break
        if phase == "await_roll":
            send(cmd="roll", session=sid)
        elif phase == "await_answer":
            q = next(e for e in reversed(events) if e["event"] == "question")
            record = service.bank.question("en", q["id"])
            correct = policy.random() < args.p_correct
            option = record.correct_index if correct else \
                (record.correct_index + 1) % len(record.options)
            send(cmd="answer", session=sid, option=option)
        else:
            state = next(e for e in reversed(events) if e["event"] == "state")
            marker = policy.choice(state["snapshot"]["phase"]["candidates"])["marker"]
            send(cmd="choose_marker", session=sid, marker=marker)
        phase = "await_roll"
        for e in events:
            name = e["event"]
            if name == "dice" and e["locked"]:
                phase = "await_answer"
            elif name in ("turn", "turn_passed", "moved", "answered"):
                phase = "await_roll"
            elif name == "state" and e["snapshot"]["phase"]["name"] == "await_move_choice":
                phase = "await_move_choice"
            elif name == "game_over":
                phase = "game_over"
    else:
        raise SystemExit("game did not finish")

    send(cmd="get_state", session=sid)
    final_snapshot = events[-1]["snapshot"]
    doc = {
        "commands": commands,
        "events": events,
        "final_snapshot": final_snapshot,
    }
    Path(args.output).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    print(f"wrote {args.output}: {len(commands)} commands, {len(events)} events, "
          f"winner seat {final_snapshot['winner']}")


if __name__ == "__main__":
    main()
