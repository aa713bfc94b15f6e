"""Protocol service: dispatch, sequencing, anti-leak, snapshot replay."""

import json
from pathlib import Path

import jsonschema
import pytest

from quizboard.bank import parse_question_csv
from quizboard.protocol import EVENT_SCHEMA, GameService
from quizboard.rng import SplitMix64
from replay_oracle import FoldView

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="module")
def bank():
    parsed, errors = parse_question_csv((DATA / "questions.csv").read_bytes())
    assert errors == []
    return parsed


def send(service, conn, **cmd):
    """One command in, the sender-visible decoded events out."""
    out = service.handle_line(conn, json.dumps(cmd))
    return [json.loads(text) for target, text in out if target == conn]


CREATE = dict(
    cmd="create_session",
    game="goose",
    mode="classic",
    teams=[{"name": "Red", "topics": ["food"]},
           {"name": "Blue", "topics": ["sport", "animals"]}],
    language="en",
    dice="manual",
    seed=42,
)


def drive_full_game(service, conn, create_cmd, policy_seed=5, max_steps=5000):
    """Play one session to the end; returns every event the conn received."""
    policy = SplitMix64(policy_seed)
    received = send(service, conn, **create_cmd)
    sid = received[0]["session"]
    received += send(service, conn, cmd="start", session=sid)
    for _ in range(max_steps):
        last_state = _folded_state(received)
        phase = last_state["phase"]
        if phase == "game_over":
            break
        if phase == "await_roll":
            received += send(service, conn, cmd="roll", session=sid)
        elif phase == "await_answer":
            question = next(e for e in reversed(received) if e["event"] == "question")
            record = service.bank.question(create_cmd["language"], question["id"])
            if policy.random() < 0.8:
                choice = record.correct_index
            else:
                choice = (record.correct_index + 1) % len(record.options)
            received += send(service, conn, cmd="answer", session=sid, option=choice)
        else:  # await_move_choice: pick among the candidates the state event gave
            state = next(e for e in reversed(received) if e["event"] == "state")
            candidates = state["snapshot"]["phase"]["candidates"]
            marker = policy.choice(candidates)["marker"]
            received += send(service, conn, cmd="choose_marker", session=sid,
                             marker=marker)
    else:
        raise AssertionError("game did not finish")
    received += send(service, conn, cmd="get_state", session=sid)
    return received


def _folded_state(received):
    """Minimal phase tracker for the test driver."""
    phase = "await_roll"
    for e in received:
        name = e["event"]
        if name == "dice" and e["locked"]:
            phase = "await_answer"
        elif name == "answered":
            phase = "await_roll"
        elif name == "state" and e["snapshot"]["phase"]["name"] == "await_move_choice":
            phase = "await_move_choice"
        elif name in ("turn", "turn_passed", "moved"):
            phase = "await_roll"
        elif name == "game_over":
            phase = "game_over"
    return {"phase": phase}


class TestDispatch:
    def test_create_session_returns_snapshot(self, bank):
        service = GameService(bank)
        (created,) = send(service, "c1", **CREATE)
        assert created["event"] == "session_created"
        assert created["seq"] == 1
        snap = created["snapshot"]
        assert snap["game"] == "goose"
        assert [t["name"] for t in snap["teams"]] == ["Red", "Blue"]
        assert snap["started"] is False

    def test_start_emits_turn(self, bank):
        service = GameService(bank)
        (created,) = send(service, "c1", **CREATE)
        events = send(service, "c1", cmd="start", session=created["session"])
        assert events[0]["event"] == "turn"
        assert events[0]["team"] == created["snapshot"]["active_team"]

    def test_malformed_json_keeps_connection_alive(self, bank):
        service = GameService(bank)
        (err,) = send(service, "c1", )  # {"cmd": missing}
        assert err["event"] == "error"
        out = service.handle_line("c1", "{nonsense")
        assert json.loads(out[0][1])["code"] == "bad_message"
        assert send(service, "c1", **CREATE)[0]["event"] == "session_created"

    def test_unknown_session(self, bank):
        service = GameService(bank)
        (err,) = send(service, "c1", cmd="roll", session="s99")
        assert err["event"] == "error" and err["code"] == "no_such_session"

    def test_unknown_command(self, bank):
        service = GameService(bank)
        (err,) = send(service, "c1", cmd="frobnicate")
        assert err["code"] == "bad_command"

    def test_list_topics_reflects_the_bank(self, bank):
        service = GameService(bank)
        (topics,) = send(service, "c1", cmd="list_topics")
        en = {t["id"]: t["count"] for t in topics["languages"]["en"]["topics"]}
        assert en["food"] == 5
        assert set(topics["languages"]) == {"en", "es"}

    def test_wrong_team_answer_is_an_error_event(self, bank):
        service = GameService(bank)
        (created,) = send(service, "c1", **CREATE)
        sid = created["session"]
        send(service, "c1", cmd="start", session=sid)
        send(service, "c1", cmd="roll", session=sid)
        active = created["snapshot"]["active_team"]
        events = send(service, "c1", cmd="answer", session=sid, option=0,
                      team=1 - active)
        assert events == [{"event": "error", "code": "not_your_turn",
                           "msg": events[0]["msg"]}]

    def test_commands_before_start_rejected(self, bank):
        service = GameService(bank)
        (created,) = send(service, "c1", **CREATE)
        (err,) = send(service, "c1", cmd="roll", session=created["session"])
        assert err["code"] == "not_started"

    def test_double_start_rejected(self, bank):
        service = GameService(bank)
        (created,) = send(service, "c1", **CREATE)
        send(service, "c1", cmd="start", session=created["session"])
        (err,) = send(service, "c1", cmd="start", session=created["session"])
        assert err["code"] == "already_started"

    def test_invalid_config_error(self, bank):
        service = GameService(bank)
        bad = dict(CREATE, teams=[{"name": "Solo", "topics": ["food"]}])
        (err,) = send(service, "c1", **bad)
        assert err["code"] == "invalid_config"
        bad = dict(CREATE, teams=[{"name": "A", "topics": ["nope"]},
                                  {"name": "B", "topics": ["food"]}])
        (err,) = send(service, "c1", **bad)
        assert err["code"] == "unknown_topic"

    def test_second_connection_receives_broadcasts(self, bank):
        service = GameService(bank)
        (created,) = send(service, "c1", **CREATE)
        sid = created["session"]
        send(service, "c2", cmd="get_state", session=sid)  # attaches c2
        out = service.handle_line("c1", json.dumps({"cmd": "start", "session": sid}))
        targets = {target for target, _ in out}
        assert targets == {"c1", "c2"}


class TestSequencing:
    def test_seq_is_gapless_per_session(self, bank):
        service = GameService(bank)
        events = drive_full_game(service, "c1", CREATE)
        seqs = [e["seq"] for e in events if "seq" in e]
        assert seqs == list(range(1, len(seqs) + 1))

    def test_transcript_determinism(self, bank):
        def transcript():
            service = GameService(bank)
            events = drive_full_game(service, "c1", CREATE, policy_seed=9)
            return json.dumps(events)

        assert transcript() == transcript()


class TestSnapshotReplay:
    @pytest.mark.parametrize("create_cmd", [
        CREATE,
        dict(CREATE, game="parcheesi", mode="fast", seed=7),
        dict(CREATE, game="motorsport", mode="classic", dice="auto", seed=3),
        dict(CREATE, game="parcheesi", mode="classic", seed=1,
             teams=[{"name": "A", "topics": ["food"]},
                    {"name": "B", "topics": ["food"]},
                    {"name": "C", "topics": ["animals-kids"]}]),
    ], ids=["goose", "parcheesi-fast", "motorsport-auto", "parcheesi-3team"])
    def test_snapshots_equal_event_replay(self, bank, create_cmd):
        service = GameService(bank)
        events = drive_full_game(service, "c1", create_cmd)
        assert events[0]["event"] == "session_created"
        fold = FoldView(events[0]["snapshot"])
        fold.apply(events[1:])
        final_state = [e for e in events if e["event"] == "state"][-1]
        fold.assert_matches(final_state["snapshot"])

    def test_interleaved_get_state_matches_fold(self, bank):
        service = GameService(bank)
        received = send(service, "c1", **CREATE)
        sid = received[0]["session"]
        received += send(service, "c1", cmd="start", session=sid)
        policy = SplitMix64(21)
        for _ in range(60):
            state = _folded_state(received)["phase"]
            if state == "game_over":
                break
            if state == "await_roll":
                received += send(service, "c1", cmd="roll", session=sid)
            else:
                question = next(e for e in reversed(received)
                                if e["event"] == "question")
                record = service.bank.question("en", question["id"])
                choice = (record.correct_index if policy.random() < 0.7
                          else (record.correct_index + 1) % len(record.options))
                received += send(service, "c1", cmd="answer", session=sid,
                                 option=choice)
            received += send(service, "c1", cmd="get_state", session=sid)
        fold = FoldView(received[0]["snapshot"])
        fold.apply(received[1:])  # asserts at every embedded state event


class TestAntiLeak:
    def test_question_events_never_carry_the_answer(self, bank):
        service = GameService(bank)
        events = drive_full_game(service, "c1", CREATE)
        questions = [e for e in events if e["event"] == "question"]
        assert questions
        for q in questions:
            assert "correct" not in q
            assert "correct_index" not in q
        for e in events:
            if e["event"] in ("state", "session_created"):
                pending = e["snapshot"].get("pending_question")
                if pending:
                    assert "correct" not in pending

    def test_raw_stream_scan(self, bank):
        service = GameService(bank)
        out = []
        conn = "c1"
        out.extend(service.handle_line(conn, json.dumps(CREATE)))
        sid = json.loads(out[0][1])["session"]
        out.extend(service.handle_line(conn, json.dumps({"cmd": "start", "session": sid})))
        out.extend(service.handle_line(conn, json.dumps({"cmd": "roll", "session": sid})))
        for _, line in out:
            event = json.loads(line)
            if event["event"] == "question":
                assert '"correct"' not in line

    def test_fuzzed_lines_never_crash(self, bank):
        service = GameService(bank)
        rng = SplitMix64(404)
        fragments = [
            '{"cmd": "roll"}', '{"cmd": "roll", "session": 3}',
            '{"cmd": "answer", "option": "x", "session": "s1"}',
            '{"cmd": "create_session"}', '[1,2]', '"roll"', "", "   ",
            '{"cmd": null}', '{"cmd": "choose_marker", "session": "s1"}',
            "\x00\xff binary junk", '{"cmd": "start"}',
            '{"cmd": "create_session", "game": "chess", "teams": []}',
        ]
        send(service, "c1", **CREATE)
        for i in range(2000):
            if rng.random() < 0.5:
                line = fragments[rng.randrange(len(fragments))]
            else:
                line = "".join(
                    chr(32 + rng.randrange(94)) for _ in range(rng.randrange(40)))
            out = service.handle_line("c1", line)
            for _, text in out:
                json.loads(text)  # everything emitted is valid JSON


class TestSchema:
    def test_all_emitted_events_validate(self, bank):
        validator = jsonschema.Draft202012Validator(EVENT_SCHEMA)
        service = GameService(bank)
        events = drive_full_game(
            service, "c1", dict(CREATE, game="parcheesi", mode="fast", seed=13))
        assert len(events) > 50
        for event in events:
            validator.validate(event)

    def test_error_and_topics_validate(self, bank):
        validator = jsonschema.Draft202012Validator(EVENT_SCHEMA)
        service = GameService(bank)
        (topics,) = send(service, "c1", cmd="list_topics")
        validator.validate(topics)
        (err,) = send(service, "c1", cmd="nope")
        validator.validate(err)
