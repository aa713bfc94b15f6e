"""Wire protocol: newline-delimited JSON commands in, events out.

Commands are objects ``{"cmd": <name>, ...args, "session": <id>}``; events
are objects ``{"event": <name>, "session": <id>, "seq": <n>, ...payload}``.
Sequence numbers increase by one per session with no gaps, so a client can
fold events over the snapshot carried by ``session_created`` and always
agree with a later ``get_state``. Events never carry timestamps, which
keeps transcripts byte-comparable across runs.

Commands
    create_session {game, mode, teams: [{name, topics}], language, dice, seed?}
    start | roll | answer {option, team?} | choose_marker {marker} | get_state
        (each with "session")
    list_topics

Events
    session_created {session, seq, snapshot}
    state {snapshot}
    dice {value, locked}
    question {id, prompt, image, options}        -- never the correct index
    answered {team, correct}
    moved {team, marker, path, effects}
    captured {team, marker}
    turn {team}
    turn_skipped {team, reason} | turn_passed {team, reason}
    game_over {winner}
    topics {languages}                            -- reply to list_topics, no seq
    error {code, msg}                             -- sender only, no seq

Positions on the wire are strings: ``track:<i>`` (route coordinate), and for
parcheesi additionally ``nest``, ``col:<j>`` (home column) and ``home``.

Answer adjudication is strictly server-side: ``question`` events and
snapshots carry the options but never the correct index, so a client cannot
leak what it never received.
"""

from __future__ import annotations

import json
from typing import Any

from . import engine
from .bank import ChoiceOutOfRange, EmptyPool, QuestionBank
from .bank import UnknownTopic as BankUnknownTopic
from .boards import NEST, PARCHEESI_HOME, PARCHEESI_RING_STEPS, GameKind, SpeedMode
from .engine import (
    Answered,
    Captured,
    DiceRolled,
    GameOver,
    MarkerMoved,
    QuestionPosed,
    TurnPassed,
    TurnPhase,
    TurnSkipped,
)
from .rng import SplitMix64
from .session import (
    AutoModeRoll,
    DiceThrow,
    InvalidConfig,
    NotStarted,
    NotYourTurn,
    Session,
    SessionConfig,
    UnknownTopic,
)


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def position_wire(kind: GameKind, coord: int) -> str:
    if kind is GameKind.PARCHEESI:
        if coord == NEST:
            return "nest"
        if coord == PARCHEESI_HOME:
            return "home"
        if coord >= PARCHEESI_RING_STEPS:
            return f"col:{coord - PARCHEESI_RING_STEPS}"
    return f"track:{coord}"


def event_to_wire(event, kind: GameKind, locked: bool = False,
                  question=None) -> dict[str, Any]:
    """Engine event -> wire payload (no session/seq; the service adds those)."""
    if isinstance(event, DiceRolled):
        return {"event": "dice", "value": event.value, "locked": locked}
    if isinstance(event, QuestionPosed):
        payload = {"event": "question", "id": event.question_id, "team": event.team}
        if question is not None:
            payload["prompt"] = question.prompt
            payload["image"] = question.image_ref
            payload["options"] = list(question.options)
        return payload
    if isinstance(event, Answered):
        return {"event": "answered", "team": event.team, "correct": event.correct}
    if isinstance(event, MarkerMoved):
        return {
            "event": "moved",
            "team": event.team,
            "marker": event.marker_id,
            "path": [position_wire(kind, p) for p in event.path],
            "effects": list(event.effects),
        }
    if isinstance(event, Captured):
        return {"event": "captured", "team": event.victim_team, "marker": event.marker_id}
    if isinstance(event, TurnSkipped):
        return {"event": "turn_skipped", "team": event.team, "reason": event.reason}
    if isinstance(event, TurnPassed):
        return {"event": "turn_passed", "team": event.team, "reason": event.reason}
    if isinstance(event, GameOver):
        return {"event": "game_over", "winner": event.winner}
    raise TypeError(f"unknown event {event!r}")


def candidate_wire(kind: GameKind, cand) -> dict[str, Any]:
    return {
        "marker": cand.marker_id,
        "path": [position_wire(kind, p) for p in cand.path],
        "effects": list(cand.effects),
    }


def snapshot(session: Session) -> dict[str, Any]:
    """Full client-facing state: everything but the generator internals."""
    state = session.state
    kind = state.kind
    phase: dict[str, Any] = {"name": state.phase.value}
    if state.phase is TurnPhase.AWAIT_ROLL:
        phase["team"] = state.active_team
    elif state.phase is TurnPhase.AWAIT_ANSWER:
        phase["team"] = state.active_team
        phase["value"] = state.dice.last_value
        q = session.current_question
        phase["question_id"] = q.question_id if q else None
    elif state.phase is TurnPhase.AWAIT_MOVE_CHOICE:
        phase["team"] = state.active_team
        phase["value"] = state.dice.last_value
        phase["candidates"] = [
            candidate_wire(kind, c) for c in state.pending_candidates
        ]
    else:
        phase["winner"] = state.winner

    pending = None
    if session.current_question is not None:
        q = session.current_question
        pending = {
            "id": q.question_id,
            "prompt": q.prompt,
            "image": q.image_ref,
            "options": list(q.options),
        }

    return {
        "game": kind.value,
        "mode": state.mode.value,
        "started": session.started,
        "teams": [
            {
                "index": t.index,
                "name": session.config.team_names[t.index],
                "topics": list(t.topics),
                "markers": [
                    {
                        "id": m.marker_id,
                        "position": position_wire(kind, m.position),
                        "hold": m.hold_turns_remaining,
                    }
                    for m in t.markers
                ],
            }
            for t in state.teams
        ],
        "active_team": state.active_team,
        "dice": {"value": state.dice.last_value, "locked": state.dice.locked},
        "phase": phase,
        "statuses": [s.value for s in session.team_statuses()],
        "turns": state.turn_counter,
        "winner": state.winner,
        "pending_question": pending,
    }


_ERROR_CODES: list[tuple[type, str]] = [
    (engine.WrongPhase, "wrong_phase"),
    (engine.IllegalMove, "illegal_move"),
    (engine.InvalidTeamCount, "invalid_config"),
    (NotYourTurn, "not_your_turn"),
    (AutoModeRoll, "auto_mode_roll"),
    (NotStarted, "not_started"),
    (ChoiceOutOfRange, "choice_out_of_range"),
    (InvalidConfig, "invalid_config"),
    (UnknownTopic, "unknown_topic"),
    (BankUnknownTopic, "unknown_topic"),
    (EmptyPool, "empty_pool"),
]


class ProtocolError(Exception):
    def __init__(self, code: str, msg: str) -> None:
        super().__init__(msg)
        self.code = code
        self.msg = msg


OutMessage = tuple[Any, str]  # (connection id, one JSON line)


class GameService:
    """Transport-independent protocol core.

    `handle_line` consumes one command line and returns the lines to write,
    each addressed to a connection id. Session events are broadcast to every
    connection attached to the session, in attachment order; errors go only
    to the sender. The core is synchronous: the hosting transport serializes
    calls, which is what makes per-session event order total.
    """

    def __init__(self, bank: QuestionBank, base_seed: int = 0) -> None:
        self.bank = bank
        self.sessions: dict[str, Session] = {}
        self._seq: dict[str, int] = {}
        self._attached: dict[str, list[Any]] = {}
        self._counter = 0
        self._seed_rng = SplitMix64(base_seed)

    # -- connection lifecycle ------------------------------------------------

    def disconnect(self, conn: Any) -> None:
        for watchers in self._attached.values():
            if conn in watchers:
                watchers.remove(conn)

    # -- command entry ---------------------------------------------------------

    def handle_line(self, conn: Any, line: str) -> list[OutMessage]:
        try:
            return self._dispatch(conn, line)
        except ProtocolError as exc:
            return [self._error(conn, exc.code, exc.msg)]
        except Exception as exc:  # fuzz backstop: the service never crashes
            return [self._error(conn, "internal_error", f"{type(exc).__name__}: {exc}")]

    def _dispatch(self, conn: Any, line: str) -> list[OutMessage]:
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError("bad_message", f"not valid JSON: {exc.msg}") from exc
        if not isinstance(msg, dict) or not isinstance(msg.get("cmd"), str):
            raise ProtocolError("bad_message", "a command object needs a 'cmd' name")
        cmd = msg["cmd"]
        if cmd == "create_session":
            return self._cmd_create(conn, msg)
        if cmd == "list_topics":
            return self._cmd_list_topics(conn)
        if cmd in ("start", "roll", "answer", "choose_marker", "get_state"):
            session_id = msg.get("session")
            session = self.sessions.get(session_id)
            if session is None:
                raise ProtocolError("no_such_session", f"unknown session {session_id!r}")
            watchers = self._attached[session_id]
            if conn not in watchers:
                watchers.append(conn)
            return getattr(self, f"_cmd_{cmd}")(conn, session_id, session, msg)
        raise ProtocolError("bad_command", f"unknown command {cmd!r}")

    # -- commands -------------------------------------------------------------

    def _cmd_create(self, conn: Any, msg: dict) -> list[OutMessage]:
        config = self._parse_config(msg)
        try:
            session = Session(config, self.bank)
        except (InvalidConfig, UnknownTopic, engine.InvalidTeamCount) as exc:
            raise ProtocolError(self._code_for(exc), str(exc)) from exc
        self._counter += 1
        session_id = f"s{self._counter}"
        self.sessions[session_id] = session
        self._seq[session_id] = 0
        self._attached[session_id] = [conn]
        payload = {
            "event": "session_created",
            "session": session_id,
            "seq": self._next_seq(session_id),
            "snapshot": snapshot(session),
        }
        return [(conn, canonical_json(payload))]

    def _cmd_start(self, conn, session_id, session: Session, msg) -> list[OutMessage]:
        if session.started:
            raise ProtocolError("already_started", f"{session_id} already started")
        first_team = session.state.active_team
        events = session.start()
        wired = [{"event": "turn", "team": first_team}]
        wired.extend(self._wire_batch(session, events, first_team))
        return self._broadcast(session_id, wired)

    def _cmd_roll(self, conn, session_id, session: Session, msg) -> list[OutMessage]:
        return self._run(session_id, session, lambda: session.command_roll())

    def _cmd_answer(self, conn, session_id, session: Session, msg) -> list[OutMessage]:
        option = msg.get("option")
        if not isinstance(option, int) or isinstance(option, bool):
            raise ProtocolError("bad_message", "'option' must be an integer")
        team = msg.get("team", session.state.active_team)
        if not isinstance(team, int) or isinstance(team, bool):
            raise ProtocolError("bad_message", "'team' must be an integer")
        return self._run(session_id, session, lambda: session.command_answer(team, option))

    def _cmd_choose_marker(self, conn, session_id, session: Session, msg) -> list[OutMessage]:
        marker = msg.get("marker")
        if not isinstance(marker, int) or isinstance(marker, bool):
            raise ProtocolError("bad_message", "'marker' must be an integer")
        return self._run(session_id, session,
                         lambda: session.command_choose_marker(marker))

    def _cmd_get_state(self, conn, session_id, session: Session, msg) -> list[OutMessage]:
        return self._broadcast(session_id,
                               [{"event": "state", "snapshot": snapshot(session)}])

    def _cmd_list_topics(self, conn: Any) -> list[OutMessage]:
        payload = {
            "event": "topics",
            "languages": {
                lang: {
                    "topics": [
                        {"id": tid, "name": name, "count": count}
                        for tid, name, count in self.bank.catalog(lang)
                    ]
                }
                for lang in sorted(self.bank.languages)
            },
        }
        return [(conn, canonical_json(payload))]

    # -- helpers ---------------------------------------------------------------

    def _run(self, session_id: str, session: Session, command) -> list[OutMessage]:
        team_before = session.state.active_team
        try:
            events = command()
        except Exception as exc:
            code = self._code_for(exc)
            if code is None:
                raise
            raise ProtocolError(code, str(exc)) from exc
        return self._broadcast(session_id, self._wire_batch(session, events, team_before))

    def _wire_batch(self, session: Session, events: list, team_before: int) -> list[dict]:
        """Convert an engine event batch, interleaving derived turn/state events.

        The engine announces the teams it visits while advancing (passes and
        skips) but not who ends up on turn; a ``turn`` event is inserted as
        soon as each advance completes, i.e. before the next team acts.
        """
        kind = session.state.kind
        n = len(session.state.teams)
        wired: list[dict] = []
        pending: int | None = None  # last team visited by an unfinished advance
        for i, event in enumerate(events):
            if pending is not None and isinstance(event, (DiceRolled, QuestionPosed, Answered)):
                wired.append({"event": "turn", "team": (pending + 1) % n})
                pending = None
            if isinstance(event, DiceRolled):
                locked = i + 1 < len(events) and isinstance(events[i + 1], QuestionPosed)
                wired.append(event_to_wire(event, kind, locked=locked))
            elif isinstance(event, QuestionPosed):
                record = self.bank.question(session.config.language, event.question_id)
                wired.append(event_to_wire(event, kind, question=record))
            else:
                wired.append(event_to_wire(event, kind))
                if isinstance(event, (TurnPassed, TurnSkipped, MarkerMoved)):
                    pending = event.team
                elif isinstance(event, GameOver):
                    pending = None
        state = session.state
        if state.phase is TurnPhase.AWAIT_MOVE_CHOICE:
            wired.append({"event": "state", "snapshot": snapshot(session)})
        if pending is not None:
            wired.append({"event": "turn", "team": state.active_team})
        return wired

    def _broadcast(self, session_id: str, payloads: list[dict]) -> list[OutMessage]:
        out: list[OutMessage] = []
        watchers = self._attached[session_id]
        for payload in payloads:
            payload["session"] = session_id
            payload["seq"] = self._next_seq(session_id)
            text = canonical_json(payload)
            out.extend((conn, text) for conn in watchers)
        return out

    def _next_seq(self, session_id: str) -> int:
        self._seq[session_id] += 1
        return self._seq[session_id]

    def _error(self, conn: Any, code: str, msg: str) -> OutMessage:
        return (conn, canonical_json({"event": "error", "code": code, "msg": msg}))

    @staticmethod
    def _code_for(exc: Exception) -> str | None:
        for klass, code in _ERROR_CODES:
            if isinstance(exc, klass):
                return code
        return None

    def _parse_config(self, msg: dict) -> SessionConfig:
        game = msg.get("game")
        mode = msg.get("mode", "classic")
        teams = msg.get("teams")
        language = msg.get("language", "en")
        dice = msg.get("dice", "manual")
        seed = msg.get("seed")
        try:
            kind = GameKind(game)
            speed = SpeedMode(mode)
            throw = DiceThrow(dice)
        except ValueError as exc:
            raise ProtocolError("bad_message", str(exc)) from exc
        if not isinstance(teams, list) or not teams:
            raise ProtocolError("bad_message", "'teams' must be a non-empty list")
        names: list[str] = []
        topic_sets: list[frozenset[str]] = []
        for i, entry in enumerate(teams):
            if not isinstance(entry, dict):
                raise ProtocolError("bad_message", f"teams[{i}] must be an object")
            name = entry.get("name", f"Team {i + 1}")
            topics = entry.get("topics")
            if not isinstance(name, str):
                raise ProtocolError("bad_message", f"teams[{i}].name must be a string")
            if not isinstance(topics, list) or not all(isinstance(t, str) for t in topics):
                raise ProtocolError("bad_message", f"teams[{i}].topics must be a string list")
            names.append(name)
            topic_sets.append(frozenset(topics))
        if not isinstance(language, str):
            raise ProtocolError("bad_message", "'language' must be a string")
        if seed is None:
            seed = self._seed_rng.next_u64() >> 1
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ProtocolError("bad_message", "'seed' must be an integer")
        try:
            return SessionConfig(
                kind=kind,
                mode=speed,
                team_count=len(teams),
                team_names=tuple(names),
                per_team_topics=tuple(topic_sets),
                language=language,
                dice_throw=throw,
                seed=seed,
            )
        except InvalidConfig as exc:
            raise ProtocolError("invalid_config", str(exc)) from exc


# Published JSON Schema for every event the service emits. Kept as data so
# clients and the conformance tests share one definition.
EVENT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "oneOf": [
        {"$ref": "#/$defs/" + name}
        for name in (
            "session_created", "state", "dice", "question", "answered", "moved",
            "captured", "turn", "turn_skipped", "turn_passed", "game_over",
            "topics", "error",
        )
    ],
    "$defs": {
        "base": {
            "type": "object",
            "properties": {"session": {"type": "string"}, "seq": {"type": "integer", "minimum": 1}},
            "required": ["session", "seq"],
        },
        "position": {"type": "string", "pattern": "^(nest|home|track:[0-9]+|col:[0-9]+)$"},
        "snapshot": {
            "type": "object",
            "required": ["game", "mode", "teams", "active_team", "dice", "phase",
                         "statuses", "turns", "winner"],
            "properties": {
                "game": {"enum": ["motorsport", "goose", "parcheesi"]},
                "mode": {"enum": ["classic", "fast"]},
                "started": {"type": "boolean"},
                "teams": {"type": "array", "items": {
                    "type": "object",
                    "required": ["index", "name", "markers"],
                    "properties": {"markers": {"type": "array", "items": {
                        "type": "object",
                        "required": ["id", "position", "hold"],
                        "properties": {"position": {"$ref": "#/$defs/position"}},
                    }}},
                }},
                "active_team": {"type": "integer"},
                "dice": {"type": "object",
                         "required": ["value", "locked"],
                         "properties": {"value": {"type": ["integer", "null"]},
                                        "locked": {"type": "boolean"}}},
                "phase": {"type": "object", "required": ["name"],
                          "properties": {"name": {"enum": [
                              "await_roll", "await_answer", "await_move_choice",
                              "game_over"]}},
                          "not": {"type": "object", "required": ["correct"]}},
                "statuses": {"type": "array",
                             "items": {"enum": ["playing", "waiting", "not_playing"]},
                             "minItems": 4, "maxItems": 4},
                "turns": {"type": "integer"},
                "winner": {"type": ["integer", "null"]},
                "pending_question": {
                    "type": ["object", "null"],
                    "properties": {"id": {"type": "string"}},
                    "not": {"type": "object", "required": ["correct"]},
                },
            },
        },
        "session_created": {
            "allOf": [{"$ref": "#/$defs/base"}],
            "properties": {"event": {"const": "session_created"},
                           "snapshot": {"$ref": "#/$defs/snapshot"}},
            "required": ["event", "snapshot"],
        },
        "state": {
            "allOf": [{"$ref": "#/$defs/base"}],
            "properties": {"event": {"const": "state"},
                           "snapshot": {"$ref": "#/$defs/snapshot"}},
            "required": ["event", "snapshot"],
        },
        "dice": {
            "allOf": [{"$ref": "#/$defs/base"}],
            "properties": {"event": {"const": "dice"},
                           "value": {"type": "integer", "minimum": 1, "maximum": 9},
                           "locked": {"type": "boolean"}},
            "required": ["event", "value", "locked"],
        },
        "question": {
            "allOf": [{"$ref": "#/$defs/base"}],
            "properties": {
                "event": {"const": "question"},
                "id": {"type": "string"},
                "team": {"type": "integer"},
                "prompt": {"type": "string"},
                "image": {"type": ["string", "null"]},
                "options": {"type": "array", "items": {"type": "string"},
                            "minItems": 2, "maxItems": 4},
            },
            "required": ["event", "id", "team", "prompt", "options"],
            "not": {"anyOf": [{"required": ["correct"]}, {"required": ["correct_index"]}]},
        },
        "answered": {
            "allOf": [{"$ref": "#/$defs/base"}],
            "properties": {"event": {"const": "answered"},
                           "team": {"type": "integer"},
                           "correct": {"type": "boolean"}},
            "required": ["event", "team", "correct"],
        },
        "moved": {
            "allOf": [{"$ref": "#/$defs/base"}],
            "properties": {
                "event": {"const": "moved"},
                "team": {"type": "integer"},
                "marker": {"type": "integer"},
                "path": {"type": "array", "items": {"$ref": "#/$defs/position"},
                         "minItems": 1},
                "effects": {"type": "array", "items": {"type": "string"}},
            },
            "required": ["event", "team", "marker", "path", "effects"],
        },
        "captured": {
            "allOf": [{"$ref": "#/$defs/base"}],
            "properties": {"event": {"const": "captured"},
                           "team": {"type": "integer"}, "marker": {"type": "integer"}},
            "required": ["event", "team", "marker"],
        },
        "turn": {
            "allOf": [{"$ref": "#/$defs/base"}],
            "properties": {"event": {"const": "turn"}, "team": {"type": "integer"}},
            "required": ["event", "team"],
        },
        "turn_skipped": {
            "allOf": [{"$ref": "#/$defs/base"}],
            "properties": {"event": {"const": "turn_skipped"},
                           "team": {"type": "integer"}, "reason": {"type": "string"}},
            "required": ["event", "team", "reason"],
        },
        "turn_passed": {
            "allOf": [{"$ref": "#/$defs/base"}],
            "properties": {"event": {"const": "turn_passed"},
                           "team": {"type": "integer"}, "reason": {"type": "string"}},
            "required": ["event", "team", "reason"],
        },
        "game_over": {
            "allOf": [{"$ref": "#/$defs/base"}],
            "properties": {"event": {"const": "game_over"}, "winner": {"type": "integer"}},
            "required": ["event", "winner"],
        },
        "topics": {
            "properties": {"event": {"const": "topics"}, "languages": {"type": "object"}},
            "required": ["event", "languages"],
        },
        "error": {
            "properties": {"event": {"const": "error"},
                           "code": {"type": "string"}, "msg": {"type": "string"}},
            "required": ["event", "code", "msg"],
        },
    },
}
