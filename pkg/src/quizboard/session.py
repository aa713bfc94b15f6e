"""One live match: configuration, question gating, and the command surface.

A `Session` wraps a `GameState` together with a question bank and per-team
asked-question histories. Commands arrive strictly in order (the service
serializes them), and each returns the events it produced. The session owns
exactly the glue the engine does not: picking a question when a roll allows
movement, adjudicating the answer, and auto-rolling when the dice mode says
the engine throws for the players.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from . import engine
from .bank import (
    AskedHistory,
    QuestionBank,
    QuestionRecord,
    check_answer,
    draw_from_pool,
    question_pool,
)
from .boards import GameKind, SpeedMode
from .engine import GameState, QuestionPosed, TurnPhase


class SessionError(Exception):
    pass


class InvalidConfig(SessionError):
    pass


class UnknownTopic(SessionError):
    pass


class NotYourTurn(SessionError):
    pass


class AutoModeRoll(SessionError):
    pass


class NotStarted(SessionError):
    pass


class DiceThrow(str, Enum):
    MANUAL = "manual"
    AUTO = "auto"


class TeamStatus(str, Enum):
    PLAYING = "playing"
    WAITING = "waiting"
    NOT_PLAYING = "not_playing"


MAX_SEATS = 4


@dataclass(frozen=True)
class SessionConfig:
    kind: GameKind
    mode: SpeedMode
    team_count: int
    team_names: tuple[str, ...]
    per_team_topics: tuple[frozenset[str], ...]
    language: str = "en"
    dice_throw: DiceThrow = DiceThrow.MANUAL
    seed: int = 0

    def validate(self) -> None:
        if not 2 <= self.team_count <= MAX_SEATS:
            raise InvalidConfig(f"team_count must be 2..{MAX_SEATS}")
        if len(self.team_names) != self.team_count:
            raise InvalidConfig("one name per team required")
        if len(self.per_team_topics) != self.team_count:
            raise InvalidConfig("one topic set per team required")
        for i, topics in enumerate(self.per_team_topics):
            if not topics:
                raise InvalidConfig(f"team {i} has no topics selected")


class Session:
    """State machine for one match; construct, then `start()`."""

    def __init__(self, config: SessionConfig, bank: QuestionBank) -> None:
        config.validate()
        known = {topic_id for topic_id, _, _ in bank.catalog(config.language)}
        for i, topics in enumerate(config.per_team_topics):
            missing = set(topics) - known
            if missing:
                raise UnknownTopic(
                    f"team {i}: unknown topics {sorted(missing)} "
                    f"for language {config.language!r}")
        self.config = config
        self.bank = bank
        self.state: GameState = engine.new_game(
            config.kind, config.mode, config.team_count, config.seed)
        for team, topics in zip(self.state.teams, config.per_team_topics):
            team.topics = tuple(sorted(topics))
        self.histories = [AskedHistory() for _ in range(config.team_count)]
        self._pools = [
            question_pool(bank, config.language, topics)
            for topics in config.per_team_topics
        ]
        self.current_question: QuestionRecord | None = None
        self.started = False

    # -- lifecycle -------------------------------------------------------

    def start(self) -> list:
        """Begin play; in auto dice mode this already throws the first roll."""
        self.started = True
        if self.config.dice_throw is DiceThrow.AUTO:
            return self._auto_roll()
        return []

    # -- commands ----------------------------------------------------------

    def command_roll(self) -> list:
        if not self.started:
            raise NotStarted("session not started")
        if self.config.dice_throw is DiceThrow.AUTO:
            raise AutoModeRoll("the engine throws the dice in auto mode")
        if self.state.phase is not TurnPhase.AWAIT_ROLL:
            raise engine.WrongPhase(f"cannot roll during {self.state.phase.value}")
        return self._roll_once()

    def command_answer(self, team: int, choice: int) -> list:
        if not self.started:
            raise NotStarted("session not started")
        if self.state.phase is not TurnPhase.AWAIT_ANSWER:
            raise engine.WrongPhase(f"no question pending during {self.state.phase.value}")
        if team != self.state.active_team:
            raise NotYourTurn(f"team {team} is not playing, team {self.state.active_team} is")
        question = self.current_question
        assert question is not None
        correct = check_answer(question, choice)
        self.current_question = None
        events = engine.resolve_answer(self.state, correct)
        if self.config.dice_throw is DiceThrow.AUTO:
            events = events + self._auto_roll()
        return events

    def command_choose_marker(self, marker_id: int) -> list:
        if not self.started:
            raise NotStarted("session not started")
        if self.state.phase is not TurnPhase.AWAIT_MOVE_CHOICE:
            raise engine.WrongPhase(f"no move choice pending during {self.state.phase.value}")
        chosen = next(
            (c for c in self.state.pending_candidates if c.marker_id == marker_id), None)
        if chosen is None:
            raise engine.IllegalMove(f"marker {marker_id} is not among the candidates")
        events = engine.apply_move(self.state, chosen)
        if self.config.dice_throw is DiceThrow.AUTO:
            events = events + self._auto_roll()
        return events

    def team_statuses(self) -> list[TeamStatus]:
        """Status per seat, always MAX_SEATS long; spare seats do not play."""
        out = []
        running = self.state.winner is None
        for seat in range(MAX_SEATS):
            if seat >= self.config.team_count:
                out.append(TeamStatus.NOT_PLAYING)
            elif running and seat == self.state.active_team:
                out.append(TeamStatus.PLAYING)
            else:
                out.append(TeamStatus.WAITING)
        return out

    # -- internals ---------------------------------------------------------

    def _roll_once(self) -> list:
        _, events = engine.roll(self.state)
        if self.state.phase is TurnPhase.AWAIT_ANSWER:
            events = events + self._pose_question()
        return events

    def _auto_roll(self) -> list:
        """Keep throwing while turns pass with no legal move (engine dice mode)."""
        events: list = []
        for _ in range(10_000):
            if self.state.phase is not TurnPhase.AWAIT_ROLL:
                return events
            events.extend(self._roll_once())
        raise RuntimeError("auto roll made no progress")

    def _pose_question(self) -> list:
        team = self.state.active_team
        question = draw_from_pool(
            self._pools[team], self.histories[team], self.state.rng)
        self.current_question = question
        event = QuestionPosed(team, question.question_id)
        return self.state.log([event])


def create_session(config: SessionConfig, bank: QuestionBank) -> tuple[Session, list]:
    """Build and start a session in one step; returns it with the start events."""
    session = Session(config, bank)
    events = session.start()
    return session, events
