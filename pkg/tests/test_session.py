"""Session orchestration: gating, phase machine soundness, statuses."""

from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from quizboard.bank import parse_question_csv
from quizboard.boards import GameKind, SpeedMode
from quizboard.engine import (
    Answered,
    DiceRolled,
    MarkerMoved,
    QuestionPosed,
    TurnPassed,
    TurnPhase,
    WrongPhase,
)
from quizboard.session import (
    AutoModeRoll,
    DiceThrow,
    InvalidConfig,
    NotYourTurn,
    Session,
    SessionConfig,
    TeamStatus,
    UnknownTopic,
    create_session,
)

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="module")
def bank():
    parsed, errors = parse_question_csv((DATA / "questions.csv").read_bytes())
    assert errors == []
    return parsed


def config(kind=GameKind.GOOSE, mode=SpeedMode.CLASSIC, teams=2,
           topics=("food",), dice=DiceThrow.MANUAL, seed=11, language="en"):
    return SessionConfig(
        kind=kind,
        mode=mode,
        team_count=teams,
        team_names=tuple(f"Team {i + 1}" for i in range(teams)),
        per_team_topics=tuple(frozenset(topics) for _ in range(teams)),
        language=language,
        dice_throw=dice,
        seed=seed,
    )


def answer(session, correct=True):
    q = session.current_question
    choice = q.correct_index if correct else (q.correct_index + 1) % len(q.options)
    return session.command_answer(session.state.active_team, choice)


class TestCreate:
    def test_manual_session_awaits_roll(self, bank):
        session, events = create_session(config(), bank)
        assert events == []
        assert session.state.phase is TurnPhase.AWAIT_ROLL
        assert session.state.active_team in (0, 1)

    def test_empty_topic_set_rejected(self, bank):
        with pytest.raises(InvalidConfig):
            SessionConfig(
                kind=GameKind.GOOSE, mode=SpeedMode.CLASSIC, team_count=2,
                team_names=("A", "B"),
                per_team_topics=(frozenset({"food"}), frozenset()),
            ).validate()

    def test_unknown_topic_rejected(self, bank):
        with pytest.raises(UnknownTopic):
            Session(config(topics=("astrophysics",)), bank)

    def test_auto_session_rolls_immediately(self, bank):
        session, events = create_session(config(dice=DiceThrow.AUTO), bank)
        assert any(isinstance(e, DiceRolled) for e in events)
        assert session.state.phase is TurnPhase.AWAIT_ANSWER

    def test_starting_team_varies_with_seed(self, bank):
        starters = {
            Session(config(seed=s), bank).state.active_team for s in range(30)
        }
        assert starters == {0, 1}

    def test_per_team_topics_differ(self, bank):
        cfg = SessionConfig(
            kind=GameKind.GOOSE, mode=SpeedMode.CLASSIC, team_count=2,
            team_names=("A", "B"),
            per_team_topics=(frozenset({"food"}), frozenset({"sport"})),
            seed=5,
        )
        session = Session(cfg, bank)
        session.start()
        for _ in range(40):
            if session.state.phase is TurnPhase.GAME_OVER:
                break
            session.command_roll()
            team = session.state.active_team
            q = session.current_question
            assert q.topic_id in cfg.per_team_topics[team]
            answer(session)


class TestRollCommand:
    def test_roll_then_question_locks_dice(self, bank):
        session, _ = create_session(config(), bank)
        events = session.command_roll()
        assert isinstance(events[0], DiceRolled)
        assert isinstance(events[1], QuestionPosed)
        assert session.state.dice.locked
        assert session.state.phase is TurnPhase.AWAIT_ANSWER

    def test_roll_during_await_answer_rejected(self, bank):
        session, _ = create_session(config(), bank)
        session.command_roll()
        with pytest.raises(WrongPhase):
            session.command_roll()

    def test_stuck_parcheesi_roll_passes_without_question(self, bank):
        session, _ = create_session(config(kind=GameKind.PARCHEESI, seed=2), bank)
        while True:
            events = session.command_roll()
            value = next(e for e in events if isinstance(e, DiceRolled)).value
            if value != 5:
                assert any(isinstance(e, TurnPassed) for e in events)
                assert not any(isinstance(e, QuestionPosed) for e in events)
                assert not session.state.dice.locked
                break
            answer(session, correct=False)

    def test_manual_roll_rejected_in_auto_mode(self, bank):
        session, _ = create_session(config(dice=DiceThrow.AUTO), bank)
        with pytest.raises(AutoModeRoll):
            session.command_roll()


class TestAnswerCommand:
    def test_correct_answer_moves_marker(self, bank):
        session, _ = create_session(config(), bank)
        session.command_roll()
        team = session.state.active_team
        events = answer(session, correct=True)
        kinds = [type(e) for e in events]
        assert kinds[0] is Answered and events[0].correct
        assert MarkerMoved in kinds
        moved = next(e for e in events if isinstance(e, MarkerMoved))
        assert moved.team == team

    def test_wrong_answer_passes_turn_without_movement(self, bank):
        session, _ = create_session(config(), bank)
        session.command_roll()
        team = session.state.active_team
        positions = [list(t.positions) for t in session.state.teams]
        events = answer(session, correct=False)
        assert isinstance(events[0], Answered) and not events[0].correct
        assert any(isinstance(e, TurnPassed) for e in events)
        assert not any(isinstance(e, MarkerMoved) for e in events)
        assert [list(t.positions) for t in session.state.teams] == positions
        assert session.state.active_team != team
        assert not session.state.dice.locked

    def test_waiting_team_cannot_answer(self, bank):
        session, _ = create_session(config(), bank)
        session.command_roll()
        waiting = 1 - session.state.active_team
        with pytest.raises(NotYourTurn):
            session.command_answer(waiting, 0)

    def test_answer_without_question_rejected(self, bank):
        session, _ = create_session(config(), bank)
        with pytest.raises(WrongPhase):
            session.command_answer(session.state.active_team, 0)


class TestChooseMarker:
    def charge_into_choice(self, bank, seed=0):
        """Play a parcheesi session until a multi-candidate answer happens."""
        session, _ = create_session(config(kind=GameKind.PARCHEESI, seed=seed), bank)
        for _ in range(4000):
            phase = session.state.phase
            if phase is TurnPhase.AWAIT_ROLL:
                session.command_roll()
            elif phase is TurnPhase.AWAIT_ANSWER:
                answer(session, correct=True)
            elif phase is TurnPhase.AWAIT_MOVE_CHOICE:
                return session
            else:
                break
        pytest.skip("no multi-candidate turn reached")

    def test_choice_phase_and_selection(self, bank):
        session = self.charge_into_choice(bank)
        assert not session.state.dice.locked
        candidates = session.state.pending_candidates
        assert len(candidates) >= 2
        chosen = candidates[-1].marker_id
        events = session.command_choose_marker(chosen)
        moved = next(e for e in events if isinstance(e, MarkerMoved))
        assert moved.marker_id == chosen

    def test_single_candidate_skips_choice_phase(self, bank):
        session, _ = create_session(config(kind=GameKind.GOOSE), bank)
        session.command_roll()
        events = answer(session, correct=True)
        assert any(isinstance(e, MarkerMoved) for e in events)
        assert session.state.phase is not TurnPhase.AWAIT_MOVE_CHOICE

    def test_bad_marker_rejected(self, bank):
        from quizboard.engine import IllegalMove

        session = self.charge_into_choice(bank)
        with pytest.raises(IllegalMove):
            session.command_choose_marker(99)


class TestStatuses:
    def test_two_team_statuses(self, bank):
        session, _ = create_session(config(), bank)
        statuses = session.team_statuses()
        assert len(statuses) == 4
        assert statuses.count(TeamStatus.PLAYING) == 1
        assert statuses.count(TeamStatus.WAITING) == 1
        assert statuses.count(TeamStatus.NOT_PLAYING) == 2
        assert statuses[2] is TeamStatus.NOT_PLAYING

    def test_playing_follows_the_turn(self, bank):
        session, _ = create_session(config(), bank)
        before = session.team_statuses().index(TeamStatus.PLAYING)
        session.command_roll()
        answer(session, correct=False)
        after = session.team_statuses().index(TeamStatus.PLAYING)
        assert after != before

    def test_no_playing_after_game_over(self, bank):
        session, _ = create_session(config(seed=8), bank)
        for _ in range(3000):
            if session.state.phase is TurnPhase.GAME_OVER:
                break
            if session.state.phase is TurnPhase.AWAIT_ROLL:
                session.command_roll()
            else:
                answer(session, correct=True)
        assert session.state.phase is TurnPhase.GAME_OVER
        assert TeamStatus.PLAYING not in session.team_statuses()


class TestGatingInvariant:
    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_moves_only_after_correct_answers(self, bank, seed):
        from quizboard.rng import SplitMix64

        session, _ = create_session(
            config(kind=GameKind.PARCHEESI, mode=SpeedMode.FAST, seed=seed), bank)
        policy = SplitMix64(seed + 1)
        answered_ok = False
        for _ in range(3000):
            phase = session.state.phase
            if phase is TurnPhase.GAME_OVER:
                break
            if phase is TurnPhase.AWAIT_ROLL:
                events = session.command_roll()
            elif phase is TurnPhase.AWAIT_ANSWER:
                events = answer(session, correct=policy.random() < 0.7)
            else:
                events = session.command_choose_marker(
                    policy.choice(session.state.pending_candidates).marker_id)
            for e in events:
                if isinstance(e, DiceRolled):
                    answered_ok = False
                elif isinstance(e, Answered) and e.correct:
                    answered_ok = True
                elif isinstance(e, MarkerMoved):
                    assert answered_ok, "a marker moved without a correct answer"

    def test_phase_machine_soundness(self, bank):
        allowed = {
            TurnPhase.AWAIT_ROLL: {TurnPhase.AWAIT_ANSWER, TurnPhase.AWAIT_ROLL},
            TurnPhase.AWAIT_ANSWER: {
                TurnPhase.AWAIT_ROLL, TurnPhase.AWAIT_MOVE_CHOICE,
                TurnPhase.GAME_OVER},
            TurnPhase.AWAIT_MOVE_CHOICE: {TurnPhase.AWAIT_ROLL, TurnPhase.GAME_OVER},
        }
        session, _ = create_session(config(kind=GameKind.PARCHEESI, seed=31), bank)
        prev = session.state.phase
        for _ in range(3000):
            if prev is TurnPhase.GAME_OVER:
                break
            if prev is TurnPhase.AWAIT_ROLL:
                session.command_roll()
            elif prev is TurnPhase.AWAIT_ANSWER:
                answer(session, correct=True)
            else:
                session.command_choose_marker(
                    session.state.pending_candidates[0].marker_id)
            cur = session.state.phase
            assert cur in allowed[prev], (prev, cur)
            prev = cur
