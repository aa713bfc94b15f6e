"""Goose movement: bounce-back, special-square chains, holds and release."""

import pytest
from hypothesis import given, strategies as st

from quizboard.boards import GOOSE_FINAL, GOOSE_SPECIALS, GameKind, SpeedMode
from quizboard.engine import (
    GameOver,
    MarkerMoved,
    TurnPhase,
    TurnSkipped,
    advance_turn,
    apply_move,
    goose_landing,
    legal_moves,
    new_game,
    resolve_answer,
)


def bounce_oracle(position: int, value: int, final: int = GOOSE_FINAL) -> int:
    """Walk the hop one square at a time, reversing direction at the finish."""
    pos = position
    step = 1
    for _ in range(value):
        if pos == final:
            step = -1
        pos += step
    return pos


def goose_state(position: int, mode=SpeedMode.CLASSIC, teams: int = 2, seed: int = 7):
    state = new_game(GameKind.GOOSE, mode, teams, seed)
    state.teams[state.active_team].positions[0] = position
    return state


def force_roll(state, value: int):
    """Push the state into AwaitAnswer as if `value` had been rolled."""
    state.dice.last_value = value
    state.pending_candidates = legal_moves(state, value)
    assert state.pending_candidates
    state.dice.locked = True
    state.phase = TurnPhase.AWAIT_ANSWER


class TestBounce:
    def test_closed_form_matches_step_oracle_exhaustively(self):
        for pos in range(0, GOOSE_FINAL + 1):
            for value in range(1, 10):
                assert goose_landing(pos, value) == bounce_oracle(pos, value), (pos, value)

    def test_never_lands_beyond_final(self):
        for pos in range(0, GOOSE_FINAL + 1):
            for value in range(1, 10):
                assert 0 <= goose_landing(pos, value) <= GOOSE_FINAL

    def test_two_step_overshoot(self):
        # from 60 a roll of 5 comes to rest on 61
        state = goose_state(60)
        (cand,) = legal_moves(state, 5)
        assert cand.path[-1] == 61


class TestSpecialChains:
    def test_goose_chain_into_the_inn(self):
        # frozen from the step oracle over the special table: 4 +5 -> 9 (goose)
        # -> 14 (goose) -> 19 (inn, sit out 1 turn)
        state = goose_state(4)
        (cand,) = legal_moves(state, 5)
        assert cand.path == (9, 14, 19)
        assert cand.effects == ("goose", "goose", "inn:1")
        assert cand.final_hold == 1

    def test_bridge_jump(self):
        state = goose_state(1)
        (cand,) = legal_moves(state, 5)
        assert cand.path == (6, 12)
        assert cand.effects == ("bridge:12",)

    def test_maze_jump_backwards(self):
        state = goose_state(40)
        (cand,) = legal_moves(state, 2)
        assert cand.path == (42, 30)
        assert cand.effects == ("maze:30",)

    def test_death_restarts_the_trek(self):
        state = goose_state(53)
        (cand,) = legal_moves(state, 5)
        assert cand.path == (58, 1)
        assert cand.effects == ("death:1",)

    def test_bounce_onto_death(self):
        # 62 + 6 overshoots to 68, bounces back onto 58, dies back to 1
        state = goose_state(62)
        (cand,) = legal_moves(state, 6)
        assert cand.path == (58, 1)

    def test_exact_finish_wins(self):
        state = goose_state(60)
        active = state.active_team
        force_roll(state, 3)
        events = resolve_answer(state, True)
        assert any(isinstance(e, GameOver) for e in events)
        assert state.winner == active
        assert state.phase is TurnPhase.GAME_OVER

    def test_fast_mode_clamps_instead_of_bouncing(self):
        state = goose_state(60, mode=SpeedMode.FAST)
        (cand,) = legal_moves(state, 9)
        assert cand.path == (GOOSE_FINAL,)

    @given(pos=st.integers(0, 62), value=st.integers(1, 6))
    def test_classic_chain_ends_on_route(self, pos, value):
        state = goose_state(pos)
        (cand,) = legal_moves(state, value)
        assert all(0 <= p <= GOOSE_FINAL for p in cand.path)
        # movement only ends on the finish, a hold square, or a plain square
        last = cand.path[-1]
        effect = GOOSE_SPECIALS.get(last)
        assert last == GOOSE_FINAL or effect is None or effect.hold_turns > 0


class TestHolds:
    def test_inn_skips_one_turn(self):
        state = goose_state(14, teams=3)
        active = state.active_team
        force_roll(state, 5)  # 14 + 5 = 19, the inn
        resolve_answer(state, True)
        team = state.teams[active]
        assert team.positions[0] == 19
        assert team.holds[0] == 1
        # come back around: the held team is skipped exactly once
        skipped = [e for e in state.event_log if isinstance(e, TurnSkipped)]
        while not skipped:
            state.phase = TurnPhase.AWAIT_ROLL
            events = advance_turn(state)
            skipped = [e for e in events if isinstance(e, TurnSkipped)]
        assert skipped[0].team == active
        assert skipped[0].reason == "held_inn"
        assert team.holds[0] == 0

    def test_well_arrival_frees_the_holder(self):
        state = goose_state(0, teams=2, seed=11)
        holder = state.active_team
        visitor = 1 - holder
        state.teams[holder].positions[0] = 31
        state.teams[holder].holds[0] = 3
        # visitor lands on the well: holder is released immediately
        state.active_team = visitor
        state.teams[visitor].positions[0] = 28
        force_roll(state, 3)
        resolve_answer(state, True)
        assert state.teams[holder].holds[0] == 0
        assert state.teams[visitor].holds[0] == 3
        assert state.teams[visitor].positions[0] == 31

    def test_well_hold_expires_after_three_own_turns(self):
        state = goose_state(0, teams=2, seed=3)
        holder = state.active_team
        state.teams[holder].positions[0] = 31
        state.teams[holder].holds[0] = 3
        state.active_team = 1 - holder
        skips = 0
        for _ in range(6):
            state.phase = TurnPhase.AWAIT_ROLL
            events = advance_turn(state)
            skips += sum(1 for e in events if isinstance(e, TurnSkipped))
        assert skips == 3
        assert state.teams[holder].holds[0] == 0


class TestMotorsport:
    def test_overshoot_finishes(self):
        state = new_game(GameKind.MOTORSPORT, SpeedMode.CLASSIC, 2, 5)
        state.teams[state.active_team].positions[0] = 38
        (cand,) = legal_moves(state, 6)
        assert cand.path == (40,)
        force_roll(state, 6)
        events = resolve_answer(state, True)
        assert any(isinstance(e, GameOver) for e in events)

    def test_exhaustive_overshoot_lands_on_final(self):
        state = new_game(GameKind.MOTORSPORT, SpeedMode.CLASSIC, 2, 5)
        for pos in range(0, 40):
            state.teams[state.active_team].positions[0] = pos
            for value in range(1, 10):
                (cand,) = legal_moves(state, value)
                assert cand.path[-1] == min(pos + value, 40)
