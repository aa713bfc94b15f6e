"""Headless self-play: invariant soak testing and game-length statistics.

Games are driven through the real session/engine stack with a uniform-random
policy: every legal marker choice is equally likely and answers are correct
with a configurable probability. Game `i` of a batch is seeded `seed + i`,
so splitting a batch across workers cannot change any result.
"""

from __future__ import annotations

import gc
import statistics
from dataclasses import dataclass
from multiprocessing import Pool

from .bank import QuestionBank, QuestionRecord, Topic
from .boards import GameKind, SpeedMode
from .engine import (
    Answered,
    Captured,
    DiceRolled,
    MarkerMoved,
    TurnPhase,
    TurnSkipped,
    check_invariants,
    check_scalar_invariants,
)
from .rng import SplitMix64
from .session import DiceThrow, Session, SessionConfig

TURN_CAP = 100_000          # liveness guard: a game this long is a hang, not a game
POLICY_SALT = 0x5EEDF00D    # keeps policy draws off the game's own stream

DRILL_TOPIC = "drill"


def drill_bank(questions: int = 8, options: int = 4) -> QuestionBank:
    """Tiny built-in bank so simulations need no external file."""
    records = tuple(
        QuestionRecord(
            question_id=f"{DRILL_TOPIC}-{i:03d}",
            topic_id=DRILL_TOPIC,
            language="en",
            prompt=f"Drill question {i}",
            image_ref=None,
            options=tuple(chr(ord("A") + k) for k in range(options)),
            correct_index=(i - 1) % options,
        )
        for i in range(1, questions + 1)
    )
    return QuestionBank(1, {"en": (Topic(DRILL_TOPIC, "Drill", records),)})


@dataclass(frozen=True, slots=True)
class GameResult:
    turns: int
    winner: int          # -1 when the game hit the turn cap
    first_mover: int
    violations: tuple[str, ...]


def play_game(
    kind: GameKind,
    mode: SpeedMode,
    team_count: int,
    seed: int,
    p_correct: float,
    bank: QuestionBank | None = None,
    check_each_turn: bool = True,
    turn_cap: int = TURN_CAP,
) -> GameResult:
    """One full random-policy game; returns its outcome and any violations."""
    bank = bank if bank is not None else _DRILL_BANK
    config = SessionConfig(
        kind=kind,
        mode=mode,
        team_count=team_count,
        team_names=tuple(f"Seat {i}" for i in range(team_count)),
        per_team_topics=tuple(frozenset({DRILL_TOPIC}) for _ in range(team_count)),
        dice_throw=DiceThrow.MANUAL,
        seed=seed,
    )
    session = Session(config, bank)
    session.start()
    state = session.state
    state.record_events = False
    policy = SplitMix64(seed ^ POLICY_SALT)
    first_mover = state.active_team
    violations: list[str] = []
    answered_ok = False

    AWAIT_ROLL = TurnPhase.AWAIT_ROLL
    AWAIT_ANSWER = TurnPhase.AWAIT_ANSWER
    GAME_OVER = TurnPhase.GAME_OVER

    while state.phase is not GAME_OVER:
        if state.turn_counter > turn_cap:
            violations.append(f"no_finish: still running after {turn_cap} team-turns")
            return GameResult(state.turn_counter, -1, first_mover, tuple(violations))
        phase = state.phase
        if phase is AWAIT_ROLL:
            events = session.command_roll()
        elif phase is AWAIT_ANSWER:
            question = session.current_question
            if policy.random() < p_correct:
                choice = question.correct_index
            else:
                choice = policy.randrange(len(question.options) - 1)
                if choice >= question.correct_index:
                    choice += 1
            events = session.command_answer(state.active_team, choice)
        else:
            chosen = policy.choice(state.pending_candidates)
            events = session.command_choose_marker(chosen.marker_id)

        # gating: a marker may only move after this turn's correct answer
        board_changed = False
        for event in events:
            cls = type(event)
            if cls is DiceRolled:
                answered_ok = False
            elif cls is Answered:
                answered_ok = event.correct
            elif cls is MarkerMoved:
                board_changed = True
                if not answered_ok:
                    violations.append("gating: marker moved without a correct answer")
            elif cls is Captured or cls is TurnSkipped:
                board_changed = True
        if check_each_turn:
            # positions and holds only change with the events above; commands
            # that leave the board alone still get the phase-level checks
            if board_changed:
                violations.extend(check_invariants(state))
            else:
                violations.extend(check_scalar_invariants(state))
            if violations:
                return GameResult(state.turn_counter, -1, first_mover, tuple(violations))

    return GameResult(state.turn_counter, state.winner, first_mover, tuple(violations))


_DRILL_BANK = drill_bank()


@dataclass(frozen=True)
class BatchReport:
    game: str
    mode: str
    teams: int
    games: int
    seed: int
    p_correct: float
    turns: tuple[int, ...]
    wins_by_seat: tuple[int, ...]
    first_mover_wins: int
    violations: int
    unfinished: int

    @property
    def mean_turns(self) -> float:
        return statistics.fmean(self.turns)

    @property
    def std_turns(self) -> float:
        return statistics.pstdev(self.turns)

    def as_dict(self) -> dict:
        return {
            "game": self.game,
            "mode": self.mode,
            "teams": self.teams,
            "games": self.games,
            "seed": self.seed,
            "p_correct": self.p_correct,
            "mean_turns": round(self.mean_turns, 4),
            "std_turns": round(self.std_turns, 4),
            "min_turns": min(self.turns),
            "max_turns": max(self.turns),
            "wins_by_seat": list(self.wins_by_seat),
            "first_mover_win_rate": round(self.first_mover_wins / self.games, 4),
            "violations": self.violations,
            "unfinished": self.unfinished,
        }


def _play_indexed(args: tuple) -> GameResult:
    kind, mode, teams, seed, p_correct, check = args
    return play_game(GameKind(kind), SpeedMode(mode), teams, seed, p_correct,
                     check_each_turn=check)


def run_batch(
    kind: GameKind,
    mode: SpeedMode,
    games: int,
    team_count: int = 2,
    seed: int = 0,
    p_correct: float = 0.85,
    check_each_turn: bool = True,
    workers: int = 1,
) -> BatchReport:
    """Play `games` seeded games; sharding over workers never changes results."""
    jobs = [
        (kind.value, mode.value, team_count, seed + i, p_correct, check_each_turn)
        for i in range(games)
    ]
    if workers > 1:
        with Pool(workers, initializer=gc.disable) as pool:
            results = pool.map(_play_indexed, jobs, chunksize=max(1, games // (workers * 8)))
    else:
        was_enabled = gc.isenabled()
        gc.disable()  # the play loop allocates acyclic events only
        try:
            results = [_play_indexed(job) for job in jobs]
        finally:
            if was_enabled:
                gc.enable()

    wins = [0] * team_count
    first_mover_wins = 0
    violations = 0
    unfinished = 0
    for r in results:
        violations += len(r.violations)
        if r.winner < 0:
            unfinished += 1
            continue
        wins[r.winner] += 1
        if r.winner == r.first_mover:
            first_mover_wins += 1
    return BatchReport(
        game=kind.value,
        mode=mode.value,
        teams=team_count,
        games=games,
        seed=seed,
        p_correct=p_correct,
        turns=tuple(r.turns for r in results),
        wins_by_seat=tuple(wins),
        first_mover_wins=first_mover_wins,
        violations=violations,
        unfinished=unfinished,
    )


def render_table(reports: list[BatchReport]) -> str:
    header = (f"{'game':<11}{'mode':<9}{'teams':>5}{'games':>7}"
              f"{'mean':>9}{'std':>8}{'min':>6}{'max':>7}{'viol':>6}  wins by seat")
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(
            f"{r.game:<11}{r.mode:<9}{r.teams:>5}{r.games:>7}"
            f"{r.mean_turns:>9.1f}{r.std_turns:>8.1f}{min(r.turns):>6}{max(r.turns):>7}"
            f"{r.violations:>6}  {list(r.wins_by_seat)}"
        )
    return "\n".join(lines)
