"""Deterministic rule engine for the three games.

The engine is a plain state machine: `new_game` builds a `GameState`,
`roll` / `resolve_answer` / `apply_move` / `advance_turn` mutate it in
place and return the `GameEvent`s they produced, `legal_moves` never
mutates anything. All randomness comes from the state's own seeded
generator, so a seed plus a command sequence replays exactly.

Phases move along AwaitRoll -> AwaitAnswer -> (AwaitMoveChoice) ->
AwaitRoll/GameOver and nothing else. The dice are locked exactly while a
question is pending (phase AwaitAnswer); question selection itself lives
in the session layer, the engine only gates movement on the adjudicated
result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .boards import (
    DICE_RANGE,
    NEST,
    PARCHEESI_ENTRIES,
    PARCHEESI_ENTRY_ROLL,
    PARCHEESI_HOME,
    PARCHEESI_RING_STEPS,
    CellEffect,
    EffectKind,
    GameKind,
    RouteSpec,
    SpeedMode,
    markers_per_team,
    parcheesi_ring_cell,
    route_for,
)
from .rng import SplitMix64


class EngineError(Exception):
    """Base class for rule violations raised by engine operations."""


class InvalidTeamCount(EngineError):
    pass


class WrongPhase(EngineError):
    pass


class IllegalMove(EngineError):
    pass


class TurnPhase(str, Enum):
    AWAIT_ROLL = "await_roll"
    AWAIT_ANSWER = "await_answer"
    AWAIT_MOVE_CHOICE = "await_move_choice"
    GAME_OVER = "game_over"


# --- Events -----------------------------------------------------------------
#
# Every state change is witnessed by an event; replaying the log over the
# initial state reproduces the final state, which the protocol layer and the
# test suite rely on. Events are treated as immutable; they stay plain
# (unfrozen) dataclasses only because self-play creates millions of them and
# frozen construction costs nearly twice as much.


@dataclass(slots=True)
class DiceRolled:
    value: int


@dataclass(slots=True)
class QuestionPosed:
    team: int
    question_id: str


@dataclass(slots=True)
class Answered:
    team: int
    correct: bool


@dataclass(slots=True)
class MarkerMoved:
    team: int
    marker_id: int
    path: tuple[int, ...]       # route coordinates, one per hop
    effects: tuple[str, ...]    # CellEffect.wire() tags applied along the way


@dataclass(slots=True)
class Captured:
    victim_team: int
    marker_id: int


@dataclass(slots=True)
class TurnSkipped:
    team: int
    reason: str


@dataclass(slots=True)
class TurnPassed:
    team: int
    reason: str


@dataclass(slots=True)
class GameOver:
    winner: int


GameEvent = (
    DiceRolled
    | QuestionPosed
    | Answered
    | MarkerMoved
    | Captured
    | TurnSkipped
    | TurnPassed
    | GameOver
)


@dataclass(slots=True)
class MoveCandidate:
    """One legal move: which marker, where it comes to rest after each hop."""

    marker_id: int
    path: tuple[int, ...]
    effects: tuple[str, ...] = ()
    capture: tuple[int, int] | None = None   # (victim_team, victim_marker)
    final_hold: int = 0                      # hold acquired at the landing square


@dataclass(frozen=True, slots=True)
class MarkerState:
    """Read-only view of one marker, for serialization and tests."""

    marker_id: int
    owner: int
    position: int
    hold_turns_remaining: int


@dataclass(slots=True)
class TeamState:
    index: int
    marker_count: int
    positions: list[int]     # route coordinate per marker (NEST for parcheesi nest)
    holds: list[int]         # turns still to sit out, per marker
    topics: tuple[str, ...] = ()

    @property
    def markers(self) -> list[MarkerState]:
        return [
            MarkerState(i, self.index, self.positions[i], self.holds[i])
            for i in range(self.marker_count)
        ]


@dataclass(slots=True)
class DiceState:
    last_value: int | None = None
    locked: bool = False


@dataclass(slots=True)
class GameState:
    kind: GameKind
    mode: SpeedMode
    route: RouteSpec
    teams: list[TeamState]
    active_team: int
    phase: TurnPhase
    dice: DiceState
    rng: SplitMix64
    turn_counter: int = 1
    winner: int | None = None
    event_log: list = field(default_factory=list)
    pending_candidates: tuple[MoveCandidate, ...] = ()
    record_events: bool = True
    # parcheesi only: shared ring cell -> [(team, marker_id)], kept in sync by
    # apply_move so legal-move checks stay O(1) per cell
    ring_occupancy: dict[int, list[tuple[int, int]]] = field(default_factory=dict)

    def log(self, events: list) -> list:
        if self.record_events:
            self.event_log.extend(events)
        return events


def new_game(kind: GameKind, mode: SpeedMode, team_count: int, seed: int) -> GameState:
    """Set up a match: markers at their start, starting team drawn uniformly."""
    if not 2 <= team_count <= 4:
        raise InvalidTeamCount(f"team_count must be 2..4, got {team_count}")
    route = route_for(kind)
    per_team = markers_per_team(kind, mode)
    start = NEST if kind is GameKind.PARCHEESI else 0
    teams = [
        TeamState(index=t, marker_count=per_team,
                  positions=[start] * per_team, holds=[0] * per_team)
        for t in range(team_count)
    ]
    rng = SplitMix64(seed)
    return GameState(
        kind=kind,
        mode=mode,
        route=route,
        teams=teams,
        active_team=rng.randrange(team_count),
        phase=TurnPhase.AWAIT_ROLL,
        dice=DiceState(),
        rng=rng,
    )


def roll(state: GameState) -> tuple[int, list]:
    """Throw the die for the active team.

    If the value allows at least one move, the dice lock engages and the
    phase moves to AwaitAnswer (a question must be answered before the move
    happens). With no legal move the turn passes straight to the next team.
    """
    if state.phase is not TurnPhase.AWAIT_ROLL:
        raise WrongPhase(f"cannot roll during {state.phase.value}")
    lo, hi = DICE_RANGE[state.mode]
    value = state.rng.randint(lo, hi)
    state.dice.last_value = value
    events: list = [DiceRolled(value)]
    candidates = legal_moves(state, value)
    if candidates:
        state.pending_candidates = candidates
        state.dice.locked = True
        state.phase = TurnPhase.AWAIT_ANSWER
    else:
        events.append(TurnPassed(state.active_team, "no_legal_move"))
        events.extend(advance_turn(state))
    state.log(events)
    return value, events


def resolve_answer(state: GameState, correct: bool) -> list:
    """Unlock the dice and act on the adjudicated answer.

    Correct answers release the pending move: a single candidate is applied
    immediately, several candidates (parcheesi) hand the choice back via
    AwaitMoveChoice. A wrong answer forfeits the turn with markers unmoved.
    """
    if state.phase is not TurnPhase.AWAIT_ANSWER:
        raise WrongPhase(f"no answer expected during {state.phase.value}")
    state.dice.locked = False
    events: list = [Answered(state.active_team, correct)]
    if not correct:
        state.pending_candidates = ()
        events.append(TurnPassed(state.active_team, "wrong_answer"))
        events.extend(advance_turn(state))
    elif len(state.pending_candidates) == 1:
        events.extend(apply_move(state, state.pending_candidates[0]))
    else:
        state.phase = TurnPhase.AWAIT_MOVE_CHOICE
    state.log(events)
    return events


def legal_moves(state: GameState, value: int) -> tuple[MoveCandidate, ...]:
    """Enumerate the active team's moves for `value` without mutating state."""
    if state.kind is GameKind.PARCHEESI:
        return _parcheesi_moves(state, value)
    return _single_marker_move(state, value)


def apply_move(state: GameState, chosen: MoveCandidate) -> list:
    """Relocate the chosen marker, resolve interactions, and advance the turn."""
    if state.phase not in (TurnPhase.AWAIT_ANSWER, TurnPhase.AWAIT_MOVE_CHOICE):
        raise WrongPhase(f"no move pending during {state.phase.value}")
    if chosen not in state.pending_candidates:
        raise IllegalMove(f"marker {chosen.marker_id} may not move there")
    t = state.active_team
    team = state.teams[t]
    mid = chosen.marker_id
    final = chosen.path[-1]
    events: list = [MarkerMoved(t, mid, chosen.path, chosen.effects)]

    if state.kind is GameKind.PARCHEESI:
        occ = state.ring_occupancy
        old = team.positions[mid]
        if 0 <= old < PARCHEESI_RING_STEPS:
            _occ_remove(occ, parcheesi_ring_cell(t, old), t, mid)
        if chosen.capture is not None:
            vt, vm = chosen.capture
            victim = state.teams[vt]
            vcell = parcheesi_ring_cell(vt, victim.positions[vm])
            _occ_remove(occ, vcell, vt, vm)
            victim.positions[vm] = NEST
            events.append(Captured(vt, vm))
        team.positions[mid] = final
        if 0 <= final < PARCHEESI_RING_STEPS:
            occ.setdefault(parcheesi_ring_cell(t, final), []).append((t, mid))
        won = all(p == PARCHEESI_HOME for p in team.positions)
    else:
        team.positions[0] = final
        team.holds[0] = chosen.final_hold
        if chosen.final_hold:
            effect = state.route.special_cells.get(final)
            if effect is not None and effect.freed_by_arrival:
                for other in state.teams:
                    if other.index != t and other.positions[0] == final:
                        other.holds[0] = 0
        won = final == state.route.final_coord

    state.pending_candidates = ()
    if won:
        state.winner = t
        state.phase = TurnPhase.GAME_OVER
        state.dice.locked = False
        events.append(GameOver(t))
    else:
        events.extend(advance_turn(state))
    state.log(events)
    return events


def advance_turn(state: GameState) -> list:
    """Hand the turn to the next team, consuming hold turns along the way."""
    events: list = []
    n = len(state.teams)
    nxt = state.active_team
    while True:
        nxt = (nxt + 1) % n
        state.turn_counter += 1
        team = state.teams[nxt]
        if team.marker_count == 1 and team.holds[0] > 0:
            team.holds[0] -= 1
            effect = state.route.special_cells.get(team.positions[0])
            reason = f"held_{effect.kind.value}" if effect else "held"
            events.append(TurnSkipped(nxt, reason))
            continue
        break
    state.active_team = nxt
    state.phase = TurnPhase.AWAIT_ROLL
    return events


# --- Move generation ---------------------------------------------------------


def goose_landing(position: int, value: int, final: int = 63) -> int:
    """Landing square for one goose hop: overshoot bounces back off `final`."""
    target = position + value
    if target > final:
        return 2 * final - target
    return target


def _single_marker_move(state: GameState, value: int) -> tuple[MoveCandidate, ...]:
    pos = state.teams[state.active_team].positions[0]
    final = state.route.final_coord
    fast = state.mode is SpeedMode.FAST

    if state.kind is GameKind.MOTORSPORT:
        # the finish does not require an exact count in either mode
        return (MoveCandidate(0, (min(pos + value, final),)),)

    # goose: fast mode clamps at the finish, classic bounces back
    path: list[int] = []
    effects: list[str] = []
    hold = 0
    cur = min(pos + value, final) if fast else goose_landing(pos, value, final)
    path.append(cur)
    specials = state.route.special_cells
    for _ in range(32):  # static tables admit no cycle; bound is a safety net
        effect = specials.get(cur)
        if effect is None or cur == final:
            break
        kind = effect.kind
        if kind is EffectKind.GOOSE_ADVANCE:
            effects.append("goose")
            cur = min(cur + value, final) if fast else goose_landing(cur, value, final)
            path.append(cur)
        elif effect.target is not None:  # bridge / maze / death
            effects.append(effect.wire())
            cur = effect.target
            path.append(cur)
        else:  # inn / well / prison: movement ends here with a hold
            effects.append(effect.wire())
            hold = effect.hold_turns
            break
    else:
        raise RuntimeError("special-square chain did not terminate")
    return (MoveCandidate(0, tuple(path), tuple(effects), None, hold),)


def _parcheesi_moves(state: GameState, value: int) -> tuple[MoveCandidate, ...]:
    t = state.active_team
    team = state.teams[t]
    occ_get = state.ring_occupancy.get
    safe = state.route.safe_cells
    classic = state.mode is SpeedMode.CLASSIC
    positions = team.positions
    offset = PARCHEESI_ENTRIES[t] - 1  # ring cell = (offset + coord) % 68 + 1
    out: list[MoveCandidate] = []

    for mid in range(team.marker_count):
        pos = positions[mid]
        if pos == PARCHEESI_HOME:
            continue
        if pos == NEST:
            if value != PARCHEESI_ENTRY_ROLL:
                continue
            stack = occ_get(offset % 68 + 1)
            if stack and len(stack) >= 2:
                continue  # entry square full (entry cells are safe: no capture)
            out.append(MoveCandidate(mid, (0,)))
            continue

        target = pos + value
        if target > PARCHEESI_HOME:
            if classic:
                continue  # home needs the exact count in classic play
            target = PARCHEESI_HOME

        # blockades (two same-team markers on one square) stop passage
        blocked = False
        for c in range(pos + 1, target):
            if c < PARCHEESI_RING_STEPS:
                stack = occ_get((offset + c) % 68 + 1)
                if stack and len(stack) == 2 and stack[0][0] == stack[1][0]:
                    blocked = True
                    break
            else:  # private home column: only own markers can be here
                if positions.count(c) >= 2:
                    blocked = True
                    break
        if blocked:
            continue

        capture = None
        if target == PARCHEESI_HOME:
            pass
        elif target >= PARCHEESI_RING_STEPS:
            if positions.count(target) >= 2:
                continue  # column square already paired
        else:
            cell = (offset + target) % 68 + 1
            stack = occ_get(cell)
            if stack:
                if len(stack) >= 2:
                    continue  # no square ever holds more than two markers
                ot, om = stack[0]
                if ot != t and cell not in safe:
                    capture = (ot, om)
        out.append(MoveCandidate(mid, (target,), (), capture, 0))
    return tuple(out)


def _occ_remove(occ: dict, cell: int, team: int, mid: int) -> None:
    stack = occ[cell]
    stack.remove((team, mid))
    if not stack:
        del occ[cell]


# --- Invariant checking --------------------------------------------------------


def check_scalar_invariants(state: GameState) -> list[str]:
    """Phase-level invariants that can break without any marker moving."""
    v: list[str] = []
    if state.dice.locked != (state.phase is TurnPhase.AWAIT_ANSWER):
        v.append(f"dice lock {state.dice.locked} vs phase {state.phase.value}")
    if (state.winner is not None) != (state.phase is TurnPhase.GAME_OVER):
        v.append(f"winner {state.winner} vs phase {state.phase.value}")
    if not 0 <= state.active_team < len(state.teams):
        v.append(f"active team {state.active_team} out of range")
    return v


def check_invariants(state: GameState) -> list[str]:
    """Verify the core structural invariants; returns human-readable violations.

    Checks conservation (marker counts never change), route validity of every
    position, the dice-lock/phase equivalence, the winner/phase equivalence,
    parcheesi occupation rules, and that the maintained ring occupancy index
    matches a from-scratch recount.
    """
    v = check_scalar_invariants(state)
    final = state.route.final_coord
    parcheesi = state.kind is GameKind.PARCHEESI
    lowest = NEST if parcheesi else 0
    specials = state.route.special_cells

    recount: dict[int, object] = {}  # ring cell -> (team, mid) or [(t, m), (t, m)]
    for team in state.teams:
        positions = team.positions
        holds = team.holds
        count = team.marker_count
        if len(positions) != count or len(holds) != count:
            v.append(f"team {team.index}: marker conservation broken")
        t = team.index
        for i in range(count):
            pos = positions[i]
            if pos < lowest or pos > final:
                v.append(f"team {t} marker {i}: position {pos} off route")
            elif parcheesi:
                if pos >= PARCHEESI_RING_STEPS:
                    if pos < PARCHEESI_HOME and positions.count(pos) > 2:
                        v.append(f"team {t}: column square {pos} over-stacked")
                elif pos >= 0:
                    cell = (PARCHEESI_ENTRIES[t] - 1 + pos) % 68 + 1
                    prev = recount.get(cell)
                    if prev is None:
                        recount[cell] = (t, i)
                    elif isinstance(prev, tuple):
                        recount[cell] = [prev, (t, i)]
                    else:
                        prev.append((t, i))
            hold = holds[i]
            if hold < 0:
                v.append(f"team {t} marker {i}: negative hold")
            elif hold > 0:
                effect = specials.get(positions[i])
                if effect is None or effect.hold_turns == 0:
                    v.append(f"team {t} marker {i}: held off a hold square")

    if parcheesi:
        maintained = state.ring_occupancy
        if len(maintained) != len(recount):
            v.append("ring occupancy index out of sync with positions")
        safe = state.route.safe_cells
        for cell, entry in recount.items():
            stack = maintained.get(cell)
            if isinstance(entry, tuple):
                if stack is None or len(stack) != 1 or stack[0] != entry:
                    v.append(f"ring cell {cell}: occupancy index disagrees")
            else:
                if len(entry) > 2:
                    v.append(f"ring cell {cell}: {len(entry)} markers stacked")
                    continue
                a, b = entry
                if a[0] != b[0] and cell not in safe:
                    v.append(f"ring cell {cell}: two teams share a non-safe square")
                if stack is None or len(stack) != 2 or (
                    (stack[0] != a or stack[1] != b) and (stack[0] != b or stack[1] != a)
                ):
                    v.append(f"ring cell {cell}: occupancy index disagrees")
    return v
