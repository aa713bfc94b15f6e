"""Board geometry for the three supported games.

A marker's position is a single integer, its *route coordinate*: the number
of steps travelled along the owner's own route. Coordinate 0 is the start
square and `RouteSpec.final_coord` is the finish. Parcheesi adds `NEST`
(-1, markers not yet entered), coordinates 64..70 for the team's private
home column, and 71 for home itself; the shared 68-cell ring is reached by
mapping the first 64 coordinates through the team's entry cell.

All special squares, entry cells and safe cells live in tables here so the
rules engine stays table-driven and the tests can read one source of truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class GameKind(str, Enum):
    MOTORSPORT = "motorsport"
    GOOSE = "goose"
    PARCHEESI = "parcheesi"


class SpeedMode(str, Enum):
    CLASSIC = "classic"
    FAST = "fast"


# Inclusive die bounds per mode. Fast mode trades the usual 1..6 die for a
# 4..9 die so games finish sooner.
DICE_RANGE: dict[SpeedMode, tuple[int, int]] = {
    SpeedMode.CLASSIC: (1, 6),
    SpeedMode.FAST: (4, 9),
}


class EffectKind(str, Enum):
    GOOSE_ADVANCE = "goose"    # advance again by the rolled value, chaining
    BRIDGE = "bridge"          # jump to a fixed square
    INN = "inn"                # sit out 1 turn
    WELL = "well"              # held up to 3 turns, freed early by an arrival
    MAZE = "maze"              # jump backwards to a fixed square
    PRISON = "prison"          # held up to 2 turns, freed early by an arrival
    DEATH = "death"            # back to square 1


@dataclass(frozen=True, slots=True)
class CellEffect:
    kind: EffectKind
    target: int | None = None      # jump destination (bridge / maze / death)
    hold_turns: int = 0            # turns skipped after landing here
    freed_by_arrival: bool = False  # another marker landing here releases the holder

    def wire(self) -> str:
        """Compact tag used in events: "goose", "bridge:12", "inn:1", ..."""
        if self.target is not None:
            return f"{self.kind.value}:{self.target}"
        if self.hold_turns:
            return f"{self.kind.value}:{self.hold_turns}"
        return self.kind.value


# --- Goose special squares (classic published layout) ---

GOOSE_FINAL = 63
GOOSE_GEESE = (5, 9, 14, 18, 23, 27, 32, 36, 41, 45, 50, 54, 59)

GOOSE_SPECIALS: dict[int, CellEffect] = {
    **{g: CellEffect(EffectKind.GOOSE_ADVANCE) for g in GOOSE_GEESE},
    6: CellEffect(EffectKind.BRIDGE, target=12),
    19: CellEffect(EffectKind.INN, hold_turns=1),
    31: CellEffect(EffectKind.WELL, hold_turns=3, freed_by_arrival=True),
    42: CellEffect(EffectKind.MAZE, target=30),
    52: CellEffect(EffectKind.PRISON, hold_turns=2, freed_by_arrival=True),
    58: CellEffect(EffectKind.DEATH, target=1),
}

MOTORSPORT_FINAL = 40

# --- Parcheesi geometry ---
#
# Shared ring of 68 cells numbered 1..68. Team t enters at PARCHEESI_ENTRIES[t],
# walks 64 ring cells (route coordinates 0..63), then its 7 private home-column
# cells (64..70), then home (71). Entry from the nest requires rolling exactly 5.

NEST = -1
PARCHEESI_RING_CELLS = 68
PARCHEESI_RING_STEPS = 64
PARCHEESI_HOME_COLUMN = 7
PARCHEESI_HOME = PARCHEESI_RING_STEPS + PARCHEESI_HOME_COLUMN  # coordinate 71
PARCHEESI_ENTRIES = (5, 22, 39, 56)
PARCHEESI_SAFE_CELLS = frozenset({5, 12, 17, 22, 29, 34, 39, 46, 51, 56, 63, 68})
PARCHEESI_ENTRY_ROLL = 5


def parcheesi_ring_cell(team: int, coord: int) -> int:
    """Shared ring cell (1-based) under route coordinate `coord` of `team`."""
    return (PARCHEESI_ENTRIES[team] - 1 + coord) % PARCHEESI_RING_CELLS + 1


@dataclass(frozen=True)
class RouteSpec:
    """Static geometry of one game's board."""

    kind: GameKind
    final_coord: int                              # route coordinate of the finish
    entry_cells: tuple[int, ...] = ()             # per-team shared-ring entry cells
    special_cells: dict[int, CellEffect] = field(default_factory=dict)
    safe_cells: frozenset[int] = frozenset()
    ring_cells: int = 0                           # shared ring size (parcheesi)
    home_column: int = 0                          # private column length (parcheesi)


_ROUTES: dict[GameKind, RouteSpec] = {
    GameKind.MOTORSPORT: RouteSpec(
        kind=GameKind.MOTORSPORT,
        final_coord=MOTORSPORT_FINAL,
    ),
    GameKind.GOOSE: RouteSpec(
        kind=GameKind.GOOSE,
        final_coord=GOOSE_FINAL,
        special_cells=GOOSE_SPECIALS,
    ),
    GameKind.PARCHEESI: RouteSpec(
        kind=GameKind.PARCHEESI,
        final_coord=PARCHEESI_HOME,
        entry_cells=PARCHEESI_ENTRIES,
        safe_cells=PARCHEESI_SAFE_CELLS,
        ring_cells=PARCHEESI_RING_CELLS,
        home_column=PARCHEESI_HOME_COLUMN,
    ),
}


def route_for(kind: GameKind) -> RouteSpec:
    return _ROUTES[kind]


def markers_per_team(kind: GameKind, mode: SpeedMode) -> int:
    """Parcheesi teams play 4 markers (2 in fast mode); the others play 1."""
    if kind is GameKind.PARCHEESI:
        return 2 if mode is SpeedMode.FAST else 4
    return 1
