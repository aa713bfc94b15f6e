/** Screen coordinate tables: every route coordinate of every game maps to a
 * fixed board position. The tables are data; rendering never computes rules.
 *
 * Layouts (board units, 1 unit = one cell; the renderer scales):
 *  - motorsport: a 4-row serpentine straight, 41 squares (0..40)
 *  - goose: a rectangular spiral walked inward, 64 squares (0..63)
 *  - parcheesi: the 68-cell shared ring on a circle, per-team home columns
 *    running inward, nests in the corners, home at the centre
 */

import { parsePosition, type Position } from "./protocol.js";

export interface Point {
  x: number;
  y: number;
}

export interface BoardLayout {
  width: number;
  height: number;
  cell: number;
  /** Screen point for a marker of `team` at route position `pos`. */
  place(team: number, pos: Position): Point;
  /** Every coordinate of the team's route, in order (for table tests). */
  routeCoordinates(team: number): Position[];
}

const MOTORSPORT_FINAL = 40;
const GOOSE_FINAL = 63;
const RING_CELLS = 68;
const RING_STEPS = 64;
const HOME_COLUMN = 7;
const ENTRIES = [5, 22, 39, 56];

function serpentine(count: number, perRow: number): Point[] {
  const points: Point[] = [];
  for (let i = 0; i < count; i++) {
    const row = Math.floor(i / perRow);
    const col = i % perRow;
    points.push({
      x: 1 + (row % 2 === 0 ? col : perRow - 1 - col),
      y: 1 + row * 1.6,
    });
  }
  return points;
}

function spiral(count: number, cols: number, rows: number): Point[] {
  // walk the outer border inward until `count` squares are placed
  const points: Point[] = [];
  let top = 0;
  let left = 0;
  let bottom = rows - 1;
  let right = cols - 1;
  while (points.length < count) {
    for (let x = left; x <= right && points.length < count; x++)
      points.push({ x, y: top });
    top++;
    for (let y = top; y <= bottom && points.length < count; y++)
      points.push({ x: right, y });
    right--;
    for (let x = right; x >= left && points.length < count; x--)
      points.push({ x, y: bottom });
    bottom--;
    for (let y = bottom; y >= top && points.length < count; y--)
      points.push({ x: left, y });
    left++;
  }
  return points.map((p) => ({ x: p.x + 0.5, y: p.y + 0.5 }));
}

const motorsportTrack = serpentine(MOTORSPORT_FINAL + 1, 11);
const gooseTrack = spiral(GOOSE_FINAL + 1, 10, 8);

/** Parcheesi geometry: ring cell 1..68 on a circle; columns point inward. */
const RING_CENTER: Point = { x: 8, y: 8 };
const RING_RADIUS = 6.6;
const NEST_CORNERS: Point[] = [
  { x: 1.6, y: 1.6 },
  { x: 14.4, y: 1.6 },
  { x: 14.4, y: 14.4 },
  { x: 1.6, y: 14.4 },
];

function ringPoint(cell: number, radius = RING_RADIUS): Point {
  const angle = ((cell - 1) / RING_CELLS) * 2 * Math.PI - Math.PI / 2;
  return {
    x: RING_CENTER.x + radius * Math.cos(angle),
    y: RING_CENTER.y + radius * Math.sin(angle),
  };
}

function parcheesiPlace(team: number, pos: Position): Point {
  const { place, index } = parsePosition(pos);
  const entry = ENTRIES[team] ?? 5;
  if (place === "nest") return NEST_CORNERS[team] ?? NEST_CORNERS[0]!;
  if (place === "home") {
    const corridor = ((entry - 1 + RING_STEPS) % RING_CELLS) + 1;
    return ringPoint(corridor, 1.2);
  }
  if (place === "col") {
    // the corridor starts just past the team's last ring square
    const corridor = ((entry - 1 + RING_STEPS) % RING_CELLS) + 1;
    const inward = RING_RADIUS - (index + 1) * 0.72;
    return ringPoint(corridor, inward);
  }
  const cell = ((entry - 1 + index) % RING_CELLS) + 1;
  return ringPoint(cell);
}

function trackLayout(track: Point[], width: number, height: number): BoardLayout {
  return {
    width,
    height,
    cell: 1,
    place(_team: number, pos: Position): Point {
      const { index } = parsePosition(pos);
      const point = track[index];
      if (!point) throw new Error(`no coordinate for ${pos}`);
      return point;
    },
    routeCoordinates(): Position[] {
      return track.map((_, i) => `track:${i}`);
    },
  };
}

export const LAYOUTS: Record<string, BoardLayout> = {
  motorsport: trackLayout(motorsportTrack, 13, 8),
  goose: trackLayout(gooseTrack, 11, 9),
  parcheesi: {
    width: 16,
    height: 16,
    cell: 1,
    place: parcheesiPlace,
    routeCoordinates(team: number): Position[] {
      const coords: Position[] = ["nest"];
      for (let i = 0; i < RING_STEPS; i++) coords.push(`track:${i}`);
      for (let j = 0; j < HOME_COLUMN; j++) coords.push(`col:${j}`);
      coords.push("home");
      return coords;
    },
  },
};

export function layoutFor(game: string): BoardLayout {
  const layout = LAYOUTS[game];
  if (!layout) throw new Error(`unknown game ${game}`);
  return layout;
}
