/** DOM rendering: board, pieces, dice, badges. Thin layer over the view
 * model; all behavior lives in view.ts / animate.ts and is tested there.
 */

import { AnimationQueue, pieceKey } from "./animate.js";
import { layoutFor } from "./boards.js";
import type { Position, Snapshot } from "./protocol.js";
import { badges, diceColor, diceEnabled, type ClientViewState } from "./view.js";

const TEAM_COLORS = ["#e04a3f", "#2f6fd0", "#2fa052", "#d9a22b"];
const SCALE = 42;

export class BoardRenderer {
  private pieces = new Map<string, HTMLElement>();

  constructor(
    private board: HTMLElement,
    private queue: AnimationQueue,
  ) {}

  build(snapshot: Snapshot): void {
    this.board.innerHTML = "";
    this.pieces.clear();
    const layout = layoutFor(snapshot.game);
    this.board.style.width = `${layout.width * SCALE}px`;
    this.board.style.height = `${layout.height * SCALE}px`;

    const squares = new Set<string>();
    snapshot.teams.forEach((team) => {
      for (const pos of layout.routeCoordinates(team.index)) {
        const point = layout.place(team.index, pos);
        const key = `${Math.round(point.x * 10)}:${Math.round(point.y * 10)}`;
        if (squares.has(key)) continue;
        squares.add(key);
        const el = document.createElement("div");
        el.className = "square";
        el.style.left = `${point.x * SCALE - 14}px`;
        el.style.top = `${point.y * SCALE - 14}px`;
        this.board.appendChild(el);
      }
    });

    const seeds: [string, Position][] = [];
    snapshot.teams.forEach((team) => {
      team.markers.forEach((m) => {
        const el = document.createElement("div");
        el.className = "piece";
        el.style.background = TEAM_COLORS[team.index] ?? "#888";
        el.dataset["team"] = String(team.index);
        el.dataset["marker"] = String(m.id);
        el.textContent = String(m.id + 1);
        this.board.appendChild(el);
        this.pieces.set(pieceKey(team.index, m.id), el);
        seeds.push([pieceKey(team.index, m.id), m.position]);
      });
    });
    this.queue.reset(seeds);
    this.paintAll(snapshot);
  }

  paintAll(snapshot: Snapshot): void {
    const layout = layoutFor(snapshot.game);
    for (const [key, pos] of this.queue.rendered) {
      const el = this.pieces.get(key);
      if (!el) continue;
      const [team, marker] = key.split(":").map(Number);
      const point = layout.place(team ?? 0, pos);
      const jitter = ((marker ?? 0) - 0.5) * 6;
      el.style.transform =
        `translate(${point.x * SCALE - 11 + jitter}px, ${point.y * SCALE - 11}px)`;
    }
  }

  /** Pump the animation queue; calls `done` when it drains. */
  pump(snapshot: Snapshot, done: () => void): void {
    const next = this.queue.step();
    if (!next) {
      this.paintAll(snapshot);
      done();
      return;
    }
    const el = this.pieces.get(pieceKey(next.hop.team, next.hop.marker));
    if (el) {
      el.style.transitionDuration = `${next.durationMs}ms`;
      this.paintAll(snapshot);
    }
    window.setTimeout(() => this.pump(snapshot, done), next.durationMs);
  }
}

export function renderDice(view: ClientViewState): void {
  const dice = document.getElementById("dice") as HTMLButtonElement;
  dice.classList.toggle("locked", diceColor(view) === "red");
  dice.disabled = !diceEnabled(view);
  dice.textContent = view.snapshot.dice.value?.toString() ?? "⚀";
}

export function renderBadges(view: ClientViewState): void {
  const seats = document.getElementById("seats")!;
  seats.innerHTML = "";
  badges(view).forEach((badge, seat) => {
    const team = view.snapshot.teams[seat];
    const el = document.createElement("div");
    el.className = "seat";
    const label = badge === "turn" ? "turn" : badge;
    el.innerHTML =
      `<span class="dot" style="background:${TEAM_COLORS[seat]}"></span>` +
      `<span class="name">${team ? team.name : `Seat ${seat + 1}`}</span>` +
      `<span class="badge ${badge === "turn" ? "turn" : badge ? "off" : ""}">` +
      `${label}</span>`;
    seats.appendChild(el);
  });
}

export function renderWinner(view: ClientViewState): void {
  const el = document.getElementById("winner")!;
  if (view.snapshot.winner === null) {
    el.hidden = true;
    return;
  }
  const team = view.snapshot.teams[view.snapshot.winner];
  el.hidden = false;
  el.textContent = `${team?.name ?? "?"} wins!`;
}
