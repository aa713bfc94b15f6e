/** Client view state: a pure fold of protocol events over a snapshot.
 *
 * The client never computes game rules. Marker positions change only when
 * `moved` / `captured` events say so, the dice lock follows `dice` and
 * `answered`, the active badge follows `turn`. Every `moved` event also
 * queues animation hops; the rendered board equals the logical board once
 * the queue drains.
 */

import type {
  CandidateWire,
  GameEvent,
  Position,
  QuestionPayload,
  Snapshot,
} from "./protocol.js";

export type Badge = "turn" | "doesn't play" | "";
export type DiceColor = "green" | "red";

export interface Hop {
  team: number;
  marker: number;
  to: Position;
  effect: string | null; // effect tag when this hop is a special-square jump
}

export interface AnswerFeedback {
  team: number;
  correct: boolean;
}

export interface ClientViewState {
  snapshot: Snapshot;
  pendingQuestion: QuestionPayload | null;
  questionTeam: number | null;
  answerFeedback: AnswerFeedback | null;
  moveChoices: CandidateWire[] | null;
  animationQueue: Hop[];
  gameOver: boolean;
  connection: "connecting" | "open" | "closed";
}

export function initialView(snapshot: Snapshot): ClientViewState {
  return {
    snapshot: structuredClone(snapshot),
    pendingQuestion: null,
    questionTeam: null,
    answerFeedback: null,
    moveChoices: null,
    animationQueue: [],
    gameOver: snapshot.winner !== null,
    connection: "open",
  };
}

/** Seat badges: the playing team shows "turn", spare seats "doesn't play". */
export function badges(view: ClientViewState): Badge[] {
  return view.snapshot.statuses.map((status) =>
    status === "playing" ? "turn" : status === "not_playing" ? "doesn't play" : "",
  );
}

export function diceColor(view: ClientViewState): DiceColor {
  return view.snapshot.dice.locked ? "red" : "green";
}

/** The dice control accepts clicks only when unlocked and no move is pending. */
export function diceEnabled(view: ClientViewState): boolean {
  return (
    !view.snapshot.dice.locked &&
    !view.gameOver &&
    view.moveChoices === null &&
    view.animationQueue.length === 0
  );
}

function recomputeStatuses(view: ClientViewState): void {
  const snap = view.snapshot;
  snap.statuses = snap.statuses.map((_, seat) =>
    seat >= snap.teams.length
      ? "not_playing"
      : snap.winner === null && seat === snap.active_team
        ? "playing"
        : "waiting",
  );
}

function marker(view: ClientViewState, team: number, id: number) {
  const entry = view.snapshot.teams[team]?.markers[id];
  if (!entry) throw new Error(`no marker ${team}/${id}`);
  return entry;
}

export function applyEvent(view: ClientViewState, event: GameEvent): void {
  const snap = view.snapshot;
  switch (event.event) {
    case "session_created":
    case "state": {
      const incoming = structuredClone(event["snapshot"]) as Snapshot;
      view.snapshot = incoming;
      view.moveChoices =
        incoming.phase.name === "await_move_choice"
          ? (incoming.phase.candidates ?? [])
          : null;
      view.pendingQuestion = incoming.pending_question;
      view.questionTeam =
        incoming.phase.name === "await_answer" ? incoming.active_team : null;
      view.gameOver = incoming.winner !== null;
      return;
    }
    case "turn":
      snap.started = true;
      snap.active_team = event["team"] as number;
      snap.phase = { name: "await_roll", team: snap.active_team };
      break;
    case "dice":
      snap.dice = {
        value: event["value"] as number,
        locked: event["locked"] as boolean,
      };
      if (snap.dice.locked) {
        snap.phase = { name: "await_answer", team: snap.active_team };
      }
      break;
    case "question":
      view.pendingQuestion = {
        id: event["id"] as string,
        prompt: event["prompt"] as string,
        image: event["image"] as string | null,
        options: event["options"] as string[],
      };
      view.questionTeam = event["team"] as number;
      view.answerFeedback = null;
      break;
    case "answered":
      view.answerFeedback = {
        team: event["team"] as number,
        correct: event["correct"] as boolean,
      };
      view.pendingQuestion = null;
      view.questionTeam = null;
      snap.dice.locked = false;
      // adjudication ends the answer phase; a following state / turn /
      // game_over event refines where play goes next
      snap.phase = { name: "await_roll", team: snap.active_team };
      break;
    case "moved": {
      const team = event["team"] as number;
      const id = event["marker"] as number;
      const path = event["path"] as Position[];
      const effects = event["effects"] as string[];
      path.forEach((to, i) => {
        view.animationQueue.push({
          team,
          marker: id,
          to,
          effect: i > 0 ? (effects[i - 1] ?? null) : null,
        });
      });
      const last = path[path.length - 1];
      if (last !== undefined) marker(view, team, id).position = last;
      snap.turns += 1;
      snap.phase = { name: "await_roll", team: snap.active_team };
      view.moveChoices = null;
      break;
    }
    case "captured": {
      const team = event["team"] as number;
      const id = event["marker"] as number;
      view.animationQueue.push({ team, marker: id, to: "nest", effect: null });
      marker(view, team, id).position = "nest";
      break;
    }
    case "turn_passed":
    case "turn_skipped":
      snap.turns += 1;
      snap.phase = { name: "await_roll", team: snap.active_team };
      break;
    case "game_over":
      snap.winner = event["winner"] as number;
      snap.phase = { name: "game_over", winner: snap.winner };
      view.gameOver = true;
      view.moveChoices = null;
      break;
    case "error":
    case "topics":
      return;
    default:
      return;
  }
  recomputeStatuses(view);
}

export function applyAll(view: ClientViewState, events: GameEvent[]): void {
  for (const event of events) applyEvent(view, event);
}

/** A team's logical marker positions (what rendering must show once the
 * animation queue has drained). */
export function markerPositions(view: ClientViewState, team: number): Position[] {
  return (view.snapshot.teams[team]?.markers ?? []).map((m) => m.position);
}
