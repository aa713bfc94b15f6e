/** Wire types for the game service protocol (one JSON object per message).
 *
 * Commands carry `cmd` and usually `session`; events carry `event`,
 * `session` and a gapless per-session `seq`. Question events never include
 * the correct answer index; adjudication is server-side only.
 */

export type Position = string; // "nest" | "home" | "track:<i>" | "col:<j>"

export interface MarkerSnapshot {
  id: number;
  position: Position;
  hold: number;
}

export interface TeamSnapshot {
  index: number;
  name: string;
  topics: string[];
  markers: MarkerSnapshot[];
}

export interface CandidateWire {
  marker: number;
  path: Position[];
  effects: string[];
}

export interface PhaseWire {
  name: "await_roll" | "await_answer" | "await_move_choice" | "game_over";
  team?: number;
  value?: number;
  question_id?: string | null;
  candidates?: CandidateWire[];
  winner?: number;
}

export interface Snapshot {
  game: "motorsport" | "goose" | "parcheesi";
  mode: "classic" | "fast";
  started: boolean;
  teams: TeamSnapshot[];
  active_team: number;
  dice: { value: number | null; locked: boolean };
  phase: PhaseWire;
  statuses: ("playing" | "waiting" | "not_playing")[];
  turns: number;
  winner: number | null;
  pending_question: QuestionPayload | null;
}

export interface QuestionPayload {
  id: string;
  prompt: string;
  image: string | null;
  options: string[];
}

export interface GameEvent {
  event: string;
  session?: string;
  seq?: number;
  [key: string]: unknown;
}

export interface TopicInfo {
  id: string;
  name: string;
  count: number;
}

export interface SessionTeamConfig {
  name: string;
  topics: string[];
}

export interface CreateSessionCommand {
  cmd: "create_session";
  game: string;
  mode: string;
  teams: SessionTeamConfig[];
  language: string;
  dice: string;
  seed?: number;
}

export function parsePosition(pos: Position): { place: string; index: number } {
  if (pos === "nest") return { place: "nest", index: -1 };
  if (pos === "home") return { place: "home", index: -1 };
  const [place, index] = pos.split(":");
  return { place: place ?? "", index: Number(index) };
}
