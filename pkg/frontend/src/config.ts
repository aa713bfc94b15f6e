/** Configuration dialog model: teams, topics, dice mode, speed, language.
 *
 * Pure state + validation; the DOM layer renders it and forwards clicks.
 * Topics always come from the service's `list_topics` reply, never from a
 * hardcoded list.
 */

import type { CreateSessionCommand, TopicInfo } from "./protocol.js";

export interface TeamDraft {
  name: string;
  topics: Set<string>;
}

export class ConfigModel {
  game = "goose";
  mode: "classic" | "fast" = "classic";
  dice: "manual" | "auto" = "manual";
  language = "en";
  teams: TeamDraft[] = [];
  availableTopics: TopicInfo[] = [];

  constructor() {
    this.setTeamCount(2);
  }

  setTeamCount(count: number): void {
    const clamped = Math.max(2, Math.min(4, count));
    while (this.teams.length < clamped) {
      this.teams.push({ name: `Team ${this.teams.length + 1}`, topics: new Set() });
    }
    this.teams.length = clamped;
  }

  setTopics(language: string, topics: TopicInfo[]): void {
    this.language = language;
    this.availableTopics = topics;
    const known = new Set(topics.map((t) => t.id));
    for (const team of this.teams) {
      for (const id of [...team.topics]) if (!known.has(id)) team.topics.delete(id);
    }
  }

  toggleTopic(team: number, topicId: string): void {
    const draft = this.teams[team];
    if (!draft) return;
    if (draft.topics.has(topicId)) draft.topics.delete(topicId);
    else draft.topics.add(topicId);
  }

  /** Submit stays disabled until every team has a name and a topic. */
  valid(): boolean {
    return (
      this.teams.length >= 2 &&
      this.teams.length <= 4 &&
      this.teams.every((t) => t.name.trim() !== "" && t.topics.size > 0)
    );
  }

  toCommand(seed?: number): CreateSessionCommand {
    const command: CreateSessionCommand = {
      cmd: "create_session",
      game: this.game,
      mode: this.mode,
      dice: this.dice,
      language: this.language,
      teams: this.teams.map((t) => ({
        name: t.name,
        topics: [...t.topics].sort(),
      })),
    };
    if (seed !== undefined) command.seed = seed;
    return command;
  }
}
