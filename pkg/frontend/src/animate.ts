/** Marker animation: one serialized queue of hops.
 *
 * Rendering keeps its own piece positions and advances them one hop at a
 * time; after the queue drains, every rendered position equals the logical
 * snapshot position. The hop duration is read when the hop starts, so a
 * speed-slider change applies from the next hop on. Input stays blocked
 * while the queue is busy.
 */

import type { Position } from "./protocol.js";
import type { Hop } from "./view.js";

export function pieceKey(team: number, marker: number): string {
  return `${team}:${marker}`;
}

export class AnimationQueue {
  private queue: Hop[] = [];
  readonly rendered = new Map<string, Position>();
  speedMs = 300;

  /** Seed the rendered board from snapshot positions. */
  reset(positions: Iterable<[string, Position]>): void {
    this.queue.length = 0;
    this.rendered.clear();
    for (const [key, pos] of positions) this.rendered.set(key, pos);
  }

  enqueue(hops: Hop[]): void {
    this.queue.push(...hops);
  }

  get busy(): boolean {
    return this.queue.length > 0;
  }

  get pending(): number {
    return this.queue.length;
  }

  /** Start the next hop: moves one piece one rest-position further and
   * reports how long the renderer should animate it. */
  step(): { hop: Hop; durationMs: number } | null {
    const hop = this.queue.shift();
    if (!hop) return null;
    this.rendered.set(pieceKey(hop.team, hop.marker), hop.to);
    // effect jumps (bridge, maze, death, goose chains) read as a second hop
    return { hop, durationMs: this.speedMs };
  }

  /** Apply every queued hop at once (used when animations are off). */
  drain(): void {
    while (this.step() !== null) {
      // each step already committed its rendered position
    }
  }
}
