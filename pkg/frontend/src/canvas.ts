// Collaborative graph canvas model. All state is the latest fetched
// snapshot; edits POST to the service and then refetch, and a polling loop
// picks up other users' changes without a reload. Layout is client-side
// presentation only.

import { ApiClient, ApiError } from "./api.js";
import type { EntityDto, GraphSnapshot, ObjectRef, TripleDto } from "./types.js";

export interface NodePosition {
  x: number;
  y: number;
}

export const DEFAULT_POLL_MS = 2000;

export class CollaborativeCanvas {
  nodes = new Map<string, EntityDto>();
  edges = new Map<string, TripleDto>();
  logicalClock = -1;
  lastError: string | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly client: ApiClient,
    readonly pollIntervalMs: number = DEFAULT_POLL_MS,
  ) {}

  apply(snapshot: GraphSnapshot): void {
    this.nodes = new Map(snapshot.entities.map((e) => [e.id, e]));
    this.edges = new Map(snapshot.triples.map((t) => [t.id, t]));
    this.logicalClock = snapshot.logicalClock;
  }

  async refresh(): Promise<void> {
    this.apply(await this.client.graph());
  }

  startPolling(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => {
      void this.refresh().catch(() => {
        // transient poll failures keep the last good snapshot
      });
    }, this.pollIntervalMs);
  }

  stopPolling(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private async mutate(op: () => Promise<unknown>): Promise<boolean> {
    this.lastError = null;
    try {
      await op();
      await this.refresh();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.lastError = `${err.code}: ${err.message}`;
        await this.refresh();  // reconcile after 409/422
        return false;
      }
      throw err;
    }
  }

  addEntity(kind: string, label: string): Promise<boolean> {
    return this.mutate(() => this.client.addEntity(kind, label));
  }

  addTriple(subject: string, predicate: string, object: ObjectRef): Promise<boolean> {
    return this.mutate(() => this.client.addTriple(subject, predicate, object));
  }

  deleteTriple(id: string): Promise<boolean> {
    return this.mutate(() => this.client.deleteTriple(id));
  }

  deleteEntity(id: string): Promise<boolean> {
    return this.mutate(() => this.client.deleteEntity(id));
  }
}

// Stable color per kind so "the same class" always renders alike.
export function kindColor(kind: string): string {
  let hash = 0;
  for (const ch of kind) hash = (hash * 31 + ch.codePointAt(0)!) >>> 0;
  return `hsl(${hash % 360}, 62%, 52%)`;
}

// Small deterministic force layout: repulsion between all nodes, springs
// along edges. Deterministic in (node ids, edge list, size, iterations).
export function forceLayout(
  nodeIds: string[],
  edges: Array<[string, string]>,
  width: number,
  height: number,
  iterations = 120,
): Map<string, NodePosition> {
  const ids = [...nodeIds].sort();
  const pos = new Map<string, NodePosition>();
  ids.forEach((id, i) => {
    const angle = (2 * Math.PI * i) / Math.max(ids.length, 1);
    pos.set(id, {
      x: width / 2 + (width / 3) * Math.cos(angle),
      y: height / 2 + (height / 3) * Math.sin(angle),
    });
  });
  const k = Math.sqrt((width * height) / Math.max(ids.length, 1));
  for (let step = 0; step < iterations; step++) {
    const disp = new Map<string, NodePosition>(ids.map((id) => [id, { x: 0, y: 0 }]));
    for (let i = 0; i < ids.length; i++) {
      for (let j = i + 1; j < ids.length; j++) {
        const a = pos.get(ids[i]!)!;
        const b = pos.get(ids[j]!)!;
        const dx = a.x - b.x;
        const dy = a.y - b.y;
        const dist = Math.max(Math.hypot(dx, dy), 0.01);
        const force = (k * k) / dist / dist;
        const da = disp.get(ids[i]!)!;
        const db = disp.get(ids[j]!)!;
        da.x += dx * force;
        da.y += dy * force;
        db.x -= dx * force;
        db.y -= dy * force;
      }
    }
    for (const [s, o] of edges) {
      const a = pos.get(s);
      const b = pos.get(o);
      if (!a || !b) continue;
      const dx = a.x - b.x;
      const dy = a.y - b.y;
      const dist = Math.max(Math.hypot(dx, dy), 0.01);
      const force = (dist * dist) / k / dist;
      const da = disp.get(s)!;
      const db = disp.get(o)!;
      da.x -= dx * force;
      da.y -= dy * force;
      db.x += dx * force;
      db.y += dy * force;
    }
    const temperature = (width / 10) * (1 - step / iterations);
    for (const id of ids) {
      const d = disp.get(id)!;
      const len = Math.max(Math.hypot(d.x, d.y), 0.01);
      const p = pos.get(id)!;
      p.x += (d.x / len) * Math.min(len, temperature);
      p.y += (d.y / len) * Math.min(len, temperature);
      p.x = Math.min(width - 20, Math.max(20, p.x));
      p.y = Math.min(height - 20, Math.max(20, p.y));
    }
  }
  return pos;
}
