// Analytics panels: subgraph styling helpers, route highlighting, and the
// recommendation list with its threshold slider. The slider only hides rows
// the server already scored; entries with an unknown (unstarted) LS always
// stay, mirroring the server's own ranking rule.

import { ApiClient } from "./api.js";
import type {
  PastEntry,
  RecommendationReport,
  RouteResponse,
  SubgraphResponse,
} from "./types.js";

export function filterPast(past: PastEntry[], p: number): PastEntry[] {
  return past.filter((e) => e.unstarted || (e.ls !== null && e.ls > p));
}

export class RecommendationPanel {
  report: RecommendationReport | null = null;
  threshold = 0;

  constructor(private readonly client: ApiClient) {}

  async load(studentId: string, p?: number): Promise<RecommendationReport> {
    this.report = await this.client.recommendations(studentId, p);
    this.threshold = this.report.p;
    return this.report;
  }

  setThreshold(p: number): void {
    this.threshold = p;
  }

  visiblePast(): PastEntry[] {
    if (this.report === null) return [];
    return filterPast(this.report.past, this.threshold);
  }

  buckets(): Array<{ name: string; exercises: string[] }> {
    if (this.report === null) return [];
    return Object.keys(this.report.incremental)
      .sort()
      .map((name) => ({ name, exercises: this.report!.incremental[name] ?? [] }));
  }
}

export type TeacherBadge = "cooperative" | "detached";

export function teacherBadges(subgraph: SubgraphResponse): Map<string, TeacherBadge> {
  const out = new Map<string, TeacherBadge>();
  for (const t of subgraph.teachers) {
    out.set(t.teacherId, t.cooperative ? "cooperative" : "detached");
  }
  return out;
}

export function routeSegments(route: RouteResponse): Array<[string, string]> {
  const segments: Array<[string, string]> = [];
  for (let i = 0; i + 1 < route.path.length; i++) {
    segments.push([route.path[i]!, route.path[i + 1]!]);
  }
  return segments;
}

export function routeNodeSet(route: RouteResponse): Set<string> {
  return new Set(route.path);
}
