// Wire types mirroring the service JSON bodies. The UI never computes
// domain values; it renders what these carry.

export interface EntityDto {
  id: string;
  kind: string;
  label: string;
  attrs: Record<string, string>;
}

export type ObjectRef = { entity: string } | { literal: string };

export interface ProvenanceDto {
  source: string;
  user: string | null;
  logicalTime: number;
}

export interface TripleDto {
  id: string;
  subject: string;
  predicate: string;
  object: ObjectRef;
  confidence: number;
  status: string;
  provenance: ProvenanceDto[];
}

export interface GraphSnapshot {
  logicalClock: number;
  entities: EntityDto[];
  triples: TripleDto[];
}

export interface ChallengeDto {
  id: string;
  kind: "confirmatory" | "fillBlank";
  questionForm: string;
  prompt: string;
  targetTripleId: string;
  blankedSlot: string | null;
  ledgerId: string | null;
}

export interface LoginResponse {
  token: string;
  challenge: ChallengeDto | null;
}

export interface UserDto {
  id: string;
  role: string;
  score: number;
  groupId: string | null;
}

export interface TaskDto {
  id: string;
  kind: string;
  target: string;
  groupId: string | null;
  assigneeId: string | null;
  status: string;
  result: unknown;
}

export interface SubgraphResponse {
  kind: string;
  nodes: EntityDto[];
  edges: TripleDto[];
  teachers: {
    teacherId: string;
    courseIds: string[];
    categoryCounts: Record<string, number>;
    cooperative: boolean;
  }[];
}

export interface RouteResponse {
  from: string;
  to: string;
  path: string[];
  length: number;
}

export interface PastEntry {
  exercise: string;
  ls: number | null;
  unstarted: boolean;
}

export interface RecommendationReport {
  student: string;
  p: number;
  past: PastEntry[];
  incremental: Record<string, string[]>;
  unstartedLearner: boolean;
}

export interface AmbiguityItem {
  id: string;
  prompt: string;
  primary: string;
  secondary: string;
  votes: { unequal: number; total: number };
}

export type CompletionPayload =
  | { vote: "valid" | "invalid" }
  | { attrs: Record<string, string> }
  | { triple: { subject: string; predicate: string; object: ObjectRef } };
