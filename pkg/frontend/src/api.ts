// Thin fetch client for the kgcf service. One hard rule lives here: while a
// login challenge is pending, no authenticated call other than the captcha
// answer may leave the client.

import type {
  AmbiguityItem,
  ChallengeDto,
  CompletionPayload,
  GraphSnapshot,
  LoginResponse,
  ObjectRef,
  RecommendationReport,
  RouteResponse,
  SubgraphResponse,
  TaskDto,
  TripleDto,
  UserDto,
  EntityDto,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  token: string | null = null;
  pendingChallenge: ChallengeDto | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    if (this.pendingChallenge !== null && !path.startsWith("/captcha/")) {
      // client-side gate: never let a locked session touch the API
      throw new ApiError(0, "ChallengePending",
        `answer challenge ${this.pendingChallenge.id} first`);
    }
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["content-type"] = "application/json";
    if (this.token !== null) headers["authorization"] = `Bearer ${this.token}`;
    const res = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await res.json();
    if (!res.ok) {
      throw new ApiError(res.status, payload.code ?? "HttpError",
        payload.message ?? res.statusText);
    }
    return payload as T;
  }

  // -- session ------------------------------------------------------------

  register(role: string): Promise<UserDto> {
    return this.request("POST", "/users", { role });
  }

  async login(userId: string): Promise<LoginResponse> {
    const out = await this.request<LoginResponse>("POST", "/login", { userId });
    this.token = out.token;
    this.pendingChallenge = out.challenge;
    return out;
  }

  async answerChallenge(answer: string): Promise<{ proceed: boolean }> {
    if (this.pendingChallenge === null) throw new ApiError(0, "NoChallenge", "nothing pending");
    const id = this.pendingChallenge.id;
    const out = await this.request<{ proceed: boolean }>(
      "POST", `/captcha/${id}/answer`, { answer });
    this.pendingChallenge = null;
    return out;
  }

  // -- graph ----------------------------------------------------------------

  graph(): Promise<GraphSnapshot> {
    return this.request("GET", "/graph");
  }

  addEntity(kind: string, label: string, attrs: Record<string, string> = {}): Promise<EntityDto> {
    return this.request("POST", "/graph/entities", { kind, label, attrs });
  }

  addTriple(subject: string, predicate: string, object: ObjectRef,
            confidence?: number): Promise<TripleDto> {
    return this.request("POST", "/graph/triples", { subject, predicate, object, confidence });
  }

  deleteTriple(id: string): Promise<{ deleted: string }> {
    return this.request("DELETE", `/graph/triples/${id}`);
  }

  deleteEntity(id: string): Promise<{ deleted: string }> {
    return this.request("DELETE", `/graph/entities/${id}`);
  }

  // -- tasks -----------------------------------------------------------------

  tasks(): Promise<{ tasks: TaskDto[] }> {
    return this.request("GET", "/tasks");
  }

  completeTask(taskId: string, payload: CompletionPayload): Promise<TaskDto> {
    return this.request("POST", `/tasks/${taskId}/complete`, { payload });
  }

  // -- analytics ----------------------------------------------------------------

  subgraph(kind: string): Promise<SubgraphResponse> {
    return this.request("GET", `/subgraphs/${kind}`);
  }

  route(from: string, to: string): Promise<RouteResponse> {
    const q = new URLSearchParams({ from, to });
    return this.request("GET", `/routes?${q}`);
  }

  recommendations(studentId: string, p?: number): Promise<RecommendationReport> {
    const suffix = p === undefined ? "" : `?p=${p}`;
    return this.request("GET", `/students/${studentId}/recommendations${suffix}`);
  }

  // -- ambiguity ------------------------------------------------------------------

  ambiguityOpen(): Promise<{ open: AmbiguityItem[] }> {
    return this.request("GET", "/ambiguity/open");
  }

  vote(slot: string, vote: "unequal" | "equal"): Promise<{ resolved: boolean }> {
    return this.request("POST", `/ambiguity/${slot}/vote`, { vote });
  }
}
