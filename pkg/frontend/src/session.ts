// Login flow state machine: anonymous -> challenged -> ready. The served
// challenge prompt is rendered verbatim; the answer form depends only on
// the challenge kind (yes/no buttons vs a free-text input).

import { ApiClient, ApiError } from "./api.js";
import type { ChallengeDto } from "./types.js";

export type LoginState = "anonymous" | "challenged" | "ready";
export type AnswerMode = "yesno" | "freetext";

export class LoginFlow {
  state: LoginState = "anonymous";
  challenge: ChallengeDto | null = null;
  error: string | null = null;

  constructor(private readonly client: ApiClient) {}

  get prompt(): string | null {
    return this.challenge === null ? null : this.challenge.prompt;
  }

  get answerMode(): AnswerMode | null {
    if (this.challenge === null) return null;
    return this.challenge.kind === "confirmatory" ? "yesno" : "freetext";
  }

  async start(userId: string): Promise<LoginState> {
    this.error = null;
    try {
      const out = await this.client.login(userId);
      this.challenge = out.challenge;
      this.state = out.challenge === null ? "ready" : "challenged";
    } catch (err) {
      this.state = "anonymous";       // no partial session on failure
      this.client.token = null;
      this.client.pendingChallenge = null;
      this.error = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    }
    return this.state;
  }

  async submit(answer: string): Promise<LoginState> {
    if (this.state !== "challenged") return this.state;
    this.error = null;
    try {
      await this.client.answerChallenge(answer);
      this.challenge = null;
      this.state = "ready";
    } catch (err) {
      // retry allowed: stay challenged, surface the service error code
      this.error = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    }
    return this.state;
  }
}
