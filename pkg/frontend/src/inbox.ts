// Task inbox: each task kind maps to the matching completion form; a 409
// (someone else finished it, or a double submit) surfaces as a conflict
// banner and triggers a refresh.

import { ApiClient, ApiError } from "./api.js";
import type { CompletionPayload, TaskDto } from "./types.js";

export type FormKind = "vote" | "attributes" | "proposal";

export function formFor(taskKind: string): FormKind {
  switch (taskKind) {
    case "tripleVerification":
      return "vote";
    case "conceptPerfection":
    case "attributePerfection":
      return "attributes";
    case "relationExpansion":
      return "proposal";
    default:
      throw new Error(`unknown task kind ${taskKind}`);
  }
}

export class TaskInbox {
  tasks: TaskDto[] = [];
  conflict: string | null = null;

  constructor(private readonly client: ApiClient) {}

  async refresh(): Promise<TaskDto[]> {
    this.tasks = (await this.client.tasks()).tasks;
    return this.tasks;
  }

  async complete(taskId: string, payload: CompletionPayload): Promise<boolean> {
    this.conflict = null;
    try {
      await this.client.completeTask(taskId, payload);
      await this.refresh();
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.conflict = `task ${taskId}: ${err.message}`;
        await this.refresh();
        return false;
      }
      throw err;
    }
  }
}
