import {
  FeedbackReplySchema,
  PredictionSchema,
  SessionCreatedSchema,
  TranscriptSchema,
  type PredictionReply,
  type SessionCreated,
  type SessionTranscript,
} from "./schema.js";
import type { TaskFile } from "./layout.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

/** Thin typed client for the inference service; all state lives server-side. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    const body = await response.json();
    if (!response.ok) {
      const code = typeof body?.code === "string" ? body.code : "unknown";
      const message = typeof body?.message === "string" ? body.message : response.statusText;
      throw new ApiError(response.status, code, message);
    }
    return body;
  }

  async getTask(modelId: string): Promise<TaskFile> {
    const body = (await this.request(`/v1/models/${modelId}`)) as { task?: TaskFile };
    if (!body.task) throw new ApiError(404, "NoTask", `model ${modelId} has no task attached`);
    return body.task;
  }

  async createSession(modelId: string, seed?: number): Promise<SessionCreated> {
    const body = await this.request("/v1/sessions", {
      method: "POST",
      body: JSON.stringify({ model_id: modelId, seed, auto_resolve: true }),
    });
    return SessionCreatedSchema.parse(body);
  }

  async postPrimary(sessionId: string, actionId: string): Promise<PredictionReply> {
    const body = await this.request(`/v1/sessions/${sessionId}/primary`, {
      method: "POST",
      body: JSON.stringify({ action_id: actionId }),
    });
    return PredictionSchema.parse(body);
  }

  async postFeedback(sessionId: string, accepted: boolean, actual?: string[]): Promise<void> {
    const body = await this.request(`/v1/sessions/${sessionId}/feedback`, {
      method: "POST",
      body: JSON.stringify(actual === undefined ? { accepted } : { accepted, actual }),
    });
    FeedbackReplySchema.parse(body);
  }

  async getSession(sessionId: string): Promise<SessionTranscript> {
    const body = await this.request(`/v1/sessions/${sessionId}`);
    return TranscriptSchema.parse(body);
  }
}
