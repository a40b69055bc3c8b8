import type {
  ComparisonTable,
  Decision,
  ManualAddition,
  ProposalPayload,
  SemantifyResponse,
  SessionResponse,
  SimilarResponse,
} from "./types.js";

/** Error carrying the server's machine-readable code (e.g. ModelUnavailable). */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "UnknownError";
  let message = `request failed with status ${response.status}`;
  try {
    const body = await response.json();
    if (body?.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(response.status, code, message);
}

export interface Api {
  createAssay(text: string, title?: string): Promise<string>;
  semantify(assayId: string, topK?: number): Promise<SemantifyResponse>;
  getSession(sessionId: string): Promise<SessionResponse>;
  decide(sessionId: string, proposalId: string, decision: Decision): Promise<ProposalPayload>;
  addStatement(sessionId: string, statement: ManualAddition): Promise<ManualAddition>;
  finalize(sessionId: string, paperTitle: string): Promise<string>;
  getComparison(contributions: string[]): Promise<ComparisonTable>;
  getSimilar(contribution: string, k: number): Promise<SimilarResponse>;
}

export class ApiClient implements Api {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  async createAssay(text: string, title?: string): Promise<string> {
    const body = await this.request<{ assay_id: string }>("POST", "/api/assays", { text, title });
    return body.assay_id;
  }

  semantify(assayId: string, topK?: number): Promise<SemantifyResponse> {
    return this.request("POST", `/api/assays/${assayId}/semantify`, topK ? { top_k: topK } : {});
  }

  getSession(sessionId: string): Promise<SessionResponse> {
    return this.request("GET", `/api/sessions/${sessionId}`);
  }

  decide(sessionId: string, proposalId: string, decision: Decision): Promise<ProposalPayload> {
    return this.request("PATCH", `/api/sessions/${sessionId}/proposals/${proposalId}`, { decision });
  }

  addStatement(sessionId: string, statement: ManualAddition): Promise<ManualAddition> {
    return this.request("POST", `/api/sessions/${sessionId}/statements`, statement);
  }

  async finalize(sessionId: string, paperTitle: string): Promise<string> {
    const body = await this.request<{ contribution_id: string }>(
      "POST",
      `/api/sessions/${sessionId}/finalize`,
      { paper_title: paperTitle },
    );
    return body.contribution_id;
  }

  getComparison(contributions: string[]): Promise<ComparisonTable> {
    const ids = encodeURIComponent(contributions.join(","));
    return this.request("GET", `/api/comparisons?contributions=${ids}`);
  }

  getSimilar(contribution: string, k: number): Promise<SimilarResponse> {
    return this.request("GET", `/api/assays/${contribution}/similar?k=${k}`);
  }
}
