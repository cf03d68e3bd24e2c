/** Typed client for the root-cause-analysis HTTP service. */

export interface GraphEdge {
  src: string;
  dst: string;
  strength: number;
}

export interface GraphPayload {
  variables: string[];
  edges: GraphEdge[];
  kg_revision: number;
  stale: boolean;
}

export interface PathsPayload {
  fault: string;
  paths: string[][];
  strengths: number[];
  contributing: Record<string, number>;
  truncated: boolean;
}

export interface LearnResponse {
  job_id: string;
  cached: boolean;
}

export interface FeedbackResponse {
  revision: number;
}

/** Product/timeframe selection; omitted fields are not sent. */
export interface Context {
  product?: string;
  from?: string;
  to?: string;
}

export type Role = "Root" | "Leaf" | "Irrelevant" | "None";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details?: unknown,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

function contextQuery(ctx: Context, extra: Record<string, string> = {}): string {
  const params = new URLSearchParams();
  if (ctx.product !== undefined) params.set("product", ctx.product);
  if (ctx.from !== undefined) params.set("from", ctx.from);
  if (ctx.to !== undefined) params.set("to", ctx.to);
  for (const [k, v] of Object.entries(extra)) params.set(k, v);
  const q = params.toString();
  return q ? `?${q}` : "";
}

export class RcaClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    const payload = await resp.json();
    if (!resp.ok) {
      const err = payload?.error ?? {};
      throw new ApiError(
        resp.status,
        err.code ?? "Unknown",
        err.message ?? `request failed with status ${resp.status}`,
        err.details,
      );
    }
    return payload as T;
  }

  getGraph(ctx: Context): Promise<GraphPayload> {
    return this.request("GET", `/graph${contextQuery(ctx)}`);
  }

  getPaths(ctx: Context, variable: string): Promise<PathsPayload> {
    return this.request("GET", `/paths${contextQuery(ctx, { variable })}`);
  }

  learn(ctx: Context): Promise<LearnResponse> {
    const body: Record<string, string> = {};
    if (ctx.product !== undefined) body.product = ctx.product;
    if (ctx.from !== undefined) body.from = ctx.from;
    if (ctx.to !== undefined) body.to = ctx.to;
    return this.request("POST", "/learn", body);
  }

  blacklistEdge(src: string, dst: string): Promise<FeedbackResponse> {
    return this.request("POST", "/feedback", { type: "blacklist", src, dst });
  }

  setRole(variable: string, role: Role): Promise<FeedbackResponse> {
    return this.request("POST", "/feedback", { type: "role", variable, role });
  }
}
