/** View state and the session controller driving it against the service. */

import {
  ApiError,
  Context,
  GraphPayload,
  PathsPayload,
  RcaClient,
  Role,
} from "./api.js";

export interface FeedbackRecord {
  kind: "blacklist" | "role";
  detail: string;
  revision: number;
}

export interface ViewState {
  context: Context;
  fault: string | null;
  graph: GraphPayload | null;
  paths: PathsPayload | null;
  /** Variables on any fetched root-cause path (the fault included). */
  highlight: Set<string>;
  /** Revision of the KG the displayed graph was learned under. */
  kgRevision: number | null;
  /** True once the KG moved past the displayed graph's revision. */
  stale: boolean;
  feedbackLog: FeedbackRecord[];
  /** Human-readable banner for the last error, or null. */
  error: string | null;
}

export function emptyState(): ViewState {
  return {
    context: {},
    fault: null,
    graph: null,
    paths: null,
    highlight: new Set(),
    kgRevision: null,
    stale: false,
    feedbackLog: [],
    error: null,
  };
}

/** Union of all variables appearing on the fetched root-cause paths. */
export function highlightSet(paths: PathsPayload | null): Set<string> {
  const members = new Set<string>();
  if (!paths) return members;
  for (const path of paths.paths) for (const v of path) members.add(v);
  return members;
}

/** Case-insensitive substring search over variable ids. */
export function searchVariables(graph: GraphPayload | null, text: string): string[] {
  if (!graph || !text) return [];
  const needle = text.toLowerCase();
  return graph.variables.filter((v) => v.toLowerCase().includes(needle));
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    if (err.status === 404 && err.code === "UnknownKey") {
      return "no learned graph for this context; run learning";
    }
    return `${err.code}: ${err.message}`;
  }
  return String(err);
}

/**
 * Single-user session: every mutation round-trips through the service and
 * the displayed graph is always the last server payload. Concurrent
 * refreshes are keyed so only the latest one lands (last write wins).
 */
export class Session {
  state: ViewState = emptyState();
  private fetchToken = 0;

  constructor(private client: RcaClient) {}

  /** Change product/timeframe and refetch graph and paths. */
  async selectContext(context: Context): Promise<ViewState> {
    this.state = { ...this.state, context };
    return this.refresh();
  }

  /** Pick the faulty variable and fetch its root-cause paths. */
  async selectFault(variable: string | null): Promise<ViewState> {
    this.state = { ...this.state, fault: variable };
    return this.refresh();
  }

  async refresh(): Promise<ViewState> {
    const token = ++this.fetchToken;
    const { context, fault } = this.state;
    try {
      const graph = await this.client.getGraph(context);
      const paths =
        fault !== null ? await this.client.getPaths(context, fault) : null;
      if (token !== this.fetchToken) return this.state; // superseded
      this.state = {
        ...this.state,
        graph,
        paths,
        highlight: highlightSet(paths),
        kgRevision: graph.kg_revision,
        stale: graph.stale,
        error: null,
      };
    } catch (err) {
      if (token !== this.fetchToken) return this.state;
      this.state = {
        ...this.state,
        graph: null,
        paths: null,
        highlight: new Set(),
        error: describe(err),
      };
    }
    return this.state;
  }

  /** Forbid an edge; the view turns stale until relearned. */
  async blacklistEdge(src: string, dst: string): Promise<ViewState> {
    try {
      const resp = await this.client.blacklistEdge(src, dst);
      this.state = {
        ...this.state,
        stale: true,
        error: null,
        feedbackLog: [
          ...this.state.feedbackLog,
          { kind: "blacklist", detail: `${src} -> ${dst}`, revision: resp.revision },
        ],
      };
    } catch (err) {
      this.state = { ...this.state, error: describe(err) };
    }
    return this.state;
  }

  /** Assign a variable role; the view turns stale until relearned. */
  async setRole(variable: string, role: Role): Promise<ViewState> {
    try {
      const resp = await this.client.setRole(variable, role);
      this.state = {
        ...this.state,
        stale: true,
        error: null,
        feedbackLog: [
          ...this.state.feedbackLog,
          { kind: "role", detail: `${variable}: ${role}`, revision: resp.revision },
        ],
      };
    } catch (err) {
      this.state = { ...this.state, error: describe(err) };
    }
    return this.state;
  }

  /** Trigger a learning job for the current context, then refetch. */
  async relearn(): Promise<ViewState> {
    try {
      await this.client.learn(this.state.context);
    } catch (err) {
      this.state = { ...this.state, error: describe(err) };
      return this.state;
    }
    return this.refresh();
  }
}
