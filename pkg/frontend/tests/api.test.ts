import { describe, expect, it } from "vitest";

import { ApiError, RcaClient } from "../src/api.js";
import { fixture, graphInitial, jsonResponse, pathsHeatInput } from "./fixtures.js";

interface Recorded {
  url: string;
  method: string;
  body: unknown;
}

function clientWith(responses: Response[]): { client: RcaClient; calls: Recorded[] } {
  const calls: Recorded[] = [];
  const client = new RcaClient("http://svc", async (url, init) => {
    calls.push({
      url,
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    });
    return responses[calls.length - 1];
  });
  return { client, calls };
}

describe("feedback requests", () => {
  it("blacklist sends the exact body the service recorded a 200 for", async () => {
    const { client, calls } = clientWith([
      jsonResponse(fixture("feedback_blacklist_response.json")),
    ]);
    const resp = await client.blacklistEdge("AmountAdhesive", "HeatInput");
    expect(calls).toEqual([
      {
        url: "http://svc/feedback",
        method: "POST",
        body: { type: "blacklist", src: "AmountAdhesive", dst: "HeatInput" },
      },
    ]);
    expect(resp.revision).toBe(2);
  });

  it("set-role sends the exact body", async () => {
    const { client, calls } = clientWith([jsonResponse({ revision: 3 })]);
    await client.setRole("Humidity", "Root");
    expect(calls[0].body).toEqual({ type: "role", variable: "Humidity", role: "Root" });
    expect(calls[0].url).toBe("http://svc/feedback");
  });

  it("surfaces the recorded self-blacklist error payload", async () => {
    const { client } = clientWith([
      jsonResponse(fixture("feedback_self_blacklist_error.json"), 400),
    ]);
    const err = await client.blacklistEdge("Weight", "Weight").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(400);
    expect(err.code).toBe("SelfBlacklist");
  });
});

describe("context queries", () => {
  it("graph and paths use ISO bounds in the query string", async () => {
    const { client, calls } = clientWith([
      jsonResponse(graphInitial()),
      jsonResponse(pathsHeatInput()),
    ]);
    await client.getGraph({ product: "P1", from: "2026-01-01T00:00:00", to: "2026-01-02T00:00:00" });
    await client.getPaths({ product: "P1" }, "HeatInput");
    expect(calls[0].url).toBe(
      "http://svc/graph?product=P1&from=2026-01-01T00%3A00%3A00&to=2026-01-02T00%3A00%3A00",
    );
    expect(calls[1].url).toBe("http://svc/paths?product=P1&variable=HeatInput");
  });

  it("learn posts only the provided context fields", async () => {
    const { client, calls } = clientWith([
      jsonResponse(fixture("learn_response.json")),
    ]);
    await client.learn({ product: "P1" });
    expect(calls[0]).toEqual({
      url: "http://svc/learn",
      method: "POST",
      body: { product: "P1" },
    });
  });

  it("maps the recorded unknown-context response to an ApiError", async () => {
    const { client } = clientWith([
      jsonResponse(fixture("graph_missing_context.json"), 404),
    ]);
    const err = await client.getGraph({ product: "P9" }).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("UnknownKey");
  });
});
