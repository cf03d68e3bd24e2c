/** Load recorded service responses (captured by scripts/record_fixtures.py). */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { GraphPayload, PathsPayload } from "../src/api.js";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf-8")) as T;
}

export const graphInitial = (): GraphPayload => fixture("graph_initial.json");
export const graphStale = (): GraphPayload => fixture("graph_stale.json");
export const graphAfterRelearn = (): GraphPayload => fixture("graph_after_relearn.json");
export const pathsHeatInput = (): PathsPayload => fixture("paths_heatinput.json");
export const pathsHeatInputAfter = (): PathsPayload => fixture("paths_heatinput_after.json");

/** A minimal Response-compatible object for injected fetch mocks. */
export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
