/** SVG rendering of the learned graph and the root-cause side panel.
 *
 * Pure string generation so it is testable without a DOM; the browser
 * entry point assigns the result to innerHTML and wires events by
 * data attributes.
 */

import { GraphPayload, PathsPayload } from "./api.js";
import { CyclicGraphError, DEFAULT_LAYOUT, LayoutOptions, layout } from "./layout.js";
import { highlightSet } from "./state.js";

const NODE_W = 130;
const NODE_H = 36;

export function edgeWidth(strength: number): number {
  // strictly increasing in strength so thickness orders edges visually
  return 1 + 5 * Math.max(0, Math.min(1, strength));
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function nodeClass(id: string, fault: string | null, members: Set<string>): string {
  if (id === fault) return "node fault";
  if (members.has(id)) return "node highlight";
  return "node";
}

/** The DAG view: layered layout, fault in red, path members in yellow. */
export function renderGraph(
  graph: GraphPayload | null,
  paths: PathsPayload | null,
  opts: LayoutOptions = DEFAULT_LAYOUT,
): string {
  if (!graph || graph.variables.length === 0 || graph.edges.length === 0) {
    return `<div class="empty-state">No causal relations learned for this context.</div>`;
  }
  let positions;
  try {
    positions = layout(graph, opts);
  } catch (err) {
    if (err instanceof CyclicGraphError) {
      return `<div class="error-banner">Cannot draw: the graph payload contains a cycle.</div>`;
    }
    throw err;
  }
  const pos = new Map(positions.map((p) => [p.id, p]));
  const fault = paths?.fault ?? null;
  const members = highlightSet(paths);

  const width = Math.max(...positions.map((p) => p.x)) + NODE_W + opts.marginX;
  const height = Math.max(...positions.map((p) => p.y)) + NODE_H + opts.marginY;

  const edges = graph.edges
    .map((e) => {
      const a = pos.get(e.src);
      const b = pos.get(e.dst);
      if (!a || !b) return "";
      return (
        `<line class="edge" data-src="${esc(e.src)}" data-dst="${esc(e.dst)}" ` +
        `x1="${a.x + NODE_W}" y1="${a.y + NODE_H / 2}" ` +
        `x2="${b.x}" y2="${b.y + NODE_H / 2}" ` +
        `stroke-width="${edgeWidth(e.strength).toFixed(2)}" marker-end="url(#arrow)">` +
        `<title>${esc(e.src)} → ${esc(e.dst)} (strength ${e.strength.toFixed(3)})</title>` +
        `</line>`
      );
    })
    .join("");

  const nodes = positions
    .map(
      (p) =>
        `<g class="${nodeClass(p.id, fault, members)}" data-variable="${esc(p.id)}" ` +
        `transform="translate(${p.x},${p.y})">` +
        `<rect width="${NODE_W}" height="${NODE_H}" rx="6"></rect>` +
        `<text x="${NODE_W / 2}" y="${NODE_H / 2 + 4}" text-anchor="middle">${esc(p.id)}</text>` +
        `</g>`,
    )
    .join("");

  return (
    `<svg class="graph" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">` +
    `<defs><marker id="arrow" markerWidth="8" markerHeight="8" refX="8" refY="4" orient="auto">` +
    `<path d="M0,0 L8,4 L0,8 z"></path></marker></defs>` +
    edges +
    nodes +
    `</svg>`
  );
}

/** Side panel: root-cause paths into the fault, strongest first. */
export function renderPaths(paths: PathsPayload | null): string {
  if (!paths) return `<div class="empty-state">Search a faulty sensor variable.</div>`;
  if (paths.paths.length === 0) {
    return `<div class="empty-state">No root-cause paths lead to ${esc(paths.fault)}.</div>`;
  }
  const items = paths.paths
    .map((path, i) => {
      const chain = path.map(esc).join(" → ");
      const strength = paths.strengths[i];
      return `<li class="path" data-index="${i}">${chain} <span class="strength">${strength.toFixed(3)}</span></li>`;
    })
    .join("");
  const note = paths.truncated
    ? `<div class="note">Path list truncated; strongest shown.</div>`
    : "";
  return `<ol class="paths">${items}</ol>${note}`;
}

/** Status line: revision, staleness, errors, pending relearn hint. */
export function renderStatus(
  kgRevision: number | null,
  stale: boolean,
  error: string | null,
): string {
  if (error) return `<div class="error-banner">${esc(error)}</div>`;
  if (kgRevision === null) return "";
  const staleNote = stale
    ? ` <span class="stale">knowledge updated — relearn to apply it to the next iteration</span>`
    : "";
  return `<div class="status">graph learned at knowledge revision ${kgRevision}${staleNote}</div>`;
}
