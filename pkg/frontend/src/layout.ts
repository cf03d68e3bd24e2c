/** Layered left-to-right layout for acyclic graphs. */

import { GraphPayload } from "./api.js";

export interface NodePosition {
  id: string;
  layer: number;
  x: number;
  y: number;
}

export class CyclicGraphError extends Error {
  constructor() {
    super("graph payload contains a cycle");
  }
}

/**
 * Assign each node the length of the longest incoming chain, so every
 * edge points from a lower layer to a strictly higher one. Throws
 * CyclicGraphError when the payload is not a DAG (defensive; the service
 * guarantees acyclicity).
 */
export function layerAssignment(graph: GraphPayload): Map<string, number> {
  const incoming = new Map<string, number>();
  const children = new Map<string, string[]>();
  for (const v of graph.variables) {
    incoming.set(v, 0);
    children.set(v, []);
  }
  for (const e of graph.edges) {
    incoming.set(e.dst, (incoming.get(e.dst) ?? 0) + 1);
    children.get(e.src)?.push(e.dst);
  }

  const layer = new Map<string, number>();
  const ready = graph.variables.filter((v) => incoming.get(v) === 0);
  for (const v of ready) layer.set(v, 0);
  let placed = 0;
  while (ready.length > 0) {
    const v = ready.shift() as string;
    placed += 1;
    for (const c of children.get(v) ?? []) {
      layer.set(c, Math.max(layer.get(c) ?? 0, (layer.get(v) ?? 0) + 1));
      const left = (incoming.get(c) ?? 0) - 1;
      incoming.set(c, left);
      if (left === 0) ready.push(c);
    }
  }
  if (placed !== graph.variables.length) throw new CyclicGraphError();
  return layer;
}

export interface LayoutOptions {
  columnGap: number;
  rowGap: number;
  marginX: number;
  marginY: number;
}

export const DEFAULT_LAYOUT: LayoutOptions = {
  columnGap: 170,
  rowGap: 70,
  marginX: 80,
  marginY: 50,
};

/** Concrete coordinates: layers left to right, layer members stacked. */
export function layout(
  graph: GraphPayload,
  opts: LayoutOptions = DEFAULT_LAYOUT,
): NodePosition[] {
  const layers = layerAssignment(graph);
  const byLayer = new Map<number, string[]>();
  for (const v of graph.variables) {
    const l = layers.get(v) ?? 0;
    if (!byLayer.has(l)) byLayer.set(l, []);
    byLayer.get(l)?.push(v);
  }
  const positions: NodePosition[] = [];
  for (const [l, members] of [...byLayer.entries()].sort((a, b) => a[0] - b[0])) {
    members.forEach((id, row) => {
      positions.push({
        id,
        layer: l,
        x: opts.marginX + l * opts.columnGap,
        y: opts.marginY + row * opts.rowGap,
      });
    });
  }
  return positions;
}
