/** Browser entry point: wires inputs and click handlers to the session. */

import { RcaClient, Role } from "./api.js";
import { Session, searchVariables } from "./state.js";
import { renderGraph, renderPaths, renderStatus } from "./render.js";

const BASE_URL =
  (window as unknown as { RCA_BASE_URL?: string }).RCA_BASE_URL ??
  "http://127.0.0.1:8080";

const session = new Session(new RcaClient(BASE_URL));

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function draw(): void {
  const s = session.state;
  el("graph-pane").innerHTML = renderGraph(s.graph, s.paths);
  el("paths-pane").innerHTML = renderPaths(s.paths);
  el("status-pane").innerHTML = renderStatus(s.kgRevision, s.stale, s.error);
  el<HTMLButtonElement>("relearn").disabled = !s.stale;

  for (const node of document.querySelectorAll<SVGGElement>("g.node")) {
    node.addEventListener("click", () => {
      const variable = node.dataset.variable;
      if (variable) void session.selectFault(variable).then(draw);
    });
    node.addEventListener("contextmenu", (ev) => {
      ev.preventDefault();
      const variable = node.dataset.variable;
      const role = window.prompt(`Role for ${variable} (Root/Leaf/Irrelevant/None):`);
      if (variable && role) {
        void session.setRole(variable, role as Role).then(draw);
      }
    });
  }
  for (const edge of document.querySelectorAll<SVGLineElement>("line.edge")) {
    edge.addEventListener("click", () => {
      const { src, dst } = edge.dataset;
      if (src && dst && window.confirm(`Add ${src} → ${dst} to the blacklist?`)) {
        void session.blacklistEdge(src, dst).then(draw);
      }
    });
  }
}

function currentContext() {
  const product = el<HTMLInputElement>("product").value.trim();
  const from = el<HTMLInputElement>("from").value.trim();
  const to = el<HTMLInputElement>("to").value.trim();
  return {
    ...(product ? { product } : {}),
    ...(from ? { from } : {}),
    ...(to ? { to } : {}),
  };
}

export function boot(): void {
  el("apply-context").addEventListener("click", () => {
    void session.selectContext(currentContext()).then(draw);
  });
  el("relearn").addEventListener("click", () => {
    void session.relearn().then(draw);
  });
  const search = el<HTMLInputElement>("search");
  search.addEventListener("change", () => {
    const matches = searchVariables(session.state.graph, search.value);
    if (matches.length > 0) void session.selectFault(matches[0]).then(draw);
  });
  draw();
}

boot();
