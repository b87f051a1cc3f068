/**
 * Dual-view steering UI: two live sessions on the same graph and seed
 * (typically one learned, one for comparison), linked selection, a
 * statistics panel per view, and a shared parameter panel.
 */

import { SessionController } from "./controller.js";
import { FramePayload, SessionConfig } from "./protocol.js";
import { CanvasRenderer } from "./renderer.js";
import { Selection, ViewState } from "./view.js";

const ALGORITHMS = [
  "marl-fr", "marl-dgc", "marl-local-stress", "marl-global-stress",
  "marl-hybrid", "marl-custom",
];

interface Panel {
  controller: SessionController;
  renderer: CanvasRenderer;
  stats: HTMLElement;
  algoSelect: HTMLSelectElement;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function fmt(x: number | null | undefined, digits = 3): string {
  return x === null || x === undefined ? "-" : x.toFixed(digits);
}

function statsHtml(config: SessionConfig | null, frame: FramePayload | null,
                   done: string | null): string {
  if (!config) return "no session";
  const head = `<b>${config.algorithm}</b> seed=${config.seed} n=${config.n} m=${config.m}`;
  if (!frame) return head;
  const m = frame.metrics;
  const tail = done ? ` <span class="done">converged: ${done}</span>` : "";
  return `${head}<br>t=${frame.t} T=${fmt(frame.temperature, 2)}px ` +
    `A=${fmt(frame.avg_displacement, 2)} dA=${fmt(frame.displacement_rate, 2)} ` +
    `dE=${fmt(frame.stress_ratio, 5)}<br>` +
    `NC=${fmt(m.nc)} NO=${fmt(m.no)} NE=${fmt(m.ne)} NA=${fmt(m.na)}${tail}`;
}

function buildPanel(side: "left" | "right", ws: WebSocket, selection: Selection): Panel {
  const canvas = el<HTMLCanvasElement>(`${side}-canvas`);
  const renderer = new CanvasRenderer(canvas);
  const view = new ViewState();
  const controller = new SessionController({ send: (line) => ws.send(line) }, view);
  const stats = el(`${side}-stats`);

  canvas.addEventListener("pointerdown", (ev) => {
    const id = renderer.nodeAt(view, ev.offsetX, ev.offsetY);
    if (id === null) {
      selection.clear();
      return;
    }
    if (ev.shiftKey) {
      selection.toggle(id);
      return;
    }
    controller.beginDrag(id);
    canvas.setPointerCapture(ev.pointerId);
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (controller.draggingNode === null) return;
    const [x, y] = renderer.toWorld(ev.offsetX, ev.offsetY);
    controller.dragTo(x, y);
  });
  const release = () => controller.endDrag();
  canvas.addEventListener("pointerup", release);
  canvas.addEventListener("pointercancel", release);

  el<HTMLButtonElement>(`${side}-pause`).onclick = () => controller.pause();
  el<HTMLButtonElement>(`${side}-resume`).onclick = () => controller.resume();
  el<HTMLButtonElement>(`${side}-step`).onclick = () => controller.stepOnce();
  el<HTMLButtonElement>(`${side}-reset`).onclick = () => controller.reset();

  return { controller, renderer, stats, algoSelect: el(`${side}-algo`) };
}

function main(): void {
  const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
  const ws = new WebSocket(wsUrl);
  const selection = new Selection();
  const panels: Panel[] = [];

  for (const side of ["left", "right"] as const) {
    const select = el<HTMLSelectElement>(`${side}-algo`);
    for (const algo of ALGORITHMS) {
      const opt = document.createElement("option");
      opt.value = algo;
      opt.textContent = algo;
      select.appendChild(opt);
    }
  }
  el<HTMLSelectElement>("left-algo").value = "marl-fr";
  el<HTMLSelectElement>("right-algo").value = "marl-hybrid";

  ws.onopen = () => {
    panels.push(buildPanel("left", ws, selection));
    panels.push(buildPanel("right", ws, selection));
    el<HTMLButtonElement>("start").disabled = false;
    el("status").textContent = "connected";
  };
  ws.onclose = () => (el("status").textContent = "disconnected");

  ws.onmessage = (ev) => {
    for (const panel of panels) {
      if (!panel.controller.handleLine(String(ev.data))) continue;
      const view = panel.controller.view;
      if (view.config && view.frame === null) {
        const cfg = view.config as SessionConfig & {
          labels: string[];
          edges: Array<[string, string]>;
        };
        panel.renderer.setGraph(cfg.labels, cfg.edges);
      }
      panel.renderer.render(view, selection);
      panel.stats.innerHTML = statsHtml(view.config, view.frame, view.doneReason);
      if (view.lastError) {
        el("status").textContent = `server: ${view.lastError}`;
        view.lastError = null;
      }
      break; // a message belongs to exactly one session
    }
  };
  selection.onChange(() => {
    for (const panel of panels) panel.renderer.render(panel.controller.view, selection);
  });

  el<HTMLButtonElement>("start").onclick = () => {
    const seed = Number(el<HTMLInputElement>("seed").value) || 0;
    const graphName = el<HTMLSelectElement>("graph").value;
    const pasted = el<HTMLTextAreaElement>("graph-input").value.trim();
    for (const panel of panels) {
      const opts = {
        algorithm: panel.algoSelect.value,
        seed, // both views share graph and seed for comparability
        frameEvery: 2,
        throttleMs: 25,
        ...(pasted
          ? pasted.startsWith("{") ? { graphJson: pasted } : { edgeList: pasted }
          : { graph: graphName }),
      };
      panel.controller.create(opts);
    }
  };

  const sticky = el<HTMLInputElement>("sticky-lock");
  sticky.onchange = () => panels.forEach((p) => (p.controller.stickyLock = sticky.checked));

  el<HTMLInputElement>("node-size").oninput = (ev) => {
    const radius = Number((ev.target as HTMLInputElement).value);
    for (const panel of panels) {
      panel.renderer.nodeRadius = radius;
      // overlap metrics re-score live with the new radius
      panel.controller.setParam("node_radius", Math.max(1, radius * 2));
      panel.renderer.render(panel.controller.view, selection);
    }
  };

  el<HTMLInputElement>("epsilon").oninput = (ev) => {
    const eps = Number((ev.target as HTMLInputElement).value);
    el("epsilon-value").textContent = eps.toFixed(2);
    panels.forEach((p) => p.controller.setParam("epsilon", eps));
  };
  el<HTMLInputElement>("beta").oninput = (ev) => {
    const beta = Number((ev.target as HTMLInputElement).value);
    el("beta-value").textContent = beta.toFixed(2);
    panels.forEach((p) => p.controller.setParam("beta", beta));
  };

  const weightIds = ["w1", "w2", "w3", "w4", "w5"];
  const onWeights = () => {
    const raw = weightIds.map((id) => Number(el<HTMLInputElement>(id).value));
    const weights = panels.length
      ? panels.map((p) => p.controller.setWeights(raw))[0]
      : raw;
    el("weights-value").textContent = weights.map((w) => w.toFixed(2)).join(" / ");
  };
  for (const id of weightIds) el<HTMLInputElement>(id).oninput = onWeights;
}

main();
