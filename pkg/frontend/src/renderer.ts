/**
 * Canvas rendering for one view: edges, index-colored nodes, lock rings and
 * the shared selection highlight. World coordinates come straight from the
 * server frames; the renderer only fits them to the canvas.
 */

import { indexColors } from "./colors.js";
import { Selection, ViewState } from "./view.js";

export class CanvasRenderer {
  nodeRadius = 6;

  private canvas: HTMLCanvasElement;
  private ctx: CanvasRenderingContext2D;
  private edges: Array<[string, string]> = [];
  private colors = new Map<string, string>();
  private scale = 1;
  private offset: [number, number] = [0, 0];

  constructor(canvas: HTMLCanvasElement) {
    this.canvas = canvas;
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("2d canvas context unavailable");
    this.ctx = ctx;
  }

  setGraph(labels: string[], edges: Array<[string, string]>): void {
    this.edges = edges;
    this.colors.clear();
    const palette = indexColors(labels.length);
    labels.forEach((label, i) => this.colors.set(label, palette[i]));
  }

  /** Canvas pixel -> world coordinates (for hit tests and drags). */
  toWorld(px: number, py: number): [number, number] {
    return [(px - this.offset[0]) / this.scale, (py - this.offset[1]) / this.scale];
  }

  nodeAt(view: ViewState, px: number, py: number): string | null {
    const [wx, wy] = this.toWorld(px, py);
    const rWorld = (this.nodeRadius + 4) / this.scale;
    let best: string | null = null;
    let bestDist = rWorld;
    for (const id of view.nodeIds()) {
      const pos = view.positionOf(id);
      if (!pos) continue;
      const d = Math.hypot(pos[0] - wx, pos[1] - wy);
      if (d <= bestDist) {
        best = id;
        bestDist = d;
      }
    }
    return best;
  }

  render(view: ViewState, selection: Selection): void {
    const { ctx, canvas } = this;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const ids = view.nodeIds();
    if (ids.length === 0) return;

    this.fit(view, ids);
    ctx.lineWidth = 1;
    for (const [a, b] of this.edges) {
      const pa = view.positionOf(a);
      const pb = view.positionOf(b);
      if (!pa || !pb) continue;
      const highlight = selection.has(a) || selection.has(b);
      ctx.strokeStyle = highlight ? "#ffd166" : "#44546a";
      ctx.beginPath();
      ctx.moveTo(...this.toScreen(pa));
      ctx.lineTo(...this.toScreen(pb));
      ctx.stroke();
    }

    for (const id of ids) {
      const pos = view.positionOf(id);
      if (!pos) continue;
      const [sx, sy] = this.toScreen(pos);
      ctx.beginPath();
      ctx.arc(sx, sy, this.nodeRadius, 0, 2 * Math.PI);
      ctx.fillStyle = this.colors.get(id) ?? "#999";
      ctx.fill();
      if (view.isLocked(id)) {
        ctx.strokeStyle = "#ffffff";
        ctx.lineWidth = 2;
        ctx.stroke();
        ctx.lineWidth = 1;
      }
      if (selection.has(id)) {
        ctx.beginPath();
        ctx.arc(sx, sy, this.nodeRadius + 3, 0, 2 * Math.PI);
        ctx.strokeStyle = "#ffd166";
        ctx.lineWidth = 2;
        ctx.stroke();
        ctx.lineWidth = 1;
      }
    }
  }

  private toScreen(pos: [number, number]): [number, number] {
    return [pos[0] * this.scale + this.offset[0], pos[1] * this.scale + this.offset[1]];
  }

  private fit(view: ViewState, ids: string[]): void {
    let minX = Infinity;
    let minY = Infinity;
    let maxX = -Infinity;
    let maxY = -Infinity;
    for (const id of ids) {
      const pos = view.positionOf(id);
      if (!pos) continue;
      minX = Math.min(minX, pos[0]);
      maxX = Math.max(maxX, pos[0]);
      minY = Math.min(minY, pos[1]);
      maxY = Math.max(maxY, pos[1]);
    }
    const margin = 24;
    const w = Math.max(maxX - minX, 1e-6);
    const h = Math.max(maxY - minY, 1e-6);
    this.scale = Math.min(
      (this.canvas.width - 2 * margin) / w,
      (this.canvas.height - 2 * margin) / h,
    );
    this.offset = [
      margin - minX * this.scale + (this.canvas.width - 2 * margin - w * this.scale) / 2,
      margin - minY * this.scale + (this.canvas.height - 2 * margin - h * this.scale) / 2,
    ];
  }
}
