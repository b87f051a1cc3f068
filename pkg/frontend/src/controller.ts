/**
 * Steering controller: turns UI intents into protocol messages for one
 * session and keeps that session's ViewState in sync with the replies.
 *
 * Dragging emits node.move plus node.lock while held; on release the node
 * stays locked when sticky-lock is on, otherwise node.unlock follows.
 * Weight sliders always transmit a renormalized simplex.
 */

import { ClientKind, decode, encode } from "./protocol.js";
import { ViewState } from "./view.js";

export interface Transport {
  send(line: string): void;
}

export interface CreateOptions {
  algorithm: string;
  seed: number;
  graph?: string; // bundled corpus name
  edgeList?: string;
  graphJson?: string;
  overrides?: Record<string, unknown>;
  frameEvery?: number;
  throttleMs?: number;
  paused?: boolean;
}

export function renormalizeWeights(raw: number[]): number[] {
  const clipped = raw.map((w) => (Number.isFinite(w) && w > 0 ? w : 0));
  const total = clipped.reduce((a, b) => a + b, 0);
  if (total <= 0) return raw.map(() => 1 / raw.length);
  const weights = clipped.map((w) => w / total);
  // push rounding residue into the largest entry so the sum is exactly 1
  const sum = weights.reduce((a, b) => a + b, 0);
  const imax = weights.indexOf(Math.max(...weights));
  weights[imax] += 1 - sum;
  return weights;
}

export class SessionController {
  readonly view: ViewState;
  stickyLock = true;

  private transport: Transport;
  private dragged: string | null = null;

  constructor(transport: Transport, view: ViewState) {
    this.transport = transport;
    this.view = view;
  }

  /** Feed one raw server line; returns whether this view consumed it. */
  handleLine(line: string): boolean {
    return this.view.apply(decode(line));
  }

  create(opts: CreateOptions): void {
    const payload: Record<string, unknown> = {
      algorithm: opts.algorithm,
      seed: opts.seed,
      paused: opts.paused ?? false,
    };
    if (opts.graph !== undefined) payload.graph = opts.graph;
    if (opts.edgeList !== undefined) payload.edge_list = opts.edgeList;
    if (opts.graphJson !== undefined) payload.graph_json = opts.graphJson;
    if (opts.overrides !== undefined) payload.overrides = opts.overrides;
    if (opts.frameEvery !== undefined) payload.frame_every = opts.frameEvery;
    if (opts.throttleMs !== undefined) payload.throttle_ms = opts.throttleMs;
    this.view.paused = payload.paused as boolean;
    this.send("session.create", payload);
  }

  pause(): void {
    this.view.paused = true;
    this.sendScoped("control.pause", {});
  }

  resume(): void {
    this.view.paused = false;
    this.sendScoped("control.resume", {});
  }

  stepOnce(): void {
    this.sendScoped("control.step", {});
  }

  reset(): void {
    this.sendScoped("session.reset", {});
  }

  lock(id: string): void {
    this.sendScoped("node.lock", { id });
  }

  unlock(id: string): void {
    this.sendScoped("node.unlock", { id });
  }

  setParam(name: string, value: unknown): void {
    this.sendScoped("param.set", { name, value });
  }

  /** Slider values may be arbitrary; what goes on the wire sums to 1. */
  setWeights(raw: number[]): number[] {
    const weights = renormalizeWeights(raw);
    this.setParam("weights", weights);
    return weights;
  }

  beginDrag(id: string): void {
    this.dragged = id;
    this.lock(id); // held nodes do not fight the agents
  }

  dragTo(x: number, y: number): void {
    if (this.dragged === null) return;
    this.view.echoDrag(this.dragged, x, y);
    this.sendScoped("node.move", { id: this.dragged, x, y });
  }

  endDrag(): void {
    if (this.dragged === null) return;
    const id = this.dragged;
    this.dragged = null;
    if (!this.stickyLock) {
      this.view.clearEcho(id);
      this.unlock(id);
    }
    // with sticky-lock the node stays locked (and therefore stationary)
  }

  get draggingNode(): string | null {
    return this.dragged;
  }

  private send(kind: ClientKind, payload: Record<string, unknown>): void {
    this.transport.send(encode(kind, payload));
  }

  private sendScoped(kind: ClientKind, payload: Record<string, unknown>): void {
    if (this.view.session === null) return;
    this.transport.send(encode(kind, payload, this.view.session));
  }
}
