/**
 * Per-view session state. The server is authoritative: the view only ever
 * caches the latest frame, drops stale ones by sequence number, and echoes
 * a dragged node's position optimistically until the next frame confirms it.
 */

import { FramePayload, ServerMessage, SessionConfig } from "./protocol.js";

export class ViewState {
  session: string | null = null;
  config: SessionConfig | null = null;
  frame: FramePayload | null = null;
  doneReason: string | null = null;
  lastError: string | null = null;
  paused = false;

  private lastSeq = 0;
  private dragEcho: Map<string, [number, number]> = new Map();

  /** Route one server message; returns true when the view changed. */
  apply(msg: ServerMessage): boolean {
    if (msg.session !== undefined && this.session !== null && msg.session !== this.session) {
      return false; // some other view's session
    }
    if (msg.seq !== undefined) {
      if (msg.seq <= this.lastSeq) return false; // stale or duplicate
      this.lastSeq = msg.seq;
    }
    switch (msg.kind) {
      case "session.created":
        this.session = msg.session ?? null;
        this.config = msg.payload.config as SessionConfig;
        this.frame = null;
        this.doneReason = null;
        return true;
      case "frame": {
        const frame = msg.payload as unknown as FramePayload;
        // the frame is authoritative; confirmed drag echoes are dropped
        for (const [id, echo] of this.dragEcho) {
          const pos = frame.positions[id];
          if (pos && pos[0] === echo[0] && pos[1] === echo[1]) this.dragEcho.delete(id);
        }
        this.frame = frame;
        return true;
      }
      case "session.done":
        this.doneReason = String(msg.payload.reason ?? "done");
        return true;
      case "error":
        this.lastError = String(msg.payload.message ?? "unknown error");
        return true;
      default:
        return false;
    }
  }

  /** Rendered position: optimistic echo while dragging, else the frame. */
  positionOf(id: string): [number, number] | null {
    const echo = this.dragEcho.get(id);
    if (echo) return echo;
    const pos = this.frame?.positions[id];
    return pos ? [pos[0], pos[1]] : null;
  }

  nodeIds(): string[] {
    return this.frame ? Object.keys(this.frame.positions) : [];
  }

  isLocked(id: string): boolean {
    return this.frame ? this.frame.locked.includes(id) : false;
  }

  echoDrag(id: string, x: number, y: number): void {
    this.dragEcho.set(id, [x, y]);
  }

  clearEcho(id: string): void {
    this.dragEcho.delete(id);
  }
}

/** Selection shared across both linked views. */
export class Selection {
  private ids = new Set<string>();
  private listeners: Array<() => void> = [];

  toggle(id: string): void {
    if (this.ids.has(id)) this.ids.delete(id);
    else this.ids.add(id);
    this.notify();
  }

  clear(): void {
    if (this.ids.size === 0) return;
    this.ids.clear();
    this.notify();
  }

  has(id: string): boolean {
    return this.ids.has(id);
  }

  onChange(cb: () => void): void {
    this.listeners.push(cb);
  }

  private notify(): void {
    for (const cb of this.listeners) cb();
  }
}
