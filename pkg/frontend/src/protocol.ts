/**
 * Wire protocol shared with the session server: JSON messages, one per
 * websocket text frame. Server messages carry a per-session strictly
 * increasing `seq`; anything arriving out of order is dropped by the view.
 */

export const PROTOCOL_VERSION = 1;

export type ClientKind =
  | "session.create"
  | "control.pause"
  | "control.resume"
  | "control.step"
  | "node.lock"
  | "node.unlock"
  | "node.move"
  | "param.set"
  | "session.reset"
  | "ping";

export type ServerKind = "session.created" | "frame" | "session.done" | "error" | "pong";

export interface Metrics {
  nc: number;
  no: number;
  ne: number;
  na: number;
}

export interface FramePayload {
  t: number;
  temperature: number;
  frame: number;
  positions: Record<string, [number, number]>;
  locked: string[];
  avg_displacement: number | null;
  displacement_rate: number | null;
  stress_ratio: number | null;
  metrics: Metrics;
  config: {
    epsilon: number;
    alpha: number;
    gamma: number;
    beta: number;
    weights: number[];
    node_radius: number;
  };
}

export interface SessionConfig {
  algorithm: string;
  seed: number;
  n: number;
  m: number;
  [key: string]: unknown;
}

export interface ServerMessage {
  protocol: number;
  kind: ServerKind;
  session?: string;
  seq?: number;
  payload: Record<string, unknown>;
}

export function encode(
  kind: ClientKind,
  payload?: Record<string, unknown>,
  session?: string,
): string {
  const doc: Record<string, unknown> = { protocol: PROTOCOL_VERSION, kind };
  if (session !== undefined) doc.session = session;
  if (payload !== undefined) doc.payload = payload;
  return JSON.stringify(doc);
}

const SERVER_KINDS: ReadonlySet<string> = new Set([
  "session.created",
  "frame",
  "session.done",
  "error",
  "pong",
]);

export function decode(line: string): ServerMessage {
  let doc: unknown;
  try {
    doc = JSON.parse(line);
  } catch (err) {
    throw new Error(`invalid JSON from server: ${err}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new Error("server message must be an object");
  }
  const msg = doc as ServerMessage;
  if (!SERVER_KINDS.has(msg.kind)) {
    throw new Error(`unknown server message kind: ${String(msg.kind)}`);
  }
  if (msg.payload === undefined) msg.payload = {};
  return msg;
}
