/** Wire protocol types and message classification (schema version 1). */

export const PROTOCOL_VERSION = 1;

export interface AgentPose {
  x: number;
  y: number;
  psi: number;
}

export interface Frame {
  type: "frame";
  v: number;
  t: number;
  agents: AgentPose[];
  evader: { x: number; y: number };
  d_cap: number;
  q: number | null;
  outcome: "running" | "captured" | "timeout";
}

export interface MoveMessage {
  type: "move";
  dir: [number, number];
  seq: number;
}

export type Outgoing =
  | MoveMessage
  | { type: "pause" }
  | { type: "reset"; seed: number };

export type Incoming =
  | { kind: "frame"; frame: Frame }
  | { kind: "ack"; payload: Record<string, unknown> }
  | { kind: "server_error"; message: string }
  | { kind: "version_mismatch"; got: unknown }
  | { kind: "garbage"; message: string };

function isPose(value: unknown): value is AgentPose {
  const p = value as AgentPose;
  return (
    typeof p === "object" && p !== null &&
    typeof p.x === "number" && typeof p.y === "number" && typeof p.psi === "number"
  );
}

export function isFrame(value: unknown): value is Frame {
  const f = value as Frame;
  return (
    typeof f === "object" && f !== null &&
    f.type === "frame" &&
    typeof f.t === "number" &&
    Array.isArray(f.agents) && f.agents.every(isPose) &&
    typeof f.evader === "object" && f.evader !== null &&
    typeof f.evader.x === "number" && typeof f.evader.y === "number" &&
    typeof f.d_cap === "number" &&
    (f.q === null || typeof f.q === "number") &&
    (f.outcome === "running" || f.outcome === "captured" || f.outcome === "timeout")
  );
}

/** Sort one raw websocket payload into frame / ack / error buckets. */
export function classifyMessage(raw: string): Incoming {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch (err) {
    return { kind: "garbage", message: `not JSON: ${String(err)}` };
  }
  const obj = data as Record<string, unknown>;
  if (typeof obj !== "object" || obj === null || typeof obj.type !== "string") {
    return { kind: "garbage", message: "missing type field" };
  }
  if (obj.type === "frame") {
    if (obj.v !== PROTOCOL_VERSION) {
      return { kind: "version_mismatch", got: obj.v };
    }
    if (isFrame(obj)) {
      return { kind: "frame", frame: obj };
    }
    return { kind: "garbage", message: "malformed frame" };
  }
  if (obj.type === "error") {
    return { kind: "server_error", message: String(obj.message ?? "unknown error") };
  }
  return { kind: "ack", payload: obj };
}
