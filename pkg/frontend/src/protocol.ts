/**
 * Wire protocol types and message construction for the operator console.
 *
 * One JSON object per WebSocket text frame: a type tag, per-sender
 * sequence number, timestamp and typed payload. The console only ever
 * emits `auth` and `referee` messages; everything else is inbound.
 */

export type Team = "green" | "blue";

export interface Envelope<T = unknown> {
  type: string;
  seq: number;
  t: number;
  data: T;
}

export interface RobotDetection {
  team: Team;
  number: number;
  x: number;
  y: number;
  theta: number;
}

export interface DetectionData {
  frame: number;
  robots: RobotDetection[];
  ball: { x: number; y: number } | null;
  calibration_ok: boolean;
}

export interface GameStateData {
  phase: "idle" | "placement" | "running" | "halftime" | "finished";
  score: { green: number; blue: number };
  clock: number;
  half: number;
  sides: { green: number; blue: number };
  goal_pending: boolean;
  penalties: [string, number, number][];
  preempted: [string, number][];
  hold: [string, number, number][];
}

export interface HelloData {
  version: number;
  team_size: number;
  field: { length: number; width: number; goal_width: number; margin: number };
  rates: { detection_hz: number; physics_hz: number };
}

export interface GoalData {
  team: Team;
  t: number;
  x: number;
  y: number;
}

export interface AckData {
  ack_of: number;
  info?: Record<string, unknown>;
}

export interface NackData {
  nack_of: number;
  reason: string;
  detail?: string;
}

export type RefereeAction =
  | { action: "engage" | "run" | "halftime" | "swap" | "end" }
  | { action: "preempt" | "release"; team: Team; number: number }
  | { action: "teleport_robot"; team: Team; number: number; x: number; y: number; theta: number }
  | { action: "teleport_ball"; x: number; y: number };

/** Outbound message factory keeping the per-sender sequence. */
export class MessageWriter {
  private seq = 0;
  private now: () => number;

  constructor(now: () => number = () => 0) {
    this.now = now;
  }

  auth(key: string): Envelope<{ key: string }> {
    return this.wrap("auth", { key });
  }

  referee(action: RefereeAction): Envelope<RefereeAction> {
    return this.wrap("referee", action);
  }

  private wrap<T>(type: string, data: T): Envelope<T> {
    this.seq += 1;
    return { type, seq: this.seq, t: this.now(), data };
  }
}

export function encode(msg: Envelope): string {
  return JSON.stringify(msg);
}

export function decode(text: string): Envelope {
  const obj = JSON.parse(text) as unknown;
  if (
    typeof obj !== "object" || obj === null ||
    typeof (obj as Envelope).type !== "string" ||
    typeof (obj as Envelope).seq !== "number" ||
    typeof (obj as Envelope).t !== "number" ||
    typeof (obj as Envelope).data !== "object"
  ) {
    throw new Error("malformed wire message");
  }
  return obj as Envelope;
}
