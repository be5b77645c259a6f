/**
 * Wire types for the cockpit WebSocket (ws://HOST:47010/drive).
 *
 * Mirrors the simulator bridge: snapshot frames arrive at 20 Hz, input
 * frames go back with last-writer-wins semantics per simulator tick.
 * Unknown fields in an input frame are rejected by the bridge, so the
 * builders here emit exactly the allowed keys.
 */

export interface NearestEntry {
  object_id: number;
  range: number;
  azimuth: number; // rad, body frame, positive left
}

export interface SnapshotFrame {
  type: "snapshot";
  t_us: number;
  vehicle: { x: number; y: number; heading: number; speed: number };
  attitude: { pitch: number; roll: number; yaw: number; heave: number };
  safety: {
    gate_closed: boolean;
    seatbelt_on: boolean;
    estop_local: boolean;
    estop_remote: boolean;
    motion_enabled: boolean;
  };
  shake_active: boolean;
  nearest: {
    front: NearestEntry | null;
    left: NearestEntry | null;
    right: NearestEntry | null;
  };
  lane_index: number; // -1 = off road
  center_offset: number;
  touch: [boolean, boolean, boolean, boolean];
  phone: { last_kind: string | null; pending_question: string | null };
}

export interface ErrorFrame {
  type: "error";
  reason: string;
}

export type ServerFrame = SnapshotFrame | ErrorFrame;

export type PhoneAck = "pickup" | "touchscreen" | "putdown";

export interface InputFrame {
  type: "input";
  steering: number; // [-1, 1], positive = left
  throttle: number; // [0, 1]
  brake: number; // [0, 1]
  gate_closed?: boolean;
  seatbelt_on?: boolean;
  estop_local?: boolean;
  estop_remote?: boolean;
  phone_ack?: PhoneAck;
}

export function isSnapshot(obj: unknown): obj is SnapshotFrame {
  if (typeof obj !== "object" || obj === null) return false;
  const o = obj as Record<string, unknown>;
  return (
    o.type === "snapshot" &&
    typeof o.t_us === "number" &&
    typeof o.vehicle === "object" &&
    typeof o.attitude === "object" &&
    typeof o.safety === "object" &&
    typeof o.shake_active === "boolean" &&
    typeof o.nearest === "object" &&
    typeof o.lane_index === "number" &&
    Array.isArray(o.touch) &&
    (o.touch as unknown[]).length === 4
  );
}

export function isErrorFrame(obj: unknown): obj is ErrorFrame {
  if (typeof obj !== "object" || obj === null) return false;
  const o = obj as Record<string, unknown>;
  return o.type === "error" && typeof o.reason === "string";
}

/** Build a plain driving input frame (channels already in range). */
export function inputFrame(steering: number, throttle: number, brake: number): InputFrame {
  return { type: "input", steering, throttle, brake };
}
