/**
 * Cockpit state: the latest snapshot plus connection bookkeeping.
 *
 * The renderer only ever reads the latest snapshot. A connection that has
 * not delivered a snapshot for over a second counts as stale: the UI shows
 * the disconnected banner and the input sender zeroes its output.
 */

import { SnapshotFrame } from "./protocol.js";

export const STALE_AFTER_MS = 1000;

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export class UiState {
  snapshot: SnapshotFrame | null = null;
  status: ConnectionStatus = "connecting";
  lastError: string | null = null;
  private lastSnapshotMs = -Infinity;

  applySnapshot(frame: SnapshotFrame, nowMs: number): void {
    this.snapshot = frame;
    this.lastSnapshotMs = nowMs;
    this.status = "connected";
  }

  applyError(reason: string): void {
    this.lastError = reason;
  }

  setDisconnected(): void {
    this.status = "disconnected";
  }

  /** True when no snapshot has arrived within the stale window. */
  isStale(nowMs: number): boolean {
    return nowMs - this.lastSnapshotMs > STALE_AFTER_MS;
  }

  /** The question to show in the distraction modal, if a ring is pending. */
  pendingQuestion(): string | null {
    return this.snapshot?.phone.pending_question ?? null;
  }
}
