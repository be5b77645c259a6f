/**
 * WebSocket client for the cockpit bridge with automatic reconnect
 * (1 s fixed backoff; the bridge is expected to be on the same machine).
 */

import { InputFrame, isErrorFrame, isSnapshot, SnapshotFrame } from "./protocol.js";

export interface SocketCallbacks {
  onSnapshot(frame: SnapshotFrame): void;
  onError(reason: string): void;
  onStatusChange(connected: boolean): void;
}

export class CockpitSocket {
  private ws: WebSocket | null = null;
  private closed = false;

  constructor(private url: string, private callbacks: SocketCallbacks) {}

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => this.callbacks.onStatusChange(true);
    ws.onmessage = (event) => {
      let parsed: unknown;
      try {
        parsed = JSON.parse(String(event.data));
      } catch {
        return;
      }
      if (isSnapshot(parsed)) this.callbacks.onSnapshot(parsed);
      else if (isErrorFrame(parsed)) this.callbacks.onError(parsed.reason);
    };
    ws.onclose = () => {
      this.callbacks.onStatusChange(false);
      if (!this.closed) setTimeout(() => this.open(), 1000);
    };
    ws.onerror = () => ws.close();
  }

  send(frame: InputFrame): boolean {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(frame));
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
