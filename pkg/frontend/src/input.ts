/**
 * Keyboard-to-driver-input mapping.
 *
 * Steering ramps to full lock over 0.5 s of holding left/right and decays
 * back to center over 0.3 s once released. Throttle and brake are held
 * values: 1 while the key is down, 0 otherwise (holding both sends both;
 * the vehicle model nets them out).
 */

import { InputFrame, inputFrame } from "./protocol.js";

export const STEER_RAMP_PER_S = 1.0 / 0.5; // full lock in 0.5 s
export const STEER_DECAY_PER_S = 1.0 / 0.3; // back to center in 0.3 s

const LEFT_KEYS = ["ArrowLeft", "a", "A"];
const RIGHT_KEYS = ["ArrowRight", "d", "D"];
const THROTTLE_KEYS = ["ArrowUp", "w", "W"];
const BRAKE_KEYS = ["ArrowDown", "s", "S"];

export const DRIVING_KEYS = [...LEFT_KEYS, ...RIGHT_KEYS, ...THROTTLE_KEYS, ...BRAKE_KEYS];

function clamp(v: number, lo: number, hi: number): number {
  return Math.max(lo, Math.min(hi, v));
}

export class KeyboardInput {
  private held = new Set<string>();
  steering = 0;

  keyDown(key: string): void {
    this.held.add(key);
  }

  keyUp(key: string): void {
    this.held.delete(key);
  }

  /** Drop all held keys and recenter (used on disconnect/blur). */
  reset(): void {
    this.held.clear();
    this.steering = 0;
  }

  private anyHeld(keys: string[]): boolean {
    return keys.some((k) => this.held.has(k));
  }

  /** Advance the steering ramp by dt seconds and build this tick's frame. */
  update(dt: number): InputFrame {
    const left = this.anyHeld(LEFT_KEYS);
    const right = this.anyHeld(RIGHT_KEYS);
    const direction = (left ? 1 : 0) - (right ? 1 : 0); // left is positive
    if (direction !== 0) {
      this.steering = clamp(this.steering + direction * STEER_RAMP_PER_S * dt, -1, 1);
    } else if (this.steering !== 0) {
      const decay = STEER_DECAY_PER_S * dt;
      this.steering =
        Math.abs(this.steering) <= decay
          ? 0
          : this.steering - Math.sign(this.steering) * decay;
    }
    const throttle = this.anyHeld(THROTTLE_KEYS) ? 1 : 0;
    const brake = this.anyHeld(BRAKE_KEYS) ? 1 : 0;
    return inputFrame(this.steering, throttle, brake);
  }
}
