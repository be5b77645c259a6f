/**
 * Cockpit entry point: wires the socket, keyboard, panels, and render loop.
 *
 * Input frames go out on a 20 ms timer (50 Hz, comfortably above the 20 Hz
 * snapshot rate); rendering runs at the browser frame rate from the latest
 * snapshot only.
 */

import { DRIVING_KEYS, KeyboardInput } from "./input.js";
import { InputFrame, PhoneAck } from "./protocol.js";
import { drawAttitude, drawPlanView } from "./render.js";
import { CockpitSocket } from "./socket.js";
import { UiState } from "./state.js";

const INPUT_PERIOD_MS = 20;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function wsUrl(): string {
  const params = new URLSearchParams(location.search);
  const host = params.get("host") ?? location.hostname ?? "127.0.0.1";
  const port = params.get("port") ?? "47010";
  return `ws://${host}:${port}/drive`;
}

function main(): void {
  const state = new UiState();
  const keyboard = new KeyboardInput();
  const planCanvas = el<HTMLCanvasElement>("plan");
  const attitudeCanvas = el<HTMLCanvasElement>("attitude");
  const planCtx = planCanvas.getContext("2d")!;
  const attitudeCtx = attitudeCanvas.getContext("2d")!;

  const socket = new CockpitSocket(wsUrl(), {
    onSnapshot: (frame) => state.applySnapshot(frame, performance.now()),
    onError: (reason) => state.applyError(reason),
    onStatusChange: (connected) => {
      if (!connected) {
        state.setDisconnected();
        keyboard.reset();
      }
    },
  });
  socket.connect();

  // pending toggle/ack fields ride along on the next input frame
  let pending: Partial<InputFrame> = {};

  function queueToggle(fields: Partial<InputFrame>): void {
    pending = { ...pending, ...fields };
  }

  function sendAck(ack: PhoneAck): void {
    queueToggle({ phone_ack: ack });
  }

  window.addEventListener("keydown", (e) => {
    if (DRIVING_KEYS.includes(e.key)) {
      keyboard.keyDown(e.key);
      e.preventDefault();
    }
  });
  window.addEventListener("keyup", (e) => {
    if (DRIVING_KEYS.includes(e.key)) keyboard.keyUp(e.key);
  });
  window.addEventListener("blur", () => keyboard.reset());

  el<HTMLButtonElement>("estop").onclick = () => queueToggle({ estop_remote: true });
  el<HTMLButtonElement>("estop-clear").onclick = () => queueToggle({ estop_remote: false });
  const gate = el<HTMLInputElement>("gate");
  const belt = el<HTMLInputElement>("belt");
  gate.onchange = () => queueToggle({ gate_closed: gate.checked });
  belt.onchange = () => queueToggle({ seatbelt_on: belt.checked });

  const modal = el<HTMLDivElement>("phone-modal");
  const questionEl = el<HTMLParagraphElement>("phone-question");
  const answerEl = el<HTMLInputElement>("phone-answer");
  let phoneStage: "idle" | "picked" = "idle";
  el<HTMLButtonElement>("phone-pickup").onclick = () => {
    sendAck("pickup");
    phoneStage = "picked";
    answerEl.disabled = false;
    answerEl.focus();
  };
  answerEl.oninput = () => {
    if (phoneStage === "picked") sendAck("touchscreen");
  };
  el<HTMLButtonElement>("phone-putdown").onclick = () => {
    if (phoneStage === "picked") sendAck("putdown");
    phoneStage = "idle";
    answerEl.value = "";
    answerEl.disabled = true;
  };

  setInterval(() => {
    const stale = state.isStale(performance.now());
    if (stale) keyboard.reset();
    const frame = keyboard.update(INPUT_PERIOD_MS / 1000);
    const outgoing = stale ? { ...frame, steering: 0, throttle: 0, brake: 0 } : frame;
    socket.send({ ...outgoing, ...pending });
    pending = {};
  }, INPUT_PERIOD_MS);

  const banner = el<HTMLDivElement>("banner");
  const hud = el<HTMLDivElement>("hud");
  const touchCells = [1, 2, 3, 4].map((q) => el<HTMLDivElement>(`touch-q${q}`));

  function render(): void {
    const now = performance.now();
    banner.hidden = !state.isStale(now);
    const snap = state.snapshot;
    if (snap) {
      drawPlanView(planCtx, snap, planCanvas.width, planCanvas.height);
      drawAttitude(attitudeCtx, snap, attitudeCanvas.width, attitudeCanvas.height);
      const kmh = snap.vehicle.speed * 3.6;
      const lane = snap.lane_index < 0 ? "OFF ROAD" : `lane ${snap.lane_index}`;
      hud.textContent =
        `${kmh.toFixed(0)} km/h   ${lane}   ` +
        `motion ${snap.safety.motion_enabled ? "ENABLED" : "off"}` +
        (snap.shake_active ? "   COLLISION" : "");
      document.body.classList.toggle("shaking", snap.shake_active);
      snap.touch.forEach((on, i) => touchCells[i].classList.toggle("on", on));
      const question = snap.phone.pending_question;
      modal.hidden = question === null;
      if (question !== null) questionEl.textContent = question;
    }
    requestAnimationFrame(render);
  }
  requestAnimationFrame(render);
}

main();
