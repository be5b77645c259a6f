/**
 * Canvas rendering: ego-centric plan view plus the platform attitude gauge.
 *
 * The plan view is heading-up with the vehicle fixed near the bottom. The
 * road corridor is placed from the snapshot's center offset (the snapshot
 * carries no survey geometry, so the corridor is drawn as a two-lane band
 * of the conventional 3.5 m width); detected objects come from the
 * nearest front/left/right entries in body-frame polar coordinates.
 * Colors follow the analysis plot: black curbs, yellow lane lines, blue
 * vehicle path items, objects red/blue/light-blue by detecting sensor.
 */

import { NearestEntry, SnapshotFrame } from "./protocol.js";

export const COLORS = {
  black: "#000000",
  yellow: "#E6C800",
  blue: "#1F4FFF",
  lightBlue: "#7FB2FF",
  red: "#D62728",
  grass: "#2a3326",
  asphalt: "#3c3f41",
};

const LANE_WIDTH = 3.5; // m, display convention for the corridor band
const PX_PER_M = 7;
const SENSOR_COLORS: [keyof SnapshotFrame["nearest"], string][] = [
  ["front", COLORS.red],
  ["left", COLORS.blue],
  ["right", COLORS.lightBlue],
];

/** Vehicle box color by lane parity, matching the analysis plot. */
export function laneColor(laneIndex: number): string {
  return laneIndex >= 0 && laneIndex % 2 === 1 ? COLORS.lightBlue : COLORS.blue;
}

/** Body frame (x forward, y left) to canvas offsets for a heading-up view. */
export function bodyToScreen(bx: number, by: number): { dx: number; dy: number } {
  return { dx: -by * PX_PER_M, dy: -bx * PX_PER_M };
}

export function drawPlanView(
  ctx: CanvasRenderingContext2D,
  snapshot: SnapshotFrame,
  width: number,
  height: number,
): void {
  ctx.fillStyle = COLORS.grass;
  ctx.fillRect(0, 0, width, height);
  const egoX = width / 2;
  const egoY = height * 0.72;

  // road corridor: center line sits center_offset metres to our left
  const roadCenterX = egoX - snapshot.center_offset * PX_PER_M;
  const half = LANE_WIDTH * PX_PER_M;
  ctx.fillStyle = COLORS.asphalt;
  ctx.fillRect(roadCenterX - half, 0, 2 * half, height);

  ctx.lineWidth = 3;
  ctx.strokeStyle = COLORS.black;
  for (const side of [-1, 1]) {
    ctx.beginPath();
    ctx.moveTo(roadCenterX + side * half, 0);
    ctx.lineTo(roadCenterX + side * half, height);
    ctx.stroke();
  }
  ctx.strokeStyle = COLORS.yellow;
  ctx.lineWidth = 2;
  ctx.setLineDash([14, 10]);
  ctx.beginPath();
  ctx.moveTo(roadCenterX, 0);
  ctx.lineTo(roadCenterX, height);
  ctx.stroke();
  ctx.setLineDash([]);

  // detections: rays and markers per sensor
  for (const [sensor, color] of SENSOR_COLORS) {
    const entry: NearestEntry | null = snapshot.nearest[sensor];
    if (!entry) continue;
    const bx = entry.range * Math.cos(entry.azimuth);
    const by = entry.range * Math.sin(entry.azimuth);
    const { dx, dy } = bodyToScreen(bx, by);
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.setLineDash([6, 4]);
    ctx.beginPath();
    ctx.moveTo(egoX, egoY);
    ctx.lineTo(egoX + dx, egoY + dy);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = color;
    ctx.beginPath();
    ctx.arc(egoX + dx, egoY + dy, 7, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#ffffff";
    ctx.font = "11px sans-serif";
    ctx.fillText(`#${entry.object_id} ${entry.range.toFixed(0)}m`, egoX + dx + 10, egoY + dy);
  }

  // ego vehicle, heading-up
  ctx.save();
  ctx.translate(egoX, egoY);
  ctx.fillStyle = laneColor(snapshot.lane_index);
  ctx.strokeStyle = COLORS.black;
  ctx.lineWidth = 1;
  const w = 1.8 * PX_PER_M;
  const l = 4.5 * PX_PER_M;
  ctx.fillRect(-w / 2, -l / 2, w, l);
  ctx.strokeRect(-w / 2, -l / 2, w, l);
  ctx.restore();
}

export function drawAttitude(
  ctx: CanvasRenderingContext2D,
  snapshot: SnapshotFrame,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const axes: [string, number, number][] = [
    ["pitch", snapshot.attitude.pitch, 0.3491],
    ["roll", snapshot.attitude.roll, 0.3491],
    ["yaw", snapshot.attitude.yaw, Math.PI],
    ["heave", snapshot.attitude.heave, 0.1],
  ];
  const rowH = height / axes.length;
  axes.forEach(([name, value, limit], i) => {
    const y = i * rowH + rowH / 2;
    ctx.strokeStyle = "#555";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(60, y);
    ctx.lineTo(width - 10, y);
    ctx.stroke();
    const mid = (60 + width - 10) / 2;
    const span = (width - 70) / 2;
    const frac = Math.max(-1, Math.min(1, value / limit));
    ctx.fillStyle = snapshot.safety.motion_enabled ? COLORS.lightBlue : "#777";
    ctx.beginPath();
    ctx.arc(mid + frac * span, y, 6, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#ddd";
    ctx.font = "12px sans-serif";
    ctx.fillText(name, 8, y + 4);
  });
}
