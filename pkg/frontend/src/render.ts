/** Immediate-mode canvas rendering: arena, oriented pursuers, evader, HUD. */

import { Frame } from "./protocol.js";

export interface Viewport {
  scale: number;    // pixels per world unit
  cx: number;       // canvas x of world origin
  cy: number;       // canvas y of world origin
}

/** Fit the arena circle into the canvas with a small margin (y flipped). */
export function fitViewport(canvasW: number, canvasH: number, arenaRadius: number): Viewport {
  const margin = 0.94;
  const scale = (Math.min(canvasW, canvasH) / 2) * margin / arenaRadius;
  return { scale, cx: canvasW / 2, cy: canvasH / 2 };
}

export function worldToScreen(view: Viewport, x: number, y: number): [number, number] {
  return [view.cx + x * view.scale, view.cy - y * view.scale];
}

export function estimateArenaRadius(frame: Frame): number {
  // the wire format carries no explicit arena radius; the server clamps
  // everything inside it, so keep a running upper bound with headroom
  let r = 430;
  for (const a of frame.agents) {
    r = Math.max(r, Math.hypot(a.x, a.y));
  }
  r = Math.max(r, Math.hypot(frame.evader.x, frame.evader.y));
  return r;
}

const COLORS = {
  arena: "#2a2d34",
  arenaEdge: "#555b66",
  pursuer: "#4da3ff",
  evader: "#111111",
  evaderRing: "#e05252",
  hud: "#d8dce3",
};

export function drawFrame(
  ctx: CanvasRenderingContext2D,
  frame: Frame,
  view: Viewport,
  arenaRadius: number,
): void {
  const canvas = ctx.canvas;
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  // arena
  ctx.beginPath();
  const [ox, oy] = worldToScreen(view, 0, 0);
  ctx.arc(ox, oy, arenaRadius * view.scale, 0, 2 * Math.PI);
  ctx.fillStyle = COLORS.arena;
  ctx.fill();
  ctx.lineWidth = 2;
  ctx.strokeStyle = COLORS.arenaEdge;
  ctx.stroke();

  // capture radius ring around the evader
  const [ex, ey] = worldToScreen(view, frame.evader.x, frame.evader.y);
  ctx.beginPath();
  ctx.arc(ex, ey, frame.d_cap * view.scale, 0, 2 * Math.PI);
  ctx.strokeStyle = COLORS.evaderRing;
  ctx.setLineDash([6, 4]);
  ctx.lineWidth = 1.5;
  ctx.stroke();
  ctx.setLineDash([]);

  // pursuers as oriented triangles
  for (const agent of frame.agents) {
    const [ax, ay] = worldToScreen(view, agent.x, agent.y);
    const size = Math.max(14 * view.scale, 8);
    ctx.save();
    ctx.translate(ax, ay);
    ctx.rotate(-agent.psi);  // canvas y is flipped, so angles negate
    ctx.beginPath();
    ctx.moveTo(size * 0.8, 0);
    ctx.lineTo(-size * 0.5, size * 0.45);
    ctx.lineTo(-size * 0.5, -size * 0.45);
    ctx.closePath();
    ctx.fillStyle = COLORS.pursuer;
    ctx.fill();
    ctx.restore();
  }

  // the target is the filled dark circle
  ctx.beginPath();
  ctx.arc(ex, ey, Math.max(7 * view.scale, 5), 0, 2 * Math.PI);
  ctx.fillStyle = COLORS.evader;
  ctx.fill();
  ctx.strokeStyle = "#ffffff";
  ctx.lineWidth = 1;
  ctx.stroke();
}

export function drawHud(
  ctx: CanvasRenderingContext2D,
  frame: Frame,
  extra: string,
): void {
  ctx.fillStyle = COLORS.hud;
  ctx.font = "14px monospace";
  const q = frame.q === null ? "-" : frame.q.toFixed(3);
  ctx.fillText(`t ${frame.t}   q ${q}   ${frame.outcome}   ${extra}`, 12, 20);
}

export function drawBanner(ctx: CanvasRenderingContext2D, text: string, color = "#ffd866"): void {
  const canvas = ctx.canvas;
  ctx.fillStyle = "rgba(0, 0, 0, 0.65)";
  ctx.fillRect(0, canvas.height / 2 - 28, canvas.width, 56);
  ctx.fillStyle = color;
  ctx.font = "bold 22px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(text, canvas.width / 2, canvas.height / 2 + 7);
  ctx.textAlign = "start";
}
