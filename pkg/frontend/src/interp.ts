/** Two-frame interpolation buffer for smooth rendering between server ticks. */

import { Frame } from "./protocol.js";

export interface FrameBuffer {
  prev: Frame | null;
  latest: Frame | null;
  latestAt: number;     // ms timestamp when `latest` arrived
  intervalMs: number;   // smoothed arrival interval
}

export function createFrameBuffer(expectedHz = 20): FrameBuffer {
  return { prev: null, latest: null, latestAt: 0, intervalMs: 1000 / expectedHz };
}

export function pushFrame(buf: FrameBuffer, frame: Frame, nowMs: number): void {
  if (buf.latest !== null) {
    const dt = nowMs - buf.latestAt;
    if (dt > 0 && dt < 1000) {
      buf.intervalMs = 0.8 * buf.intervalMs + 0.2 * dt;
    }
  }
  buf.prev = buf.latest;
  buf.latest = frame;
  buf.latestAt = nowMs;
}

function lerp(a: number, b: number, f: number): number {
  return a + (b - a) * f;
}

/** Interpolate angles along the shortest arc. */
export function lerpAngle(a: number, b: number, f: number): number {
  let delta = (b - a) % (2 * Math.PI);
  if (delta > Math.PI) {
    delta -= 2 * Math.PI;
  } else if (delta < -Math.PI) {
    delta += 2 * Math.PI;
  }
  return a + delta * f;
}

/** Frame to draw at `nowMs`: latest blended over the previous one.
 *
 * The blend factor is the elapsed fraction of the expected inter-frame
 * interval, clamped to [0, 1]; entity counts changing (episode reset)
 * disables blending for that frame.
 */
export function interpolatedFrame(buf: FrameBuffer, nowMs: number): Frame | null {
  const latest = buf.latest;
  if (latest === null) {
    return null;
  }
  const prev = buf.prev;
  if (prev === null || prev.agents.length !== latest.agents.length || prev.t > latest.t) {
    return latest;
  }
  const f = Math.min(Math.max((nowMs - buf.latestAt) / buf.intervalMs, 0), 1);
  return {
    ...latest,
    agents: latest.agents.map((agent, i) => ({
      x: lerp(prev.agents[i].x, agent.x, f),
      y: lerp(prev.agents[i].y, agent.y, f),
      psi: lerpAngle(prev.agents[i].psi, agent.psi, f),
    })),
    evader: {
      x: lerp(prev.evader.x, latest.evader.x, f),
      y: lerp(prev.evader.y, latest.evader.y, f),
    },
  };
}
