import { describe, expect, it } from "vitest";

import { createFrameBuffer, interpolatedFrame, lerpAngle, pushFrame } from "../src/interp.js";
import { Frame } from "../src/protocol.js";

function frame(t: number, x: number, psi = 0): Frame {
  return {
    type: "frame",
    v: 1,
    t,
    agents: [{ x, y: 0, psi }],
    evader: { x: x + 100, y: 50 },
    d_cap: 30,
    q: null,
    outcome: "running",
  };
}

describe("interpolatedFrame", () => {
  it("passes the first frame through untouched", () => {
    const buf = createFrameBuffer(20);
    pushFrame(buf, frame(1, 10), 1000);
    expect(interpolatedFrame(buf, 1025)).toEqual(frame(1, 10));
  });

  it("blends linearly between the two latest frames", () => {
    const buf = createFrameBuffer(20);
    pushFrame(buf, frame(1, 0), 1000);
    pushFrame(buf, frame(2, 10), 1050);
    const mid = interpolatedFrame(buf, 1075)!;  // halfway through the 50 ms interval
    expect(mid.agents[0].x).toBeCloseTo(5, 6);
    expect(mid.evader.x).toBeCloseTo(105, 6);
  });

  it("clamps the blend factor at the endpoints", () => {
    const buf = createFrameBuffer(20);
    pushFrame(buf, frame(1, 0), 1000);
    pushFrame(buf, frame(2, 10), 1050);
    expect(interpolatedFrame(buf, 1050)!.agents[0].x).toBeCloseTo(0, 6);
    expect(interpolatedFrame(buf, 9999)!.agents[0].x).toBeCloseTo(10, 6);
  });

  it("skips blending across episode resets", () => {
    const buf = createFrameBuffer(20);
    pushFrame(buf, frame(100, 0), 1000);
    const fresh = frame(1, 40);
    pushFrame(buf, fresh, 1050);  // t went backwards: new episode
    expect(interpolatedFrame(buf, 1060)).toEqual(fresh);
  });

  it("interpolates headings along the short arc", () => {
    expect(lerpAngle(Math.PI - 0.1, -Math.PI + 0.1, 0.5)).toBeCloseTo(Math.PI, 6);
    expect(lerpAngle(0.2, 0.4, 0.5)).toBeCloseTo(0.3, 12);
    expect(lerpAngle(-0.2, 0.2, 0.25)).toBeCloseTo(-0.1, 12);
  });
});
