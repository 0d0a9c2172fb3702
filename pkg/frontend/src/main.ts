/** Entry point: wires the socket, input, interpolation, and render loop.
 *
 * Live mode: frames stream from /ws; arrow keys / WASD (or dragging on the
 * canvas) steer the evader; every input change emits one move command with
 * an increasing sequence number. Replay mode: a JSONL trajectory file plays
 * back through the same renderer.
 */

import { createInputState, keyChanged, isDirectionKey, nextMoveMessage, pointerChanged } from "./input.js";
import { createFrameBuffer, interpolatedFrame, pushFrame } from "./interp.js";
import { Connection } from "./net.js";
import { Frame } from "./protocol.js";
import { drawBanner, drawFrame, drawHud, estimateArenaRadius, fitViewport } from "./render.js";
import { parseReplayText, ReplayPlayer } from "./replay.js";

const canvas = document.getElementById("arena") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const pauseButton = document.getElementById("pause") as HTMLButtonElement;
const resetButton = document.getElementById("reset") as HTMLButtonElement;
const replayInput = document.getElementById("replay-file") as HTMLInputElement;
const liveButton = document.getElementById("go-live") as HTMLButtonElement;

const input = createInputState();
const buffer = createFrameBuffer(20);
let arenaRadius = 430;
let versionProblem: string | null = null;
let replay: ReplayPlayer | null = null;
let replayTimer: number | null = null;
let status = "starting";

function setStatus(text: string): void {
  status = text;
  statusEl.textContent = text;
}

const conn = new Connection(wsUrl(), {
  onFrame(frame: Frame) {
    if (replay === null) {
      pushFrame(buffer, frame, performance.now());
      arenaRadius = Math.max(arenaRadius, estimateArenaRadius(frame));
    }
  },
  onAck() {},
  onVersionMismatch(got: unknown) {
    versionProblem = `protocol version mismatch: server sent v${String(got)}`;
  },
  onStatus: setStatus,
});

function wsUrl(): string {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${location.host}/ws`;
}

// keyboard steering; ignore keys while typing into inputs
window.addEventListener("keydown", (e: KeyboardEvent) => {
  if (isDirectionKey(e.code)) {
    e.preventDefault();
    keyChanged(input, e.code, true);
  }
});
window.addEventListener("keyup", (e: KeyboardEvent) => {
  keyChanged(input, e.code, false);
});

// pointer drag overrides keys
let dragging = false;
canvas.addEventListener("pointerdown", (e: PointerEvent) => {
  dragging = true;
  canvas.setPointerCapture(e.pointerId);
  updateDrag(e);
});
canvas.addEventListener("pointermove", (e: PointerEvent) => {
  if (dragging) {
    updateDrag(e);
  }
});
canvas.addEventListener("pointerup", () => {
  dragging = false;
  pointerChanged(input, null);
});

function updateDrag(e: PointerEvent): void {
  const rect = canvas.getBoundingClientRect();
  const dx = e.clientX - (rect.left + rect.width / 2);
  const dy = e.clientY - (rect.top + rect.height / 2);
  // screen y points down; world y points up
  pointerChanged(input, { dx, dy: -dy });
}

pauseButton.addEventListener("click", () => conn.send({ type: "pause" }));
resetButton.addEventListener("click", () => {
  const seed = Math.floor(Math.random() * 1_000_000);
  conn.send({ type: "reset", seed });
});

replayInput.addEventListener("change", async () => {
  const file = replayInput.files?.[0];
  if (!file) {
    return;
  }
  try {
    replay = new ReplayPlayer(parseReplayText(await file.text()));
    setStatus(`replay: ${file.name} (${replay.frames.length} frames)`);
    if (replayTimer !== null) {
      clearInterval(replayTimer);
    }
    replayTimer = setInterval(() => {
      if (replay !== null) {
        pushFrame(buffer, replay.step(), performance.now());
      }
    }, 50) as unknown as number;
  } catch (err) {
    setStatus(String(err));
  }
});

liveButton.addEventListener("click", () => {
  replay = null;
  if (replayTimer !== null) {
    clearInterval(replayTimer);
    replayTimer = null;
  }
  setStatus("live");
});

function resizeCanvas(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
}
window.addEventListener("resize", resizeCanvas);
resizeCanvas();

function loop(now: number): void {
  if (replay === null) {
    const msg = nextMoveMessage(input);
    if (msg !== null) {
      conn.send(msg);
    }
  }
  const frame = interpolatedFrame(buffer, now);
  if (frame !== null && versionProblem === null) {
    const view = fitViewport(canvas.width, canvas.height, arenaRadius);
    drawFrame(ctx, frame, view, arenaRadius);
    drawHud(ctx, frame, replay === null ? status : "replay");
    if (frame.outcome === "captured") {
      drawBanner(ctx, "CAPTURED", "#ff8484");
    } else if (frame.outcome === "timeout") {
      drawBanner(ctx, "TIMEOUT - evader wins", "#7ee081");
    }
  } else if (versionProblem !== null) {
    drawBanner(ctx, versionProblem);
  }
  requestAnimationFrame(loop);
}
requestAnimationFrame(loop);
