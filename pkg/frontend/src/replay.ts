/** Replay mode: load exported JSONL trajectory files and play them back. */

import { classifyMessage, Frame } from "./protocol.js";

export function parseReplayText(text: string): Frame[] {
  const frames: Frame[] = [];
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (trimmed === "") {
      continue;
    }
    const msg = classifyMessage(trimmed);
    if (msg.kind === "frame") {
      frames.push(msg.frame);
    } else if (msg.kind === "version_mismatch") {
      throw new Error(`replay uses unsupported schema version: ${String(msg.got)}`);
    } else {
      throw new Error(`line is not a frame: ${trimmed.slice(0, 60)}`);
    }
  }
  return frames;
}

export class ReplayPlayer {
  frames: Frame[];
  index = 0;
  playing = true;

  constructor(frames: Frame[]) {
    if (frames.length === 0) {
      throw new Error("empty replay");
    }
    this.frames = frames;
  }

  current(): Frame {
    return this.frames[this.index];
  }

  /** Advance one frame; stays on the last frame when done. */
  step(): Frame {
    if (this.playing && this.index < this.frames.length - 1) {
      this.index += 1;
    }
    return this.current();
  }

  restart(): void {
    this.index = 0;
    this.playing = true;
  }
}
