/** Keyboard / pointer state and its conversion into evader move commands.
 *
 * Directions are in world coordinates (y up). Arrow keys and WASD compose
 * an 8-way direction; dragging the pointer on the canvas overrides the
 * keys while active. A move message is produced at most once per animation
 * frame and only when the direction actually changed; sequence numbers
 * increase strictly across emissions.
 */

import { MoveMessage } from "./protocol.js";

export interface InputState {
  pressed: Set<string>;
  pointer: { dx: number; dy: number } | null;
  seq: number;
  lastSent: [number, number] | null;
}

export function createInputState(): InputState {
  return { pressed: new Set(), pointer: null, seq: 0, lastSent: null };
}

const KEY_VECTORS: Record<string, [number, number]> = {
  ArrowUp: [0, 1],
  ArrowDown: [0, -1],
  ArrowLeft: [-1, 0],
  ArrowRight: [1, 0],
  KeyW: [0, 1],
  KeyS: [0, -1],
  KeyA: [-1, 0],
  KeyD: [1, 0],
};

export function isDirectionKey(code: string): boolean {
  return code in KEY_VECTORS;
}

export function keyChanged(state: InputState, code: string, pressed: boolean): void {
  if (!isDirectionKey(code)) {
    return;
  }
  if (pressed) {
    state.pressed.add(code);
  } else {
    state.pressed.delete(code);
  }
}

/** Pointer drag vector in world coordinates (caller flips the screen y). */
export function pointerChanged(state: InputState, drag: { dx: number; dy: number } | null): void {
  state.pointer = drag;
}

export function composeDirection(state: InputState): [number, number] {
  let x = 0;
  let y = 0;
  if (state.pointer !== null) {
    x = state.pointer.dx;
    y = state.pointer.dy;
  } else {
    for (const code of state.pressed) {
      const v = KEY_VECTORS[code];
      x += v[0];
      y += v[1];
    }
  }
  const norm = Math.hypot(x, y);
  if (norm === 0) {
    return [0, 0];
  }
  return [x / norm, y / norm];
}

/** Move message for this animation frame, or null when nothing changed. */
export function nextMoveMessage(state: InputState): MoveMessage | null {
  const dir = composeDirection(state);
  const last = state.lastSent;
  if (last !== null && last[0] === dir[0] && last[1] === dir[1]) {
    return null;
  }
  state.lastSent = dir;
  state.seq += 1;
  return { type: "move", dir, seq: state.seq };
}
