/** Thin websocket wrapper with reconnect and typed message dispatch. */

import { classifyMessage, Frame, Outgoing } from "./protocol.js";

export interface NetHandlers {
  onFrame(frame: Frame): void;
  onAck(payload: Record<string, unknown>): void;
  onVersionMismatch(got: unknown): void;
  onStatus(text: string): void;
}

export class Connection {
  private socket: WebSocket | null = null;
  private url: string;
  private handlers: NetHandlers;
  private closed = false;

  constructor(url: string, handlers: NetHandlers) {
    this.url = url;
    this.handlers = handlers;
    this.open();
  }

  private open(): void {
    this.handlers.onStatus("connecting");
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.onopen = () => this.handlers.onStatus("connected");
    socket.onmessage = (event: MessageEvent) => {
      const msg = classifyMessage(String(event.data));
      switch (msg.kind) {
        case "frame":
          this.handlers.onFrame(msg.frame);
          break;
        case "ack":
          this.handlers.onAck(msg.payload);
          break;
        case "version_mismatch":
          this.handlers.onVersionMismatch(msg.got);
          break;
        case "server_error":
          this.handlers.onStatus(`server error: ${msg.message}`);
          break;
        case "garbage":
          this.handlers.onStatus(`bad message: ${msg.message}`);
          break;
      }
    };
    socket.onclose = () => {
      this.handlers.onStatus("disconnected");
      if (!this.closed) {
        setTimeout(() => this.open(), 1000);
      }
    };
  }

  send(msg: Outgoing): boolean {
    if (this.socket !== null && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(JSON.stringify(msg));
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
