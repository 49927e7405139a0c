// Websocket client: JSON in, JSON out, automatic reconnect.

import type { ClientMessage, ServerMessage } from "./protocol.js";

export class Connection {
  private socket: WebSocket | null = null;
  private url: string;
  onmessage: (m: ServerMessage) => void = () => {};
  onstate: (s: "connecting" | "open" | "closed") => void = () => {};

  constructor(url?: string) {
    const scheme = location.protocol === "https:" ? "wss" : "ws";
    this.url = url ?? `${scheme}://${location.host}/ws`;
  }

  open(): void {
    this.onstate("connecting");
    this.socket = new WebSocket(this.url);
    this.socket.onopen = () => this.onstate("open");
    this.socket.onmessage = (ev) => {
      try {
        this.onmessage(JSON.parse(ev.data as string) as ServerMessage);
      } catch {
        // non-JSON frames are dropped
      }
    };
    this.socket.onclose = () => {
      this.onstate("closed");
      setTimeout(() => this.open(), 1000);
    };
  }

  send(message: ClientMessage): void {
    if (this.socket && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(JSON.stringify(message));
    }
  }
}
