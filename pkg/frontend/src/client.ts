// Thin transport over the session service: HTTP for request/response, one
// WebSocket for pushes. Every raw payload can be tapped via onRawMessage,
// which is how the tests audit what the server ever sent us.

import type {
  AdvanceResponse,
  BaselineAck,
  CreateSessionResponse,
  RoundView,
  ServerMessage,
} from "./types";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

type WebSocketCtor = new (url: string) => WebSocket;

export interface ClientOptions {
  webSocketImpl?: WebSocketCtor;
  onRawMessage?: (origin: string, raw: string) => void;
}

export interface SocketHandle {
  close(): void;
}

export class SessionClient {
  private readonly baseUrl: string;
  private readonly wsCtor: WebSocketCtor;
  private readonly tap: (origin: string, raw: string) => void;

  constructor(baseUrl: string, options: ClientOptions = {}) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.wsCtor = options.webSocketImpl ??
      (globalThis.WebSocket as unknown as WebSocketCtor);
    this.tap = options.onRawMessage ?? (() => undefined);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    this.tap(`${method} ${path}`, text);
    if (!response.ok) {
      let code = `http_${response.status}`;
      let message = text;
      try {
        const parsed = JSON.parse(text);
        code = parsed.code ?? code;
        message = parsed.message ?? parsed.detail ?? text;
      } catch {
        // non-JSON error body; keep the raw text
      }
      throw new ApiError(response.status, code, message);
    }
    return JSON.parse(text) as T;
  }

  createSession(body: {
    scenario?: unknown;
    human_player?: number;
    seed?: number;
  } = {}): Promise<CreateSessionResponse> {
    return this.request("POST", "/sessions", body);
  }

  view(sessionId: string, player: number): Promise<RoundView> {
    return this.request("GET", `/sessions/${sessionId}/view?player=${player}`);
  }

  submitBaseline(sessionId: string, player: number,
                 action: number): Promise<BaselineAck> {
    return this.request("POST", `/sessions/${sessionId}/baseline`,
                        { player, action });
  }

  advance(sessionId: string, follow: boolean): Promise<AdvanceResponse> {
    return this.request("POST", `/sessions/${sessionId}/advance`, { follow });
  }

  async trace(sessionId: string): Promise<string> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/trace`);
    const text = await response.text();
    if (!response.ok) {
      throw new ApiError(response.status, `http_${response.status}`, text);
    }
    return text;
  }

  connect(sessionId: string,
          onMessage: (message: ServerMessage) => void,
          onClose?: () => void): Promise<SocketHandle> {
    const url = this.baseUrl.replace(/^http/, "ws") + `/sessions/${sessionId}/ws`;
    const socket = new this.wsCtor(url);
    return new Promise((resolve, reject) => {
      socket.onopen = () => resolve({ close: () => socket.close() });
      socket.onerror = () => reject(new Error(`websocket failed: ${url}`));
      socket.onclose = () => onClose?.();
      socket.onmessage = (event: MessageEvent) => {
        const raw = typeof event.data === "string" ? event.data : String(event.data);
        this.tap("ws", raw);
        onMessage(JSON.parse(raw) as ServerMessage);
      };
    });
  }
}
