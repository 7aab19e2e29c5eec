/**
 * Minimal Chrome DevTools Protocol client: launch a browser with
 * --remote-debugging-port=0, read the DevTools ws endpoint off stderr,
 * then speak flat-session JSON-RPC over one WebSocket.
 */

import { spawn, type ChildProcess } from "node:child_process";
import WebSocket from "ws";

export class CdpError extends Error {}
export class NavigationTimeout extends CdpError {}
export class RenderFailure extends CdpError {}

interface PendingCall {
  resolve: (value: unknown) => void;
  reject: (err: Error) => void;
  method: string;
}

type EventHandler = (params: Record<string, unknown>) => void;

export class CdpConnection {
  private nextId = 1;
  private pending = new Map<number, PendingCall>();
  private handlers = new Map<string, Set<EventHandler>>();

  private constructor(private ws: WebSocket) {
    ws.on("message", (data) => this.dispatch(String(data)));
  }

  static connect(wsUrl: string, timeoutMs = 10_000): Promise<CdpConnection> {
    return new Promise((resolve, reject) => {
      const ws = new WebSocket(wsUrl, { maxPayload: 256 * 1024 * 1024 });
      const timer = setTimeout(() => {
        ws.terminate();
        reject(new CdpError(`timed out connecting to ${wsUrl}`));
      }, timeoutMs);
      ws.once("open", () => {
        clearTimeout(timer);
        resolve(new CdpConnection(ws));
      });
      ws.once("error", (err) => {
        clearTimeout(timer);
        reject(new CdpError(`websocket error: ${err.message}`));
      });
    });
  }

  private dispatch(text: string): void {
    const msg = JSON.parse(text);
    if (typeof msg.id === "number") {
      const call = this.pending.get(msg.id);
      if (!call) return;
      this.pending.delete(msg.id);
      if (msg.error) {
        call.reject(new CdpError(`${call.method}: ${msg.error.message}`));
      } else {
        call.resolve(msg.result ?? {});
      }
      return;
    }
    const key = `${msg.sessionId ?? ""}:${msg.method}`;
    for (const handler of this.handlers.get(key) ?? []) handler(msg.params ?? {});
  }

  send<T = Record<string, unknown>>(
    method: string,
    params: Record<string, unknown> = {},
    sessionId?: string,
  ): Promise<T> {
    const id = this.nextId++;
    const payload: Record<string, unknown> = { id, method, params };
    if (sessionId) payload.sessionId = sessionId;
    return new Promise<T>((resolve, reject) => {
      this.pending.set(id, { resolve: resolve as (v: unknown) => void, reject, method });
      this.ws.send(JSON.stringify(payload), (err) => {
        if (err) {
          this.pending.delete(id);
          reject(new CdpError(`send ${method}: ${err.message}`));
        }
      });
    });
  }

  on(method: string, handler: EventHandler, sessionId = ""): () => void {
    const key = `${sessionId}:${method}`;
    const set = this.handlers.get(key) ?? new Set();
    set.add(handler);
    this.handlers.set(key, set);
    return () => set.delete(handler);
  }

  waitFor(method: string, sessionId: string, timeoutMs: number): Promise<Record<string, unknown>> {
    return new Promise((resolve, reject) => {
      const off = this.on(
        method,
        (params) => {
          clearTimeout(timer);
          off();
          resolve(params);
        },
        sessionId,
      );
      const timer = setTimeout(() => {
        off();
        reject(new NavigationTimeout(`timed out waiting for ${method} after ${timeoutMs}ms`));
      }, timeoutMs);
    });
  }

  close(): void {
    this.ws.close();
  }
}

export interface LaunchedBrowser {
  proc: ChildProcess;
  connection: CdpConnection;
}

const ENDPOINT_RE = /DevTools listening on (ws:\/\/\S+)/;

export async function launchBrowser(
  binary: string,
  userDataDir: string,
  viewport: { width_px: number; height_px: number },
): Promise<LaunchedBrowser> {
  const args = [
    "--headless=new",
    "--remote-debugging-port=0",
    "--no-sandbox",
    "--disable-gpu",
    "--hide-scrollbars",
    "--no-first-run",
    "--no-default-browser-check",
    "--disable-dev-shm-usage",
    `--window-size=${viewport.width_px},${viewport.height_px}`,
    `--user-data-dir=${userDataDir}`,
    "about:blank",
  ];
  const proc = spawn(binary, args, { stdio: ["ignore", "ignore", "pipe"] });

  const wsUrl = await new Promise<string>((resolve, reject) => {
    let buffer = "";
    const timer = setTimeout(() => {
      proc.kill();
      reject(new CdpError(`browser did not expose a DevTools endpoint:\n${buffer.slice(-500)}`));
    }, 20_000);
    proc.stderr!.on("data", (chunk) => {
      buffer += String(chunk);
      const m = ENDPOINT_RE.exec(buffer);
      if (m) {
        clearTimeout(timer);
        resolve(m[1]);
      }
    });
    proc.once("exit", (code) => {
      clearTimeout(timer);
      reject(new CdpError(`browser exited with code ${code} before listening:\n${buffer.slice(-500)}`));
    });
  });

  const connection = await CdpConnection.connect(wsUrl);
  return { proc, connection };
}
