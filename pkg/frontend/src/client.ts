/**
 * Bridge client with pluggable transport.
 *
 * The browser build uses a WebSocket transport; tests (and headless tools)
 * use a raw TCP transport, since the bridge speaks the same newline-framed
 * protocol on both. Reconnects use exponential backoff.
 */

export interface Transport {
  connect(onLine: (line: string) => void, onClose: () => void): Promise<void>;
  send(line: string): void;
  close(): void;
}

export class WebSocketTransport implements Transport {
  private ws: WebSocket | null = null;

  constructor(private readonly url: string) {}

  connect(onLine: (line: string) => void, onClose: () => void): Promise<void> {
    return new Promise((resolve, reject) => {
      const ws = new WebSocket(this.url);
      ws.onopen = () => resolve();
      ws.onerror = () => reject(new Error(`websocket error for ${this.url}`));
      ws.onmessage = (ev) => onLine(String(ev.data));
      ws.onclose = () => onClose();
      this.ws = ws;
    });
  }

  send(line: string): void {
    this.ws?.send(line);
  }

  close(): void {
    this.ws?.close();
  }
}

/** Node-only TCP transport (dynamic import keeps the browser bundle clean). */
export class TcpTransport implements Transport {
  private sock: import("node:net").Socket | null = null;

  constructor(
    private readonly host: string,
    private readonly port: number,
  ) {}

  async connect(onLine: (line: string) => void, onClose: () => void): Promise<void> {
    const net = await import("node:net");
    await new Promise<void>((resolve, reject) => {
      const sock = net.createConnection({ host: this.host, port: this.port });
      let buf = "";
      sock.once("connect", () => resolve());
      sock.once("error", (err: Error) => reject(err));
      sock.on("data", (chunk: Buffer) => {
        buf += chunk.toString("utf-8");
        let nl;
        while ((nl = buf.indexOf("\n")) >= 0) {
          onLine(buf.slice(0, nl));
          buf = buf.slice(nl + 1);
        }
      });
      sock.on("close", () => onClose());
      this.sock = sock;
    });
  }

  send(line: string): void {
    this.sock?.write(line + "\n");
  }

  close(): void {
    this.sock?.destroy();
  }
}

export interface ClientOptions {
  /** initial reconnect delay, ms */
  backoffMs?: number;
  /** cap for the exponential backoff, ms */
  backoffMaxMs?: number;
  /** give up after this many consecutive failures; 0 = retry forever */
  maxRetries?: number;
}

export class BridgeClient {
  private transport: Transport;
  private closed = false;
  private retries = 0;
  onLine: (line: string) => void = () => {};
  onStatus: (status: "disconnected" | "connecting" | "connected") => void = () => {};

  constructor(
    private readonly makeTransport: () => Transport,
    private readonly opts: ClientOptions = {},
  ) {
    this.transport = makeTransport();
  }

  async connect(): Promise<void> {
    const { backoffMs = 500, backoffMaxMs = 10_000, maxRetries = 0 } = this.opts;
    for (;;) {
      if (this.closed) return;
      this.onStatus("connecting");
      try {
        this.transport = this.makeTransport();
        await this.transport.connect(
          (line) => this.onLine(line),
          () => {
            this.onStatus("disconnected");
            if (!this.closed) void this.connect();
          },
        );
        this.retries = 0;
        this.onStatus("connected");
        return;
      } catch {
        this.onStatus("disconnected");
        this.retries += 1;
        if (maxRetries > 0 && this.retries >= maxRetries) {
          return;
        }
        const delay = Math.min(backoffMs * 2 ** (this.retries - 1), backoffMaxMs);
        await new Promise((r) => setTimeout(r, delay));
      }
    }
  }

  send(line: string): void {
    this.transport.send(line);
  }

  close(): void {
    this.closed = true;
    this.transport.close();
  }
}
