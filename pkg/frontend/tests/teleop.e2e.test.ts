/**
 * End-to-end teleoperation against a live bridge process.
 *
 * Spawns the simulator bridge (python), connects over TCP with the same
 * newline frame protocol the browser uses over WebSocket, presses "Forward",
 * and watches the effect come back through telemetry.
 */

import { ChildProcess, spawn } from "node:child_process";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { BridgeClient, TcpTransport } from "../src/client.js";
import * as cmd from "../src/commands.js";
import { parseFrame } from "../src/parser.js";
import { applyFrame, newSession, recordCommand, setStatus } from "../src/session.js";

const here = dirname(fileURLToPath(import.meta.url));
const scenario = join(here, "fixtures", "teleop.scn");

let proc: ChildProcess;
let port = 0;

beforeAll(async () => {
  proc = spawn("python3", ["-m", "squidsub.cli", "serve",
    "--scenario", scenario, "--port", "0", "--speed", "20"]);
  port = await new Promise<number>((resolve, reject) => {
    let out = "";
    const timer = setTimeout(() => reject(new Error(`bridge did not start: ${out}`)), 15000);
    proc.stdout!.on("data", (chunk: Buffer) => {
      out += chunk.toString();
      const m = /listening on port (\d+)/.exec(out);
      if (m) {
        clearTimeout(timer);
        resolve(Number(m[1]));
      }
    });
    proc.stderr!.on("data", (chunk: Buffer) => {
      out += chunk.toString();
    });
    proc.once("exit", () => reject(new Error(`bridge exited early: ${out}`)));
  });
}, 20000);

afterAll(() => {
  proc?.kill();
});

function collectFrames(
  client: BridgeClient,
  n: number,
  timeoutMs = 20000,
  filter: (line: string) => boolean = (l) => l.startsWith("TLM "),
): Promise<string[]> {
  return new Promise((resolve, reject) => {
    const frames: string[] = [];
    const timer = setTimeout(
      () => reject(new Error(`only ${frames.length}/${n} frames in ${timeoutMs} ms`)),
      timeoutMs,
    );
    const prev = client.onLine;
    client.onLine = (line) => {
      prev(line);
      if (filter(line)) {
        frames.push(line);
        if (frames.length >= n) {
          clearTimeout(timer);
          client.onLine = prev;
          resolve(frames);
        }
      }
    };
  });
}

describe("end-to-end teleop", () => {
  it("offline bridge: clean disconnected status, no crash", async () => {
    const session = newSession();
    const client = new BridgeClient(() => new TcpTransport("127.0.0.1", 1), {
      backoffMs: 10,
      maxRetries: 2,
    });
    client.onStatus = (st) => setStatus(session, st);
    await client.connect();
    expect(session.status).toBe("disconnected");
    client.close();
  });

  it("forward action changes propulsion state in following telemetry", async () => {
    const session = newSession();
    const client = new BridgeClient(() => new TcpTransport("127.0.0.1", port));
    client.onStatus = (st) => setStatus(session, st);
    client.onLine = (line) => applyFrame(session, line, Date.now());
    await client.connect();
    expect(session.status).toBe("connected");

    // baseline: vehicle at rest, surge velocity zero on the wire
    const before = await collectFrames(client, 2);
    const pBefore = parseFrame(before[before.length - 1]);
    if (pBefore.kind !== "tlm") throw new Error("expected TLM");
    expect(Math.abs(pBefore.packet.vel[0])).toBeLessThan(0.15);

    // press "Forward": both propulsion pumps spin up
    for (const frame of cmd.propulsion("forward")) {
      const out = recordCommand(session, frame, Date.now());
      expect(out).toBe(frame);
      client.send(out!);
    }
    expect(session.role).toBe("commander");

    // the dead-reckoned surge velocity must start growing in the frames
    // that follow the command
    const after = await collectFrames(client, 15);
    const vels = after.map((line) => {
      const f = parseFrame(line);
      if (f.kind !== "tlm") throw new Error("expected TLM");
      return f.packet.vel[0];
    });
    expect(Math.max(...vels)).toBeGreaterThan(0.3);

    // every delivered frame was folded into the session as it arrived
    expect(session.framesSeen).toBeGreaterThanOrEqual(15);
    expect(session.lastRssi).not.toBeNull();
    expect(session.rssiHistory.length).toBeGreaterThan(0);
    client.close();
  }, 60000);

  it("malformed command draws an ERR frame from the bridge", async () => {
    const session = newSession();
    const client = new BridgeClient(() => new TcpTransport("127.0.0.1", port));
    client.onStatus = (st) => setStatus(session, st);
    client.onLine = (line) => applyFrame(session, line, Date.now());
    await client.connect();
    const errPromise = collectFrames(client, 1, 10000, (l) => l.startsWith("ERR "));
    client.send("FLY:up");
    const [err] = await errPromise;
    expect(err).toContain("parse");
    client.close();
  }, 20000);
});
