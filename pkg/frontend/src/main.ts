/**
 * Browser shell: wires the session state machine, the WebSocket client, and
 * the view renderers to the DOM in index.html.
 */

import { BridgeClient, WebSocketTransport } from "./client.js";
import * as cmd from "./commands.js";
import { applyFrame, newSession, recordCommand, setStatus } from "./session.js";
import * as views from "./views.js";

const state = newSession();

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function render(): void {
  $("status").innerHTML = views.renderStatus(state);
  $("attitude").innerHTML = views.renderAttitude(state);
  $("track").innerHTML = views.renderTrack(state);
  $("depth").innerHTML = views.renderDepthChart(state);
  $("rssi").innerHTML = views.renderRssi(state);
  $("console").innerHTML = views.renderConsole(state);
  $("mission").innerHTML = views.renderMission(state);
}

const params = new URLSearchParams(window.location.search);
const url = params.get("bridge") ?? `ws://${window.location.hostname}:8765`;
const client = new BridgeClient(() => new WebSocketTransport(url));

client.onStatus = (status) => {
  setStatus(state, status);
  render();
};
client.onLine = (line) => {
  applyFrame(state, line, Date.now());
  render();
};

function send(frames: string | string[]): void {
  for (const frame of Array.isArray(frames) ? frames : [frames]) {
    const out = recordCommand(state, frame, Date.now());
    if (out !== null) client.send(out);
  }
  render();
}

function hook(id: string, frames: () => string | string[]): void {
  $(id).addEventListener("click", () => send(frames()));
}

hook("btn-forward", () => cmd.propulsion("forward"));
hook("btn-reverse", () => cmd.propulsion("reverse"));
hook("btn-stop", () => cmd.propulsion("stop"));
hook("btn-hdg", () => cmd.headingSetpoint(Number(($("in-hdg") as HTMLInputElement).value)));
hook("btn-dep", () => cmd.depthSetpoint(Number(($("in-dep") as HTMLInputElement).value)));
hook("btn-mission-start", () => cmd.missionStart());
hook("btn-mission-abort", () => cmd.missionAbort());
for (const id of [1, 2, 3, 4, 5, 6]) {
  for (const st of ["forward", "reverse", "stop"] as const) {
    const el = document.getElementById(`btn-m${id}-${st}`);
    el?.addEventListener("click", () => send(cmd.motorCommand(id, st)));
  }
}

void client.connect();
render();
