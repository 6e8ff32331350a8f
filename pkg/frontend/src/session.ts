/**
 * Operator session state: everything the console renders, fed by bridge
 * frames and UI actions. Pure data + reducers, no I/O, so the whole state
 * machine is testable without a network or a DOM.
 */

import { BridgeFrame, TelemetryPacket, parseFrame } from "./parser.js";

export type ConnectionStatus = "disconnected" | "connecting" | "connected";
export type Role = "observer" | "commander";

export interface CommandLogEntry {
  timestamp: number; // ms epoch
  frame: string;
  sent: boolean; // false when queued/rejected while disconnected
}

export interface UiSessionState {
  status: ConnectionStatus;
  role: Role;
  lastPacket: TelemetryPacket | null;
  lastRssi: number | null;
  rssiHistory: number[]; // bounded ring, oldest first
  track: Array<[number, number]>; // (lat, lon) points, fix changes only
  depthHistory: Array<[number, number]>; // (ms epoch, vertical displacement)
  commandLog: CommandLogEntry[];
  missionPhase: string | null;
  missionActive: boolean;
  lastError: string | null;
  framesSeen: number;
}

export const RSSI_RING_SIZE = 120;
export const DEPTH_HISTORY_SIZE = 600;

export function newSession(): UiSessionState {
  return {
    status: "disconnected",
    role: "observer",
    lastPacket: null,
    lastRssi: null,
    rssiHistory: [],
    track: [],
    depthHistory: [],
    commandLog: [],
    missionPhase: null,
    missionActive: false,
    lastError: null,
    framesSeen: 0,
  };
}

function pushRing<T>(ring: T[], value: T, size: number): void {
  ring.push(value);
  if (ring.length > size) {
    ring.splice(0, ring.length - size);
  }
}

/**
 * Fold one bridge frame into the session. The track only grows when the
 * reported position moves: the vehicle repeats its last fix while submerged,
 * so a changed (lat, lon) pair is the observable signature of a fresh fix.
 */
export function applyFrame(state: UiSessionState, line: string, now: number): UiSessionState {
  let frame: BridgeFrame;
  try {
    frame = parseFrame(line);
  } catch (e) {
    state.lastError = String(e);
    return state;
  }
  state.framesSeen += 1;
  if (frame.kind === "err") {
    state.lastError = frame.message;
    if (frame.message.startsWith("busy")) {
      state.role = "observer";
    }
    return state;
  }
  const p = frame.packet;
  state.lastPacket = p;
  state.lastRssi = frame.rssi;
  pushRing(state.rssiHistory, frame.rssi, RSSI_RING_SIZE);
  const last = state.track[state.track.length - 1];
  if (!last || last[0] !== p.lat || last[1] !== p.lon) {
    state.track.push([p.lat, p.lon]);
  }
  // the wire format carries dead-reckoned displacement; its vertical
  // component feeds the depth strip chart
  pushRing(state.depthHistory, [now, p.dis[2]], DEPTH_HISTORY_SIZE);
  if (state.missionActive) {
    // the wire format has no phase field; show a coarse phase inferred
    // from the vertical displacement channel
    state.missionPhase = Math.abs(p.dis[2]) > 0.05 ? "submerged" : "surface";
  }
  return state;
}

/** Record a UI command. Returns the frame to transmit, or null if rejected. */
export function recordCommand(
  state: UiSessionState,
  frame: string,
  now: number,
): string | null {
  const sendable = state.status === "connected";
  state.commandLog.push({ timestamp: now, frame, sent: sendable });
  if (!sendable) {
    state.lastError = "not connected: command not sent";
    return null;
  }
  // issuing any command is the claim to the commander role; the bridge
  // answers `ERR busy ...` if someone else already holds it
  state.role = "commander";
  if (frame === "MISSION:start") {
    state.missionActive = true;
    state.missionPhase = "starting";
  } else if (frame === "MISSION:abort") {
    state.missionActive = false;
    state.missionPhase = "aborted";
  }
  return frame;
}

export function setStatus(state: UiSessionState, status: ConnectionStatus): void {
  state.status = status;
  if (status !== "connected") {
    state.role = "observer";
  }
}
