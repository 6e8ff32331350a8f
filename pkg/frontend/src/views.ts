/**
 * View rendering: session state -> HTML/SVG strings.
 *
 * Keeping these as pure string builders means every view is testable in
 * node, and the browser shell only has to assign innerHTML.
 */

import { UiSessionState } from "./session.js";

const METERS_PER_DEG_LAT = 111320.0;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderStatus(s: UiSessionState): string {
  const cls = s.status === "connected" ? "ok" : "bad";
  return (
    `<span class="status ${cls}">${s.status}</span> ` +
    `<span class="role">${s.role}</span>` +
    (s.lastError ? ` <span class="error">${esc(s.lastError)}</span>` : "")
  );
}

/** Attitude gauges: heading compass plus roll/pitch readouts. */
export function renderAttitude(s: UiSessionState): string {
  if (!s.lastPacket) {
    return `<div class="gauges empty">no telemetry</div>`;
  }
  const [heading, roll, pitch] = s.lastPacket.eul;
  const needle = `<line x1="50" y1="50" x2="50" y2="12" transform="rotate(${heading.toFixed(1)} 50 50)" class="needle"/>`;
  return (
    `<div class="gauges">` +
    `<svg viewBox="0 0 100 100" class="compass"><circle cx="50" cy="50" r="45"/>${needle}</svg>` +
    `<div class="num">HDG ${heading.toFixed(2)}&deg;</div>` +
    `<div class="num">ROLL ${roll.toFixed(2)}&deg;</div>` +
    `<div class="num">PITCH ${pitch.toFixed(2)}&deg;</div>` +
    `</div>`
  );
}

/**
 * Map track on the local flat-earth plane around the first fix. North is up;
 * points are joined in arrival order.
 */
export function renderTrack(s: UiSessionState, sizePx = 240): string {
  if (s.track.length === 0) {
    return `<svg class="track" viewBox="0 0 ${sizePx} ${sizePx}"></svg>`;
  }
  const [lat0, lon0] = s.track[0];
  const cosLat = Math.cos((lat0 * Math.PI) / 180);
  const pts = s.track.map(([lat, lon]) => {
    const north = (lat - lat0) * METERS_PER_DEG_LAT;
    const east = (lon - lon0) * METERS_PER_DEG_LAT * cosLat;
    return [east, north];
  });
  const span = Math.max(10, ...pts.map(([e, n]) => Math.max(Math.abs(e), Math.abs(n))));
  const scale = (sizePx / 2 - 10) / span;
  const path = pts
    .map(([e, n], i) => `${i === 0 ? "M" : "L"}${(sizePx / 2 + e * scale).toFixed(1)},${(sizePx / 2 - n * scale).toFixed(1)}`)
    .join(" ");
  return (
    `<svg class="track" viewBox="0 0 ${sizePx} ${sizePx}">` +
    `<path d="${path}" fill="none"/>` +
    `</svg>`
  );
}

export function renderDepthChart(s: UiSessionState, widthPx = 240, heightPx = 80): string {
  if (s.depthHistory.length === 0) {
    return `<svg class="depth" viewBox="0 0 ${widthPx} ${heightPx}"></svg>`;
  }
  const values = s.depthHistory.map(([, d]) => d);
  const max = Math.max(0.5, ...values.map(Math.abs));
  const path = values
    .map((d, i) => {
      const x = (i / Math.max(1, values.length - 1)) * widthPx;
      const y = heightPx / 2 + (d / max) * (heightPx / 2 - 4);
      return `${i === 0 ? "M" : "L"}${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
  return `<svg class="depth" viewBox="0 0 ${widthPx} ${heightPx}"><path d="${path}" fill="none"/></svg>`;
}

export function renderRssi(s: UiSessionState): string {
  if (s.lastRssi === null) {
    return `<div class="rssi empty">RSSI --</div>`;
  }
  // map the usable span (about -120..-40 dBm) onto 0..5 bars
  const bars = Math.max(0, Math.min(5, Math.round((s.lastRssi + 120) / 16)));
  return `<div class="rssi">RSSI ${s.lastRssi} dBm ${"|".repeat(bars)}${".".repeat(5 - bars)}</div>`;
}

export function renderConsole(s: UiSessionState, lastN = 8): string {
  const rows = s.commandLog
    .slice(-lastN)
    .map(
      (e) =>
        `<li class="${e.sent ? "sent" : "queued"}">` +
        `${new Date(e.timestamp).toISOString()} ${esc(e.frame)}</li>`,
    )
    .join("");
  const raw = s.lastPacket ? esc(JSON.stringify(s.lastPacket)) : "";
  return `<ul class="cmdlog">${rows}</ul><pre class="raw">${raw}</pre>`;
}

export function renderMission(s: UiSessionState): string {
  return `<div class="mission">phase: ${esc(s.missionPhase ?? "unknown")}</div>`;
}
