/**
 * Telemetry wire codec — ground-station side.
 *
 * This is a deliberately independent implementation of the payload grammar
 * (not a port of the simulator's codec); both sides are kept honest by the
 * shared golden vectors in tests/fixtures/telemetry_vectors.json.
 *
 * Grammar, one line, no spaces:
 *   LAT:<f6>,LON:<f6>|ACC:<f2>x3|EUL:<f2>x3|GYR:<f2>x3|Q:<f2>x4|VEL:<f2>x3|DIS:<f2>x3
 * where <fN> is fixed N-decimal notation rounded half-away-from-zero, with
 * the sign of the underlying value preserved (so "-0.00" is legal).
 */

export interface TelemetryPacket {
  lat: number;
  lon: number;
  acc: [number, number, number];
  eul: [number, number, number]; // heading, roll, pitch
  gyr: [number, number, number];
  quat: [number, number, number, number]; // x, y, z, w
  vel: [number, number, number];
  dis: [number, number, number];
}

export class ParseError extends Error {
  constructor(
    message: string,
    public readonly field: string | null = null,
    public readonly offset: number | null = null,
  ) {
    super(message + (field ? ` [field ${field}]` : "") + (offset !== null ? ` [offset ${offset}]` : ""));
    this.name = "ParseError";
  }
}

/** Field layout: tag, packet key, value count. Order on the wire is fixed. */
const LAYOUT = [
  ["ACC", "acc", 3],
  ["EUL", "eul", 3],
  ["GYR", "gyr", 3],
  ["Q", "quat", 4],
  ["VEL", "vel", 3],
  ["DIS", "dis", 3],
] as const;

const NUMBER = /^[+-]?(\d+(\.\d*)?|\.\d+)$/;

function parseNumber(token: string, field: string, offset: number): number {
  if (!NUMBER.test(token)) {
    throw new ParseError(`non-numeric token '${token}'`, field, offset);
  }
  const v = Number(token);
  // Number("-0.00") is -0 in JS, which keeps the wire sign for re-encoding
  return v;
}

export function parseTelemetry(payload: string): TelemetryPacket {
  const groups = payload.split("|");
  const head = groups[0] ?? "";
  const m = /^LAT:([^,]*),LON:(.*)$/.exec(head);
  if (!m) {
    throw new ParseError("malformed LAT/LON group", "LAT", 0);
  }
  const lat = parseNumber(m[1], "LAT", 4);
  const lon = parseNumber(m[2], "LON", head.lastIndexOf(":") + 1);

  const out: Record<string, number[]> = {};
  let offset = head.length + 1;
  LAYOUT.forEach(([tag, key, arity], i) => {
    const group = groups[i + 1];
    if (group === undefined) {
      throw new ParseError(`missing field ${tag}`, tag, offset);
    }
    if (!group.startsWith(tag + ":")) {
      const got = group.split(":", 1)[0];
      throw new ParseError(
        `expected field ${tag}, found '${got}' (field order is fixed)`,
        tag,
        offset,
      );
    }
    const tokens = group.slice(tag.length + 1).split(",");
    if (tokens.length !== arity) {
      throw new ParseError(`${tag} expects ${arity} values, got ${tokens.length}`, tag, offset);
    }
    let tokOffset = offset + tag.length + 1;
    out[key] = tokens.map((tok) => {
      const v = parseNumber(tok, tag, tokOffset);
      tokOffset += tok.length + 1;
      return v;
    });
    offset += group.length + 1;
  });
  if (groups.length > 1 + LAYOUT.length) {
    throw new ParseError("trailing data after DIS", null, offset);
  }
  return {
    lat,
    lon,
    acc: out.acc as [number, number, number],
    eul: out.eul as [number, number, number],
    gyr: out.gyr as [number, number, number],
    quat: out.quat as [number, number, number, number],
    vel: out.vel as [number, number, number],
    dis: out.dis as [number, number, number],
  };
}

/** Fixed-point, half-away-from-zero, sign preserved for values in (-1, 0]. */
export function formatFixed(value: number, decimals: number): string {
  if (!Number.isFinite(value)) {
    throw new ParseError(`non-finite value ${value}`);
  }
  const scale = 10 ** decimals;
  const n = Math.floor(Math.abs(value) * scale + 0.5);
  const negative = value < 0 || Object.is(value, -0);
  const whole = Math.floor(n / scale);
  const frac = String(n % scale).padStart(decimals, "0");
  return `${negative ? "-" : ""}${whole}.${frac}`;
}

export function encodeTelemetry(p: TelemetryPacket): string {
  const parts = [`LAT:${formatFixed(p.lat, 6)},LON:${formatFixed(p.lon, 6)}`];
  for (const [tag, key] of LAYOUT) {
    const vals = p[key] as readonly number[];
    parts.push(tag + ":" + vals.map((v) => formatFixed(v, 2)).join(","));
  }
  return parts.join("|");
}

/** One frame from the bridge: `TLM <payload>|RSSI:<int>` or `ERR <message>`. */
export type BridgeFrame =
  | { kind: "tlm"; packet: TelemetryPacket; rssi: number; raw: string }
  | { kind: "err"; message: string };

export function parseFrame(line: string): BridgeFrame {
  if (line.startsWith("ERR ")) {
    return { kind: "err", message: line.slice(4) };
  }
  if (!line.startsWith("TLM ")) {
    throw new ParseError(`unknown frame type in '${line.slice(0, 20)}'`);
  }
  const body = line.slice(4);
  const cut = body.lastIndexOf("|RSSI:");
  if (cut < 0) {
    throw new ParseError("TLM frame missing RSSI suffix");
  }
  const rssi = Number(body.slice(cut + 6));
  if (!Number.isInteger(rssi)) {
    throw new ParseError("non-integer RSSI");
  }
  const raw = body.slice(0, cut);
  return { kind: "tlm", packet: parseTelemetry(raw), rssi, raw };
}
