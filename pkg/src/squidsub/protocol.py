"""Telemetry wire codec, operator command grammar, and the radio link model.

The telemetry payload grammar is byte-exact end to end:

    LAT:<f6>,LON:<f6>|ACC:<f2>,<f2>,<f2>|EUL:<f2>,<f2>,<f2>|
    GYR:<f2>,<f2>,<f2>|Q:<f2>,<f2>,<f2>,<f2>|VEL:<f2>,<f2>,<f2>|DIS:<f2>,<f2>,<f2>

(no spaces, single line). fN is fixed N-decimal notation, rounded
half-away-from-zero, with the sign of the underlying value preserved so that
e.g. -0.001 encodes as "-0.00".
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .actuation import Action, MotorCommand


class ProtocolError(ValueError):
    """Structured codec failure: carries the offending field and byte offset."""

    def __init__(self, message, field=None, offset=None):
        self.field = field
        self.offset = offset
        where = ""
        if field is not None:
            where += f" [field {field}]"
        if offset is not None:
            where += f" [offset {offset}]"
        super().__init__(message + where)


@dataclass(frozen=True)
class TelemetryPacket:
    lat: float = 0.0
    lon: float = 0.0
    acc: tuple = (0.0, 0.0, 0.0)
    eul: tuple = (0.0, 0.0, 0.0)       # heading, roll, pitch
    gyr: tuple = (0.0, 0.0, 0.0)
    quat: tuple = (0.0, 0.0, 0.0, 1.0)  # x, y, z, w
    vel: tuple = (0.0, 0.0, 0.0)
    dis: tuple = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class SetpointCommand:
    kind: str      # "heading" | "depth"
    value: float


@dataclass(frozen=True)
class MissionCommand:
    action: str    # "start" | "abort"


@dataclass(frozen=True)
class LinkParams:
    rssi0_dbm: float = -50.0      # RSSI at reference range, surface
    r0_m: float = 10.0            # reference range
    alpha_db_per_m: float = 25.0  # attenuation per meter of water depth
    sensitivity_dbm: float = -120.0
    p_loss_floor: float = 0.02    # residual random loss at any signal level


@dataclass(frozen=True)
class LinkReport:
    delivered: bool
    rssi_dbm: int


def _format_fixed(value: float, decimals: int) -> str:
    if not math.isfinite(value):
        raise ProtocolError(f"non-finite value {value!r}")
    scale = 10 ** decimals
    n = int(math.floor(abs(value) * scale + 0.5))   # half-away-from-zero
    negative = value < 0 or (value == 0 and math.copysign(1.0, value) < 0)
    body = f"{n // scale}.{n % scale:0{decimals}d}"
    return "-" + body if negative else body


_GROUPS = (("ACC", "acc", 3), ("EUL", "eul", 3), ("GYR", "gyr", 3),
           ("Q", "quat", 4), ("VEL", "vel", 3), ("DIS", "dis", 3))

_NUM_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")


def encode_telemetry(p: TelemetryPacket) -> str:
    parts = [f"LAT:{_format_fixed(p.lat, 6)},LON:{_format_fixed(p.lon, 6)}"]
    for tag, attr, arity in _GROUPS:
        vals = getattr(p, attr)
        if len(vals) != arity:
            raise ProtocolError(f"{tag} needs {arity} values", field=tag)
        parts.append(tag + ":" + ",".join(_format_fixed(v, 2) for v in vals))
    return "|".join(parts)


def _parse_number(token: str, field: str, offset: int) -> float:
    if not _NUM_RE.match(token):
        raise ProtocolError(f"non-numeric token {token!r}", field=field,
                            offset=offset)
    return float(token)   # float("-0.00") keeps the negative zero


def parse_telemetry(s: str) -> TelemetryPacket:
    """Strict parse of the telemetry grammar; any deviation raises
    ProtocolError naming the field and byte offset."""
    if not isinstance(s, str):
        raise ProtocolError("payload must be a string")
    groups = s.split("|")
    offset = 0
    head = groups[0]
    m = re.match(r"^LAT:([^,]*),LON:(.*)$", head)
    if not m:
        raise ProtocolError("malformed LAT/LON group", field="LAT", offset=0)
    lat = _parse_number(m.group(1), "LAT", head.index(":") + 1)
    lon = _parse_number(m.group(2), "LON", head.rindex(":") + 1)
    offset += len(head) + 1

    fields = {"lat": lat, "lon": lon}
    for i, (tag, attr, arity) in enumerate(_GROUPS):
        if i + 1 >= len(groups):
            raise ProtocolError(f"missing field {tag}", field=tag, offset=offset)
        group = groups[i + 1]
        prefix = tag + ":"
        if not group.startswith(prefix):
            got = group.split(":", 1)[0]
            raise ProtocolError(
                f"expected field {tag}, found {got!r} (field order is fixed)",
                field=tag, offset=offset)
        tokens = group[len(prefix):].split(",")
        if len(tokens) != arity:
            raise ProtocolError(
                f"{tag} expects {arity} values, got {len(tokens)}",
                field=tag, offset=offset)
        vals = []
        tok_offset = offset + len(prefix)
        for tok in tokens:
            vals.append(_parse_number(tok, tag, tok_offset))
            tok_offset += len(tok) + 1
        fields[attr] = tuple(vals)
        offset += len(group) + 1
    if len(groups) > 1 + len(_GROUPS):
        raise ProtocolError(
            f"trailing data after {_GROUPS[-1][0]}", offset=offset)
    return TelemetryPacket(**fields)


_MOTOR_RE = re.compile(r"^M(\d+):(\w+)$")
_ACTIONS = {"forward": Action.FORWARD, "reverse": Action.REVERSE,
            "stop": Action.STOP}


def parse_command(s: str):
    """Parse one operator command frame.

    Grammar: `M<id>:<forward|reverse|stop>`, `HDG:<deg>`, `DEP:<m>`,
    `MISSION:<start|abort>`.
    """
    s = s.strip()
    m = _MOTOR_RE.match(s)
    if m:
        motor_id = int(m.group(1))
        if motor_id not in range(1, 7):
            raise ProtocolError(f"motor id {motor_id} out of range 1..6",
                                field="M")
        action = _ACTIONS.get(m.group(2))
        if action is None:
            raise ProtocolError(f"unknown motor state {m.group(2)!r}", field="M")
        return MotorCommand(motor_id=motor_id, action=action)
    if s.startswith("HDG:"):
        val = _parse_number(s[4:], "HDG", 4)
        return SetpointCommand(kind="heading", value=val % 360.0)
    if s.startswith("DEP:"):
        val = _parse_number(s[4:], "DEP", 4)
        if val < 0:
            raise ProtocolError("depth setpoint must be >= 0", field="DEP")
        return SetpointCommand(kind="depth", value=val)
    if s.startswith("MISSION:"):
        action = s[8:]
        if action not in ("start", "abort"):
            raise ProtocolError(f"unknown mission action {action!r}",
                                field="MISSION")
        return MissionCommand(action=action)
    raise ProtocolError(f"unknown command verb in {s!r}")


def link_rssi(depth: float, range_m: float, link: LinkParams) -> float:
    """Path RSSI in dBm: log-distance spreading plus linear water absorption."""
    if depth < 0 or range_m < 0:
        raise ProtocolError("depth and range must be >= 0")
    spreading = 20.0 * math.log10(max(range_m, 1.0) / link.r0_m)
    return link.rssi0_dbm - spreading - link.alpha_db_per_m * depth


def link_transmit(payload: str, depth: float, range_m: float,
                  rng: np.random.Generator,
                  link: LinkParams = LinkParams()) -> LinkReport:
    """Attempt one packet delivery; the RNG draw happens on every call so the
    seeded stream stays aligned regardless of signal level."""
    rssi = link_rssi(depth, range_m, link)
    lost_floor = rng.random() < link.p_loss_floor
    delivered = rssi >= link.sensitivity_dbm and not lost_floor
    return LinkReport(delivered=delivered, rssi_dbm=round(rssi))
