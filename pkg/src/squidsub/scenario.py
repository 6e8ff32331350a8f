"""Line-oriented scenario file format.

A scenario fixes everything a run needs: timing, seed, initial state,
parameter overrides, scripted operator commands, and an optional mission
plan. Example:

    name heading_step
    duration 60
    physics_dt 0.01
    control_dt 0.02
    seed 7
    init heading 90
    at 0 HDG:90
    at 20 HDG:180

Directives:
    name <str>                      scenario label
    duration <s>                    total sim time
    physics_dt <s> / control_dt <s> fixed steps (control an integer multiple)
    seed <int>                      RNG seed
    init <state field> <value>      initial VehicleState override
    param <key> <value>             parameter override (flat namespace)
    at <t> <command>                inject a command frame at sim time t
    ramp <t0> HDG <from> <to> <rate_deg_s>  ramped heading setpoint
    mission <field> <value>         mission plan entry (target_lat, target_lon,
                                    home_lat, home_lon, sample_depth,
                                    sample_volume, capture_radius)
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from .dynamics import VehicleState
from .mission import MissionPlan
from .params import DEFAULTS


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class RampEvent:
    t_start: float
    start_deg: float
    end_deg: float
    rate_deg_s: float

    def setpoint_at(self, t: float) -> float | None:
        if t < self.t_start:
            return None
        span = self.end_deg - self.start_deg
        progress = self.rate_deg_s * (t - self.t_start)
        if abs(progress) >= abs(span):
            return self.end_deg
        return self.start_deg + progress if span >= 0 else self.start_deg - progress


@dataclass
class Scenario:
    name: str = "unnamed"
    duration: float = 30.0
    physics_dt: float = 0.01
    control_dt: float = 0.02
    seed: int = 0
    initial: dict = field(default_factory=dict)
    overrides: dict = field(default_factory=dict)
    events: list = field(default_factory=list)      # (t, command string)
    ramps: list = field(default_factory=list)       # RampEvent
    mission: MissionPlan | None = None

    def validate(self):
        if self.duration <= 0:
            raise ScenarioError("duration must be positive")
        if self.physics_dt <= 0 or self.control_dt <= 0:
            raise ScenarioError("time steps must be positive")
        ratio = self.control_dt / self.physics_dt
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ScenarioError(
                "control_dt must be an integer multiple of physics_dt")
        return self

    def initial_state(self) -> VehicleState:
        return VehicleState(**self.initial)


_STATE_FIELDS = {f.name for f in fields(VehicleState)}
_MISSION_FIELDS = ("target_lat", "target_lon", "home_lat", "home_lon",
                   "sample_depth", "sample_volume", "capture_radius",
                   "surge_drive", "gps_timeout", "depth_tolerance", "settle_time")


def parse_scenario(text: str) -> Scenario:
    sc = Scenario()
    mission_raw = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0]
        try:
            if key == "name":
                sc.name = tokens[1]
            elif key in ("duration", "physics_dt", "control_dt"):
                setattr(sc, key, float(tokens[1]))
            elif key == "seed":
                sc.seed = int(tokens[1])
            elif key == "init":
                if tokens[1] not in _STATE_FIELDS:
                    raise ScenarioError(f"unknown state field {tokens[1]!r}")
                sc.initial[tokens[1]] = float(tokens[2])
            elif key == "param":
                if tokens[1] not in DEFAULTS:
                    raise ScenarioError(f"unknown parameter {tokens[1]!r}")
                sc.overrides[tokens[1]] = float(tokens[2])
            elif key == "at":
                sc.events.append((float(tokens[1]), " ".join(tokens[2:])))
            elif key == "ramp":
                if tokens[2] != "HDG":
                    raise ScenarioError("only HDG ramps are supported")
                sc.ramps.append(RampEvent(t_start=float(tokens[1]),
                                          start_deg=float(tokens[3]),
                                          end_deg=float(tokens[4]),
                                          rate_deg_s=float(tokens[5])))
            elif key == "mission":
                if tokens[1] not in _MISSION_FIELDS:
                    raise ScenarioError(f"unknown mission field {tokens[1]!r}")
                mission_raw[tokens[1]] = float(tokens[2])
            else:
                raise ScenarioError(f"unknown directive {key!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, ScenarioError):
                raise ScenarioError(f"line {lineno}: {exc}") from None
            raise ScenarioError(f"line {lineno}: malformed directive {line!r}") from None
    if mission_raw:
        for want in ("target_lat", "target_lon", "home_lat", "home_lon"):
            if want not in mission_raw:
                raise ScenarioError(f"mission plan missing {want}")
        kwargs = {k: v for k, v in mission_raw.items()
                  if k not in ("target_lat", "target_lon", "home_lat", "home_lon")}
        sc.mission = MissionPlan(
            target=(mission_raw["target_lat"], mission_raw["target_lon"]),
            home=(mission_raw["home_lat"], mission_raw["home_lon"]),
            **kwargs)
    sc.events.sort(key=lambda e: e[0])
    return sc.validate()


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())
