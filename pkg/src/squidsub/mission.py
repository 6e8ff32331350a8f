"""Water-sampling mission executor.

Phase sequence: idle -> transit -> descend -> sampling -> ascend ->
return_home -> done, with abort reachable from any active phase. The ballast
cylinders double as sampling chambers: water taken in during the sampling
phase is credited as sample and must be retained through ascent and return.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .sensing import METERS_PER_DEG_LAT

DEG = math.pi / 180.0


class Phase(enum.Enum):
    IDLE = "idle"
    TRANSIT = "transit"
    DESCEND = "descend"
    SAMPLING = "sampling"
    ASCEND = "ascend"
    RETURN_HOME = "return_home"
    DONE = "done"
    ABORTED = "aborted"


# forward order used to enforce phase monotonicity
PHASE_ORDER = (Phase.IDLE, Phase.TRANSIT, Phase.DESCEND, Phase.SAMPLING,
               Phase.ASCEND, Phase.RETURN_HOME, Phase.DONE)


@dataclass(frozen=True)
class MissionPlan:
    target: tuple                 # (lat, lon) of the sampling point
    home: tuple                   # (lat, lon) of the recovery point
    sample_depth: float = 0.13    # m
    sample_volume: float = 5e-5   # m^3
    capture_radius: float = 2.0   # m
    surge_drive: float = 0.8      # propulsion drive during transit
    gps_timeout: float = 10.0     # s without a fix in a transit phase -> abort
    depth_tolerance: float = 0.04  # m band that completes the descend phase
    settle_time: float = 2.0      # s the band must hold before sampling starts

    def __post_init__(self):
        if self.sample_depth < 0:
            raise ValueError("sample_depth must be >= 0")
        if self.sample_volume <= 0:
            raise ValueError("sample_volume must be positive")
        if self.capture_radius <= 0:
            raise ValueError("capture_radius must be positive")


@dataclass(frozen=True)
class MissionStatus:
    phase: Phase = Phase.IDLE
    sampled: float = 0.0          # cumulative sampling intake, m^3
    phase_start: float = 0.0      # sim time the current phase began, s
    last_fix_time: float | None = None
    last_bearing: float = 0.0     # held between GPS fixes, deg
    band_since: float | None = None   # when the descend band was entered
    abort_reason: str | None = None
    buoyancy_limited: bool = False


@dataclass(frozen=True)
class MissionDirective:
    """Per-tick guidance output consumed by the simulation loop."""

    heading_sp: float
    depth_sp: float
    surge_drive: float
    sample_intake: bool = False    # force front-cylinder intake this tick
    sample_floor: float = 0.0      # min front-cylinder fill to preserve, m^3


def flat_earth_offset(origin: tuple, point: tuple) -> tuple:
    """(north, east) meters from origin to point on the local tangent plane."""
    lat0, lon0 = origin
    lat, lon = point
    north = (lat - lat0) * METERS_PER_DEG_LAT
    east = (lon - lon0) * METERS_PER_DEG_LAT * math.cos(lat0 * DEG)
    return (north, east)


def bearing(frm: tuple, to: tuple) -> float:
    """Flat-earth bearing in [0, 360); 0 = north, 90 = east.

    Coincident points are defined to bear 0.
    """
    north, east = flat_earth_offset(frm, to)
    if north == 0.0 and east == 0.0:
        return 0.0
    return math.atan2(east, north) / DEG % 360.0


def distance_m(a: tuple, b: tuple) -> float:
    north, east = flat_earth_offset(a, b)
    return math.hypot(north, east)


def _enter(status: MissionStatus, phase: Phase, t: float) -> MissionStatus:
    return replace(status, phase=phase, phase_start=t)


def mission_step(status: MissionStatus, plan: MissionPlan, fix, depth: float,
                 heading: float, t: float) -> tuple:
    """Advance the mission one control tick.

    fix is the latest GPS (lat, lon) or None when no fix is available this
    tick. Returns (MissionDirective, MissionStatus).
    """
    directive = MissionDirective(heading_sp=status.last_bearing, depth_sp=0.0,
                                 surge_drive=0.0,
                                 sample_floor=status.sampled)
    if status.phase in (Phase.IDLE, Phase.DONE, Phase.ABORTED):
        return directive, status

    if fix is not None:
        status = replace(status, last_fix_time=t)

    # GPS outage watchdog for the surface phases
    if status.phase in (Phase.TRANSIT, Phase.RETURN_HOME):
        last = status.last_fix_time
        if last is None:
            last = status.phase_start
        if fix is None and t - last > plan.gps_timeout:
            status = replace(status, phase=Phase.ABORTED,
                             abort_reason="gps timeout", phase_start=t)
            return directive, status

    if status.phase == Phase.TRANSIT:
        if fix is not None:
            brg = bearing(fix, plan.target)
            status = replace(status, last_bearing=brg)
            if distance_m(fix, plan.target) <= plan.capture_radius:
                status = _enter(status, Phase.DESCEND, t)
        directive = replace(directive, heading_sp=status.last_bearing,
                            surge_drive=plan.surge_drive)

    if status.phase == Phase.DESCEND:
        directive = MissionDirective(heading_sp=status.last_bearing,
                                     depth_sp=plan.sample_depth,
                                     surge_drive=0.0,
                                     sample_floor=status.sampled)
        if abs(depth - plan.sample_depth) <= plan.depth_tolerance:
            if status.band_since is None:
                status = replace(status, band_since=t)
            if t - status.band_since >= plan.settle_time:
                status = _enter(status, Phase.SAMPLING, t)
        else:
            status = replace(status, band_since=None)

    if status.phase == Phase.SAMPLING:
        directive = MissionDirective(heading_sp=status.last_bearing,
                                     depth_sp=plan.sample_depth,
                                     surge_drive=0.0,
                                     sample_intake=status.sampled < plan.sample_volume,
                                     sample_floor=status.sampled)
        if status.sampled >= plan.sample_volume:
            status = _enter(status, Phase.ASCEND, t)

    if status.phase == Phase.ASCEND:
        directive = MissionDirective(heading_sp=status.last_bearing,
                                     depth_sp=0.0, surge_drive=0.0,
                                     sample_floor=status.sampled)
        if depth <= 0.05:
            status = _enter(status, Phase.RETURN_HOME, t)
            status = replace(status, last_fix_time=None)

    if status.phase == Phase.RETURN_HOME:
        if fix is not None:
            brg = bearing(fix, plan.home)
            status = replace(status, last_bearing=brg)
            if distance_m(fix, plan.home) <= plan.capture_radius:
                status = _enter(status, Phase.DONE, t)
        directive = replace(directive, heading_sp=status.last_bearing,
                            depth_sp=0.0,
                            surge_drive=plan.surge_drive,
                            sample_intake=False,
                            sample_floor=status.sampled)
        if status.phase == Phase.DONE:
            directive = replace(directive, surge_drive=0.0)

    return directive, status


def record_sample(status: MissionStatus, intake_volume: float) -> MissionStatus:
    """Credit sampling-phase intake volume toward the sample total."""
    if intake_volume < 0:
        raise ValueError("intake volume must be >= 0")
    return replace(status, sampled=status.sampled + intake_volume)
