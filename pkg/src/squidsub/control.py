"""Closed-loop heading, depth, and pitch control plus ballast allocation.

Controllers are PID with derivative-on-measurement and a clamped integrator.
Heading error is always computed on the shortest angular arc. Depth and pitch
loops emit signed volume-rate demands which `allocate` converts into on/off
ballast motor commands with a chatter deadband.
"""

from __future__ import annotations

from dataclasses import dataclass

from .actuation import (Action, BallastCylinder, LimitHit, MotorCommand,
                        MOTOR_FRONT_BALLAST, MOTOR_REAR_BALLAST)


@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float
    kd: float
    i_limit: float
    out_limit: float
    d_tau: float = 0.0    # derivative low-pass time constant, s (0 = raw)

    def __post_init__(self):
        if self.i_limit <= 0 or self.out_limit <= 0:
            raise ValueError("integral and output limits must be positive")
        if min(self.kp, self.ki, self.kd, self.d_tau) < 0:
            raise ValueError("PID gains must be >= 0")


@dataclass(frozen=True)
class PidState:
    integral: float = 0.0
    prev_meas: float | None = None
    d_filt: float = 0.0


@dataclass(frozen=True)
class Setpoints:
    heading_deg: float = 0.0
    depth_m: float = 0.0
    pitch_deg: float = 0.0
    surge_drive: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.heading_deg < 360.0:
            object.__setattr__(self, "heading_deg", self.heading_deg % 360.0)
        if self.depth_m < 0:
            raise ValueError("depth setpoint must be >= 0")


def angle_error(sp_deg: float, meas_deg: float) -> float:
    """Shortest-arc angular error sp - meas, in (-180, 180]."""
    e = (sp_deg - meas_deg) % 360.0
    if e > 180.0:
        e -= 360.0
    return e


def _pid(error: float, meas: float, dt: float, gains: PidGains,
         state: PidState, angular: bool) -> tuple:
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if state.prev_meas is None:
        dmeas = 0.0
    elif angular:
        dmeas = angle_error(meas, state.prev_meas) / dt
    else:
        dmeas = (meas - state.prev_meas) / dt
    if gains.d_tau > 0:
        alpha = dt / (gains.d_tau + dt)
        dmeas = state.d_filt + alpha * (dmeas - state.d_filt)
    integral = state.integral + gains.ki * error * dt
    integral = max(-gains.i_limit, min(gains.i_limit, integral))
    raw = gains.kp * error + integral - gains.kd * dmeas
    # clamping anti-windup: while saturated in the error's direction, the
    # integrator holds instead of accumulating
    if (raw > gains.out_limit and error > 0) or (raw < -gains.out_limit and error < 0):
        integral = state.integral
        raw = gains.kp * error + integral - gains.kd * dmeas
    out = max(-gains.out_limit, min(gains.out_limit, raw))
    return out, PidState(integral=integral, prev_meas=meas, d_filt=dmeas)


def heading_control(sp_deg: float, meas_deg: float, dt: float,
                    gains: PidGains, state: PidState) -> tuple:
    """Differential steering drive in [-out_limit, out_limit].

    Positive output means right jet forward / left jet reversed, turning the
    vehicle clockwise (increasing heading).
    """
    return _pid(angle_error(sp_deg, meas_deg), meas_deg, dt, gains, state,
                angular=True)


def steering_drives(differential: float) -> tuple:
    """Map the differential command to (left, right) steering pump drives."""
    d = max(-1.0, min(1.0, differential))
    return (-d, d)


def depth_control(sp_m: float, meas_m: float, dt: float,
                  gains: PidGains, state: PidState) -> tuple:
    """Signed total ballast volume-rate demand, m^3/s; positive = intake."""
    return _pid(sp_m - meas_m, meas_m, dt, gains, state, angular=False)


def pitch_control(sp_deg: float, meas_deg: float, dt: float,
                  gains: PidGains, state: PidState) -> tuple:
    """Signed differential (front - rear) volume-rate demand, m^3/s.

    Positive demand fills the front cylinder relative to the rear, pitching
    in the positive-theta direction.
    """
    return _pid(sp_deg - meas_deg, meas_deg, dt, gains, state, angular=False)


def _blocked(cyl: BallastCylinder, rate: float) -> bool:
    if rate > 0 and cyl.limit_hit == LimitHit.FULL:
        return True
    if rate < 0 and cyl.limit_hit == LimitHit.EMPTY:
        return True
    return False


def _rate_command(motor_id: int, rate: float, deadband: float) -> MotorCommand:
    if rate > deadband:
        return MotorCommand(motor_id=motor_id, action=Action.FORWARD)
    if rate < -deadband:
        return MotorCommand(motor_id=motor_id, action=Action.REVERSE)
    return MotorCommand(motor_id=motor_id, action=Action.STOP)


def allocate(total_demand: float, diff_demand: float,
             cyl_front: BallastCylinder, cyl_rear: BallastCylinder,
             deadband: float = 1e-6) -> tuple:
    """Convert (total, differential) volume-rate demands into ballast motor
    commands for channels 5 (front) and 6 (rear).

    If one cylinder cannot move in its commanded direction because its limit
    switch is latched, only the total component of its share is shed to the
    other cylinder; the differential component is never shed.
    """
    rate_front = (total_demand + diff_demand) / 2.0
    rate_rear = (total_demand - diff_demand) / 2.0

    if _blocked(cyl_front, rate_front) and not _blocked(cyl_rear, rate_rear):
        rate_rear += total_demand / 2.0
        rate_front = 0.0
    elif _blocked(cyl_rear, rate_rear) and not _blocked(cyl_front, rate_front):
        rate_front += total_demand / 2.0
        rate_rear = 0.0
    elif _blocked(cyl_front, rate_front) and _blocked(cyl_rear, rate_rear):
        rate_front = rate_rear = 0.0

    return (_rate_command(MOTOR_FRONT_BALLAST, rate_front, deadband),
            _rate_command(MOTOR_REAR_BALLAST, rate_rear, deadband))
