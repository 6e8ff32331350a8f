"""Six-channel actuator model: propulsion/steering pumps and ballast motors.

Channels 1-4 are pump drives with instantaneous response; channels 5-6 are
ballast cylinder motors with finite fill rate and latching limit switches at
both travel ends, mirroring the firmware's falling-edge interrupt behavior.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .dynamics import ControlInputs

MOTOR_FRONT_PROP = 1
MOTOR_REAR_PROP = 2
MOTOR_LEFT_STEER = 3
MOTOR_RIGHT_STEER = 4
MOTOR_FRONT_BALLAST = 5
MOTOR_REAR_BALLAST = 6


class ActuationError(ValueError):
    pass


class BallastMotor(enum.Enum):
    INTAKE = "intake"
    RELEASE = "release"
    STOPPED = "stopped"


class LimitHit(enum.Enum):
    NONE = "none"
    FULL = "full"
    EMPTY = "empty"


class Action(enum.Enum):
    FORWARD = "forward"
    REVERSE = "reverse"
    STOP = "stop"


@dataclass(frozen=True)
class MotorCommand:
    motor_id: int
    action: Action
    magnitude: float = 1.0

    def __post_init__(self):
        if self.motor_id not in range(1, 7):
            raise ActuationError(f"motor_id out of range: {self.motor_id}")
        if not 0.0 <= self.magnitude <= 1.0:
            raise ActuationError(f"magnitude out of range: {self.magnitude}")


@dataclass(frozen=True)
class BallastCylinder:
    """Variable-fill water cylinder. fill in [0, capacity] m^3."""

    capacity: float = 1.5e-4
    fill: float = 0.0
    rate: float = 2e-5            # m^3/s while the motor runs
    motor: BallastMotor = BallastMotor.STOPPED
    limit_hit: LimitHit = LimitHit.NONE

    def __post_init__(self):
        if not 0.0 <= self.fill <= self.capacity:
            raise ActuationError(
                f"fill {self.fill} outside [0, {self.capacity}]")


@dataclass(frozen=True)
class ActuatorState:
    """Full actuator bank: four pump drive levels plus two cylinders."""

    front_prop: float = 0.0       # signed drive in [-1, 1]
    rear_prop: float = 0.0
    left_steer: float = 0.0
    right_steer: float = 0.0
    cyl_front: BallastCylinder = BallastCylinder()
    cyl_rear: BallastCylinder = BallastCylinder()


_PUMP_FIELDS = {
    MOTOR_FRONT_PROP: "front_prop",
    MOTOR_REAR_PROP: "rear_prop",
    MOTOR_LEFT_STEER: "left_steer",
    MOTOR_RIGHT_STEER: "right_steer",
}


def _apply_ballast(cyl: BallastCylinder, action: Action) -> BallastCylinder:
    if action == Action.STOP:
        return replace(cyl, motor=BallastMotor.STOPPED)
    want = BallastMotor.INTAKE if action == Action.FORWARD else BallastMotor.RELEASE
    # a latched limit blocks same-direction commands; the opposite direction
    # clears the latch and starts the motor
    if cyl.limit_hit == LimitHit.FULL:
        if want == BallastMotor.INTAKE:
            return cyl
        return replace(cyl, motor=want, limit_hit=LimitHit.NONE)
    if cyl.limit_hit == LimitHit.EMPTY:
        if want == BallastMotor.RELEASE:
            return cyl
        return replace(cyl, motor=want, limit_hit=LimitHit.NONE)
    return replace(cyl, motor=want)


def apply_command(actuators: ActuatorState, cmd: MotorCommand) -> ActuatorState:
    """Apply one motor command; invalid ids leave the state unchanged."""
    if cmd.motor_id in _PUMP_FIELDS:
        if cmd.action == Action.STOP:
            drive = 0.0
        elif cmd.action == Action.FORWARD:
            drive = cmd.magnitude
        else:
            drive = -cmd.magnitude
        return replace(actuators, **{_PUMP_FIELDS[cmd.motor_id]: drive})
    if cmd.motor_id == MOTOR_FRONT_BALLAST:
        return replace(actuators, cyl_front=_apply_ballast(actuators.cyl_front, cmd.action))
    if cmd.motor_id == MOTOR_REAR_BALLAST:
        return replace(actuators, cyl_rear=_apply_ballast(actuators.cyl_rear, cmd.action))
    raise ActuationError(f"motor_id out of range: {cmd.motor_id}")


def ballast_step(cyl: BallastCylinder, dt: float) -> BallastCylinder:
    """Advance the cylinder fill by dt seconds of motor run time.

    Hitting either travel end inside the step clamps the fill exactly to the
    bound, stops the motor, and latches the limit switch.
    """
    if dt <= 0:
        raise ActuationError(f"dt must be positive, got {dt}")
    if cyl.motor == BallastMotor.STOPPED:
        # a release command issued at empty (or intake at full) latches
        # immediately without motion
        return cyl
    direction = 1.0 if cyl.motor == BallastMotor.INTAKE else -1.0
    fill = cyl.fill + direction * cyl.rate * dt
    if fill >= cyl.capacity:
        return replace(cyl, fill=cyl.capacity, motor=BallastMotor.STOPPED,
                       limit_hit=LimitHit.FULL)
    if fill <= 0.0:
        return replace(cyl, fill=0.0, motor=BallastMotor.STOPPED,
                       limit_hit=LimitHit.EMPTY)
    return replace(cyl, fill=fill)


def control_inputs(actuators: ActuatorState, neutral: float) -> ControlInputs:
    """Map actuator bank to dynamics inputs; dV measured against neutral fill."""
    if not 0.0 <= neutral <= min(actuators.cyl_front.capacity,
                                 actuators.cyl_rear.capacity):
        raise ActuationError(f"neutral fill {neutral} outside cylinder range")
    return ControlInputs(
        w_p1=actuators.front_prop,
        w_p2=actuators.rear_prop,
        w_sL=actuators.left_steer,
        w_sR=actuators.right_steer,
        dV1=actuators.cyl_front.fill - neutral,
        dV2=actuators.cyl_rear.fill - neutral,
    )
