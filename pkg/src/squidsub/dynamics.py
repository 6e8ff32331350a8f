"""Decoupled 4-DOF submarine dynamics: surge, yaw, heave, pitch.

The motion model treats the four controlled axes as independent first-order
channels driven by pump thrust and ballast volume offsets, plus planar
kinematics and a passive damped-oscillator roll channel.  All functions are
pure; integration is fixed-step classical RK4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

DEG = math.pi / 180.0


class DynamicsError(ValueError):
    """Raised for invalid parameters, non-finite inputs, or numerical blow-up."""


@dataclass(frozen=True)
class VehicleParams:
    """Physical coefficients of the 4-DOF model plus hull geometry.

    Units are SI throughout: kg, m, s, N, rad for internal stiffness/damping
    terms. Angular state is kept in degrees at the interface.
    """

    m_u: float = 8.0          # effective surge mass, kg
    m_w: float = 5.0          # effective heave mass, kg
    I_z: float = 0.06         # yaw inertia, kg m^2
    I_y: float = 0.35         # pitch inertia, kg m^2
    d_u: float = 4.0          # surge damping, N s/m
    d_r: float = 0.15         # yaw damping, N m s/rad
    d_w: float = 4.5          # heave damping, N s/m
    d_q: float = 0.8          # pitch damping, N m s/rad
    k_p: float = 1.25         # propulsion gain, N per unit drive
    k_s: float = 0.06         # steering moment gain, N m per unit drive
    l_b: float = 0.25         # ballast cylinder lever arm, m
    k_theta: float = 6.0      # pitch restoring coefficient, N m/rad
    rho: float = 1000.0       # water density, kg/m^3
    g: float = 9.81           # gravity, m/s^2
    V_hull: float = 5.8905e-3  # displaced hull volume, m^3
    m_dry: float = 5.80       # vehicle dry mass, kg
    roll_stiffness: float = 4.0   # passive roll restoring, 1/s^2 (unit inertia)
    roll_damping: float = 1.2     # passive roll damping, 1/s

    def __post_init__(self):
        positive = ("m_u", "m_w", "I_z", "I_y", "d_u", "d_r", "d_w", "d_q",
                    "rho", "g", "V_hull", "m_dry",
                    "roll_stiffness", "roll_damping")
        for name in positive:
            if not getattr(self, name) > 0:
                raise DynamicsError(f"parameter {name} must be strictly positive")
        if self.k_theta < 0:
            raise DynamicsError("k_theta must be >= 0")
        if self.l_b < 0:
            raise DynamicsError("l_b must be >= 0")


@dataclass(frozen=True)
class VehicleState:
    """True vehicle state. x north, y east, depth positive down.

    heading/pitch/roll in degrees, heading wrapped to [0, 360);
    u, w in m/s; r, q, p in deg/s.
    """

    x: float = 0.0
    y: float = 0.0
    depth: float = 0.0
    heading: float = 0.0
    pitch: float = 0.0
    roll: float = 0.0
    u: float = 0.0
    r: float = 0.0
    w: float = 0.0
    q: float = 0.0
    p: float = 0.0       # roll rate, deg/s (passive channel)
    t: float = 0.0

    def values(self):
        return tuple(getattr(self, f.name) for f in fields(self))


@dataclass(frozen=True)
class ControlInputs:
    """Actuator inputs to the motion model.

    Pump drives are dimensionless in [-1, 1]; dV1/dV2 are ballast volume
    offsets from neutral fill in m^3 (front, rear). roll_disturbance is an
    external roll torque (deg/s^2 at unit inertia) injected by the harness.
    """

    w_p1: float = 0.0
    w_p2: float = 0.0
    w_sL: float = 0.0
    w_sR: float = 0.0
    dV1: float = 0.0
    dV2: float = 0.0
    roll_disturbance: float = 0.0


# state vector layout used by the integrator (excludes t)
_STATE_KEYS = ("x", "y", "depth", "heading", "pitch", "roll",
               "u", "r", "w", "q", "p")


def _check_finite(state: VehicleState, inputs: ControlInputs):
    for k in _STATE_KEYS:
        if not math.isfinite(getattr(state, k)):
            raise DynamicsError(f"non-finite state variable {k}")
    for k in ("w_p1", "w_p2", "w_sL", "w_sR", "dV1", "dV2", "roll_disturbance"):
        if not math.isfinite(getattr(inputs, k)):
            raise DynamicsError(f"non-finite input {k}")


def derivatives(state: VehicleState, params: VehicleParams,
                inputs: ControlInputs) -> dict:
    """Time derivatives of the state vector under the decoupled 4-DOF model.

    Returns a dict keyed like the state fields (t excluded). Angular rates
    are handled in degrees at the interface; stiffness/damping act in rad.
    """
    _check_finite(state, inputs)
    p = params
    r_rad = state.r * DEG
    q_rad = state.q * DEG
    theta_rad = state.pitch * DEG
    phi_rad = state.roll * DEG
    p_rad = state.p * DEG

    du = (p.k_p * (inputs.w_p1 + inputs.w_p2) - p.d_u * state.u) / p.m_u
    dr = (p.k_s * (inputs.w_sR - inputs.w_sL) - p.d_r * r_rad) / p.I_z
    dw = (p.rho * p.g * (inputs.dV1 + inputs.dV2) - p.d_w * state.w) / p.m_w
    dq = (p.rho * p.g * p.l_b * (inputs.dV1 - inputs.dV2)
          - p.d_q * q_rad - p.k_theta * theta_rad) / p.I_y
    # passive roll oscillator at unit inertia; disturbance enters directly
    dp = (-p.roll_stiffness * phi_rad - p.roll_damping * p_rad
          + inputs.roll_disturbance * DEG)

    psi_rad = state.heading * DEG
    return {
        "x": state.u * math.cos(psi_rad),
        "y": state.u * math.sin(psi_rad),
        "depth": state.w,
        "heading": state.r,
        "pitch": state.q,
        "roll": state.p,
        "u": du,
        "r": dr / DEG,
        "w": dw,
        "q": dq / DEG,
        "p": dp / DEG,
    }


def wrap_heading(deg: float) -> float:
    """Wrap an angle into [0, 360)."""
    wrapped = math.fmod(deg, 360.0)
    if wrapped < 0:
        wrapped += 360.0
    return wrapped


def step(state: VehicleState, params: VehicleParams, inputs: ControlInputs,
         dt: float) -> VehicleState:
    """Advance the state one fixed RK4 step of length dt.

    Heading is wrapped to [0, 360); the surface clamps depth at zero and
    kills any remaining upward heave.
    """
    if not 0 < dt <= 0.1:
        raise DynamicsError(f"dt must be in (0, 0.1], got {dt}")
    y0 = {k: getattr(state, k) for k in _STATE_KEYS}

    def deriv_at(y):
        probe = replace(state, **y)
        return derivatives(probe, params, inputs)

    k1 = deriv_at(y0)
    k2 = deriv_at({k: y0[k] + 0.5 * dt * k1[k] for k in _STATE_KEYS})
    k3 = deriv_at({k: y0[k] + 0.5 * dt * k2[k] for k in _STATE_KEYS})
    k4 = deriv_at({k: y0[k] + dt * k3[k] for k in _STATE_KEYS})

    new = {}
    for k in _STATE_KEYS:
        v = y0[k] + dt / 6.0 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k])
        if not math.isfinite(v):
            raise DynamicsError(f"numerical blow-up in state variable {k}")
        new[k] = v

    new["heading"] = wrap_heading(new["heading"])
    if new["depth"] <= 0.0:
        new["depth"] = 0.0
        if new["w"] < 0.0:
            new["w"] = 0.0
    return replace(state, t=state.t + dt, **new)


def neutral_fill(params: VehicleParams) -> float:
    """Per-vehicle total ballast water volume (m^3) for neutral buoyancy.

    Balances weight against hull displacement: (m_dry + rho*V_fill)*g =
    rho*V_hull*g.
    """
    v = params.V_hull - params.m_dry / params.rho
    if v < 0:
        raise DynamicsError("vehicle negatively buoyant when empty")
    return v
