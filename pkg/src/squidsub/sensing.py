"""Simulated sensor suite: IMU, pressure-to-depth chain, surface GPS,
and the firmware-style dead-reckoning integrator.

All readings are pure functions of the true state (plus a seeded RNG for
noise), so identical seeds give bit-identical sensor streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import VehicleState, wrap_heading

DEG = math.pi / 180.0
METERS_PER_DEG_LAT = 111320.0


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian noise standard deviations for each sensor group."""

    euler_deg: float = 0.3
    gyro_dps: float = 0.05
    accel_ms2: float = 0.02
    gps_m: float = 1.5

    def __post_init__(self):
        for f in ("euler_deg", "gyro_dps", "accel_ms2", "gps_m"):
            if getattr(self, f) < 0:
                raise ValueError(f"noise std {f} must be >= 0")


@dataclass(frozen=True)
class SensorSpec:
    """Pressure transducer + ADC transfer constants and GPS gating."""

    v0: float = 0.5              # sensor offset voltage, V
    slope: float = 0.025         # V per kPa
    vref: float = 3.3            # ADC reference, V
    adc_bits: int = 12
    surface_threshold: float = 0.2   # max depth for a GPS fix, m


@dataclass(frozen=True)
class IMUSample:
    accel: tuple          # body-frame linear acceleration, m/s^2
    euler: tuple          # (heading, roll, pitch), deg
    gyro: tuple           # (roll, pitch, yaw) rates, deg/s
    quat: tuple           # (qx, qy, qz, qw), unit norm


@dataclass(frozen=True)
class PressureReading:
    kpa: float
    adc_counts: int
    depth_est: float


@dataclass(frozen=True)
class DeadReckonState:
    vel: tuple = (0.0, 0.0, 0.0)
    disp: tuple = (0.0, 0.0, 0.0)


def euler_to_quat(heading_deg, roll_deg, pitch_deg):
    """Z-Y-X (yaw-pitch-roll) Euler angles to an (x, y, z, w) quaternion."""
    hy = 0.5 * heading_deg * DEG
    hp = 0.5 * pitch_deg * DEG
    hr = 0.5 * roll_deg * DEG
    cy, sy = math.cos(hy), math.sin(hy)
    cp, sp = math.cos(hp), math.sin(hp)
    cr, sr = math.cos(hr), math.sin(hr)
    qw = cr * cp * cy + sr * sp * sy
    qx = sr * cp * cy - cr * sp * sy
    qy = cr * sp * cy + sr * cp * sy
    qz = cr * cp * sy - sr * sp * cy
    n = math.sqrt(qx * qx + qy * qy + qz * qz + qw * qw)
    return (qx / n, qy / n, qz / n, qw / n)


def quat_to_euler(q):
    """Inverse of euler_to_quat; returns (heading, roll, pitch) in degrees."""
    qx, qy, qz, qw = q
    sinr = 2 * (qw * qx + qy * qz)
    cosr = 1 - 2 * (qx * qx + qy * qy)
    roll = math.atan2(sinr, cosr)
    sinp = max(-1.0, min(1.0, 2 * (qw * qy - qz * qx)))
    pitch = math.asin(sinp)
    siny = 2 * (qw * qz + qx * qy)
    cosy = 1 - 2 * (qy * qy + qz * qz)
    heading = math.atan2(siny, cosy)
    return (wrap_heading(heading / DEG), roll / DEG, pitch / DEG)


def read_imu(state: VehicleState, prev: VehicleState | None, dt: float,
             noise: NoiseSpec, rng: np.random.Generator) -> IMUSample:
    """One IMU sample from the true state.

    Linear acceleration is the finite difference of body velocities over dt
    (gravity-compensated, matching the firmware's linear-acceleration output);
    the quaternion is derived from the noisy Euler angles.
    """
    if prev is not None and dt > 0:
        accel_true = ((state.u - prev.u) / dt, 0.0, (state.w - prev.w) / dt)
    else:
        accel_true = (0.0, 0.0, 0.0)
    accel = tuple(a + rng.normal(0.0, noise.accel_ms2) for a in accel_true)
    heading = wrap_heading(state.heading + rng.normal(0.0, noise.euler_deg))
    roll = state.roll + rng.normal(0.0, noise.euler_deg)
    pitch = state.pitch + rng.normal(0.0, noise.euler_deg)
    gyro = (state.p + rng.normal(0.0, noise.gyro_dps),
            state.q + rng.normal(0.0, noise.gyro_dps),
            state.r + rng.normal(0.0, noise.gyro_dps))
    return IMUSample(accel=accel, euler=(heading, roll, pitch), gyro=gyro,
                     quat=euler_to_quat(heading, roll, pitch))


def pressure_chain(depth: float, rho: float, g: float,
                   sensor: SensorSpec) -> PressureReading:
    """Hydrostatic pressure -> analog voltage -> ADC counts -> depth estimate."""
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    full_scale = (1 << sensor.adc_bits) - 1
    kpa = rho * g * depth / 1000.0
    voltage = min(max(sensor.v0 + sensor.slope * kpa, 0.0), sensor.vref)
    counts = round(voltage / sensor.vref * full_scale)
    v_q = counts / full_scale * sensor.vref
    kpa_q = max(0.0, (v_q - sensor.v0) / sensor.slope)
    depth_est = kpa_q * 1000.0 / (rho * g)
    return PressureReading(kpa=kpa, adc_counts=counts, depth_est=depth_est)


def gps_fix(state: VehicleState, ref: tuple, sensor: SensorSpec,
            noise: NoiseSpec, rng: np.random.Generator):
    """Latitude/longitude fix, or None when submerged below the antenna gate."""
    lat0, lon0 = ref
    if state.depth > sensor.surface_threshold:
        return None
    north = state.x + rng.normal(0.0, noise.gps_m)
    east = state.y + rng.normal(0.0, noise.gps_m)
    lat = lat0 + north / METERS_PER_DEG_LAT
    lon = lon0 + east / (METERS_PER_DEG_LAT * math.cos(lat0 * DEG))
    return (lat, lon)


def dead_reckon(dr: DeadReckonState, accel, dt: float) -> DeadReckonState:
    """Explicit-Euler velocity/displacement integration, drift and all.

    Faithfully replicates the firmware scheme: vel += a*dt, then
    disp += vel*dt with the freshly updated velocity.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    vel = tuple(v + a * dt for v, a in zip(dr.vel, accel))
    disp = tuple(d + v * dt for d, v in zip(dr.disp, vel))
    return DeadReckonState(vel=vel, disp=disp)
