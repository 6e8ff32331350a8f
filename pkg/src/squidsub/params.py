"""Flat `name = value` parameter file handling and the canonical defaults.

One namespace covers the plant coefficients, actuator limits, sensor specs,
controller gains, and link model. Unknown keys are rejected so typos cannot
silently fall back to defaults.
"""

from __future__ import annotations

from dataclasses import dataclass

from .control import PidGains
from .dynamics import VehicleParams
from .protocol import LinkParams
from .sensing import NoiseSpec, SensorSpec


class ParamError(ValueError):
    pass


# canonical defaults; controller gains come from the calibration sweep
# (see sim-harness `calibrate`), everything else from hull geometry and
# engineering judgment
DEFAULTS = {
    # plant
    "m_u": 8.0, "m_w": 5.0, "I_z": 0.06, "I_y": 0.35,
    "d_u": 4.0, "d_r": 0.15, "d_w": 4.5, "d_q": 0.8,
    "k_p": 1.25, "k_s": 0.06, "l_b": 0.25, "k_theta": 6.0,
    "rho": 1000.0, "g": 9.81, "V_hull": 5.8905e-3, "m_dry": 5.80,
    "roll_stiffness": 4.0, "roll_damping": 1.2,
    # roll excitation (harness-injected disturbance)
    "roll_jet_gain": 4.0,        # deg/s^2 of roll torque per unit steering diff
    "roll_noise_std": 0.6,       # deg/s^2 random roll torque std
    # actuation
    "ballast_capacity": 1.5e-4,
    "ballast_rate": 2e-5,
    "ballast_deadband": 1e-6,
    # sensing
    "sensor_v0": 0.5, "sensor_slope": 0.025, "sensor_vref": 3.3,
    "surface_threshold": 0.2,
    "noise_euler": 0.3, "noise_gyro": 0.05, "noise_accel": 0.02,
    "noise_gps": 1.5,
    "ref_lat": 21.027252, "ref_lon": 105.851954,
    # control loops
    "heading_kp": 0.1, "heading_ki": 0.09, "heading_kd": 0.025,
    "heading_ilimit": 0.5, "heading_outlimit": 1.0,
    "heading_dtau": 0.0,
    "depth_kp": 3.15e-4, "depth_ki": 1e-6, "depth_kd": 9e-4,
    "depth_ilimit": 2e-5, "depth_outlimit": 4e-5, "depth_dtau": 0.2,
    "pitch_kp": 5e-6, "pitch_ki": 5e-7, "pitch_kd": 2e-6,
    "pitch_ilimit": 1e-5, "pitch_outlimit": 4e-5, "pitch_dtau": 0.2,
    # link
    "link_rssi0": -50.0, "link_r0": 10.0, "link_alpha": 25.0,
    "link_sensitivity": -120.0, "link_loss_floor": 0.02,
    "link_bench_range": 25.0,    # ground-station range used in scenarios, m
    # telemetry
    "telemetry_interval": 2.0,   # s of sim time between packets
    "gps_interval": 1.0,         # s between GPS fix attempts
}

_VEHICLE_KEYS = ("m_u", "m_w", "I_z", "I_y", "d_u", "d_r", "d_w", "d_q",
                 "k_p", "k_s", "l_b", "k_theta", "rho", "g", "V_hull",
                 "m_dry", "roll_stiffness", "roll_damping")


@dataclass(frozen=True)
class SimParams:
    """Typed view over a flat parameter dict."""

    values: tuple   # sorted (key, value) pairs, kept hashable

    @classmethod
    def from_dict(cls, d: dict) -> "SimParams":
        unknown = set(d) - set(DEFAULTS)
        if unknown:
            raise ParamError(f"unknown parameter keys: {sorted(unknown)}")
        merged = dict(DEFAULTS)
        merged.update(d)
        return cls(values=tuple(sorted(merged.items())))

    def as_dict(self) -> dict:
        return dict(self.values)

    def __getitem__(self, key):
        d = self.as_dict()
        if key not in d:
            raise ParamError(f"unknown parameter key: {key}")
        return d[key]

    def vehicle(self) -> VehicleParams:
        d = self.as_dict()
        return VehicleParams(**{k: d[k] for k in _VEHICLE_KEYS})

    def noise(self) -> NoiseSpec:
        d = self.as_dict()
        return NoiseSpec(euler_deg=d["noise_euler"], gyro_dps=d["noise_gyro"],
                         accel_ms2=d["noise_accel"], gps_m=d["noise_gps"])

    def sensor(self) -> SensorSpec:
        d = self.as_dict()
        return SensorSpec(v0=d["sensor_v0"], slope=d["sensor_slope"],
                          vref=d["sensor_vref"],
                          surface_threshold=d["surface_threshold"])

    def link(self) -> LinkParams:
        d = self.as_dict()
        return LinkParams(rssi0_dbm=d["link_rssi0"], r0_m=d["link_r0"],
                          alpha_db_per_m=d["link_alpha"],
                          sensitivity_dbm=d["link_sensitivity"],
                          p_loss_floor=d["link_loss_floor"])

    def gains(self, loop: str) -> PidGains:
        d = self.as_dict()
        return PidGains(kp=d[f"{loop}_kp"], ki=d[f"{loop}_ki"],
                        kd=d[f"{loop}_kd"], i_limit=d[f"{loop}_ilimit"],
                        out_limit=d[f"{loop}_outlimit"],
                        d_tau=d[f"{loop}_dtau"])


def parse_params(text: str) -> dict:
    """Parse `name = value` lines; '#' starts a comment, blanks ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParamError(f"line {lineno}: expected 'name = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ParamError(f"line {lineno}: unknown parameter key {key!r}")
        try:
            out[key] = float(value.strip())
        except ValueError:
            raise ParamError(f"line {lineno}: bad numeric value for {key!r}")
    return out


def load_params(path) -> SimParams:
    with open(path, "r", encoding="utf-8") as fh:
        return SimParams.from_dict(parse_params(fh.read()))


def dump_params(params: SimParams) -> str:
    return "".join(f"{k} = {v!r}\n" for k, v in params.values)
