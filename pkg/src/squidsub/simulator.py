"""Deterministic closed-loop simulation: physics, sensors, controllers,
mission executor, telemetry emission, and CSV logging.

One Simulator instance owns all mutable state. Given (scenario, params, seed)
every log byte is reproducible; external commands (bridge clients) are queued
and applied only at control-tick boundaries.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from . import actuation, control, mission as mission_mod, protocol, sensing
from .actuation import (ActuatorState, Action, BallastCylinder, MotorCommand,
                        MOTOR_FRONT_BALLAST, MOTOR_REAR_BALLAST)
from .dynamics import ControlInputs, neutral_fill, step as dyn_step
from .mission import MissionStatus, Phase
from .params import SimParams
from .protocol import (MissionCommand, SetpointCommand, encode_telemetry,
                       link_transmit, TelemetryPacket)
from .scenario import Scenario

COLUMNS = [
    "t", "x", "y", "depth", "heading", "pitch", "roll",
    "u", "r", "w", "q", "p",
    "depth_meas", "heading_meas", "pitch_meas", "roll_meas",
    "heading_sp", "depth_sp", "pitch_sp",
    "front_prop", "rear_prop", "left_steer", "right_steer",
    "fill_front", "fill_rear",
    "steer_diff", "total_demand", "diff_demand",
    "mission_phase", "sampled",
    "gps_lat", "gps_lon",
    "tlm_sent", "tlm_delivered", "rssi", "payload",
]


class SimulationError(RuntimeError):
    pass


@dataclass
class RunLog:
    columns: list
    rows: list

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def read(cls, path):
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            columns = next(reader)
            rows = []
            for raw in reader:
                rows.append([_maybe_float(v) for v in raw])
        return cls(columns=columns, rows=rows)


def _maybe_float(s):
    try:
        return float(s)
    except ValueError:
        return s


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.9g}"
    return v


class Simulator:
    """Owns vehicle, actuator, controller, and mission state for one run."""

    def __init__(self, scenario: Scenario, params: SimParams):
        scenario.validate()
        if scenario.overrides:
            merged = params.as_dict()
            merged.update(scenario.overrides)
            params = SimParams.from_dict(merged)
        self.params = params
        self.scenario = scenario
        self.vehicle_params = params.vehicle()
        self.noise = params.noise()
        self.sensor = params.sensor()
        self.link = params.link()
        self.h_gains = params.gains("heading")
        self.d_gains = params.gains("depth")
        self.p_gains = params.gains("pitch")
        self.deadband = params["ballast_deadband"]
        self.ref = (params["ref_lat"], params["ref_lon"])
        self.neutral_per_cyl = neutral_fill(self.vehicle_params) / 2.0

        cap = params["ballast_capacity"]
        rate = params["ballast_rate"]
        if self.neutral_per_cyl > cap:
            raise SimulationError("neutral fill exceeds cylinder capacity")
        cyl = BallastCylinder(capacity=cap, fill=self.neutral_per_cyl, rate=rate)
        self.actuators = ActuatorState(cyl_front=cyl, cyl_rear=cyl)

        self.state = scenario.initial_state()
        self.rng = np.random.default_rng(scenario.seed)
        self.dr = sensing.DeadReckonState()

        self.heading_auto = False
        self.depth_auto = False
        self.heading_sp = self.state.heading
        self.depth_sp = self.state.depth
        self.pitch_sp = 0.0
        self.surge_drive = None      # None = manual pump drives in force
        self.h_state = control.PidState()
        self.d_state = control.PidState()
        self.p_state = control.PidState()

        self.mission_status = MissionStatus()
        self.mission_active = False
        self.sample_floor = 0.0     # front-cylinder fill reserved for sample

        self.prev_ctl_state = self.state
        self.last_fix = None
        self.last_imu = None
        self.roll_disturbance = 0.0
        self.next_gps = 0.0
        self.next_tlm = 0.0
        self.pending = []            # externally queued command strings
        self.event_idx = 0
        self.log_rows = []
        self.tick = 0
        self.substeps = int(round(scenario.control_dt / scenario.physics_dt))

    # -- command handling ---------------------------------------------------

    def queue_command(self, line: str):
        """Thread-safe enough for CPython list append; applied next tick."""
        self.pending.append(line)

    def _apply_command(self, cmd):
        if isinstance(cmd, MotorCommand):
            self.actuators = actuation.apply_command(self.actuators, cmd)
            if cmd.motor_id in (3, 4):
                self.heading_auto = False
            if cmd.motor_id in (5, 6):
                self.depth_auto = False
            if cmd.motor_id in (1, 2):
                self.surge_drive = None
        elif isinstance(cmd, SetpointCommand):
            if cmd.kind == "heading":
                self.heading_sp = cmd.value
                self.heading_auto = True
            else:
                self.depth_sp = cmd.value
                self.depth_auto = True
        elif isinstance(cmd, MissionCommand):
            if cmd.action == "start":
                if self.scenario.mission is None:
                    raise SimulationError("no mission plan in scenario")
                self.mission_status = MissionStatus(phase=Phase.TRANSIT,
                                                    phase_start=self.state.t)
                self.mission_active = True
                self.heading_auto = True
                self.depth_auto = True
            else:
                self.mission_status = replace(self.mission_status,
                                              phase=Phase.ABORTED,
                                              abort_reason="operator abort")
                self.mission_active = False
                self.surge_drive = 0.0

    def _drain_commands(self):
        t = self.state.t
        while (self.event_idx < len(self.scenario.events)
               and self.scenario.events[self.event_idx][0] <= t + 1e-9):
            _, line = self.scenario.events[self.event_idx]
            self.event_idx += 1
            self._apply_command(protocol.parse_command(line))
        pending, self.pending = self.pending, []
        for line in pending:
            self._apply_command(protocol.parse_command(line))

    # -- one control tick ---------------------------------------------------

    def control_tick(self):
        sc = self.scenario
        t = self.state.t
        self._drain_commands()

        for ramp in sc.ramps:
            sp = ramp.setpoint_at(t)
            if sp is not None:
                self.heading_sp = sp % 360.0
                self.heading_auto = True

        # sensors
        imu = sensing.read_imu(self.state, self.prev_ctl_state, sc.control_dt,
                               self.noise, self.rng)
        self.last_imu = imu
        pressure = sensing.pressure_chain(self.state.depth,
                                          self.vehicle_params.rho,
                                          self.vehicle_params.g, self.sensor)
        fix = None
        if t + 1e-9 >= self.next_gps:
            fix = sensing.gps_fix(self.state, self.ref, self.sensor,
                                  self.noise, self.rng)
            self.next_gps += self.params["gps_interval"]
            if fix is not None:
                self.last_fix = fix
        self.dr = sensing.dead_reckon(self.dr, imu.accel, sc.control_dt)

        # mission guidance
        sample_intake = False
        if self.mission_active:
            directive, self.mission_status = mission_mod.mission_step(
                self.mission_status, sc.mission, fix, pressure.depth_est,
                imu.euler[0], t)
            self.heading_sp = directive.heading_sp % 360.0
            self.depth_sp = directive.depth_sp
            self.surge_drive = directive.surge_drive
            sample_intake = directive.sample_intake
            self.sample_floor = max(self.sample_floor, directive.sample_floor)
            if self.mission_status.phase in (Phase.DONE, Phase.ABORTED):
                self.mission_active = False
                self.surge_drive = 0.0
                self.depth_sp = 0.0

        # propulsion
        if self.surge_drive is not None:
            drive = max(-1.0, min(1.0, self.surge_drive))
            self.actuators = replace(self.actuators, front_prop=drive,
                                     rear_prop=drive)

        # heading loop
        steer_diff = 0.0
        if self.heading_auto:
            steer_diff, self.h_state = control.heading_control(
                self.heading_sp, imu.euler[0], sc.control_dt,
                self.h_gains, self.h_state)
            w_sL, w_sR = control.steering_drives(steer_diff)
            self.actuators = replace(self.actuators, left_steer=w_sL,
                                     right_steer=w_sR)

        # depth + pitch loops -> ballast commands
        total_demand = 0.0
        diff_demand = 0.0
        if self.depth_auto:
            total_demand, self.d_state = control.depth_control(
                self.depth_sp, pressure.depth_est, sc.control_dt,
                self.d_gains, self.d_state)
            diff_demand, self.p_state = control.pitch_control(
                self.pitch_sp, imu.euler[2], sc.control_dt,
                self.p_gains, self.p_state)
            if sample_intake:
                # sampling commandeers the front cylinder; depth demand is
                # served by the rear cylinder alone
                cmd_front = MotorCommand(MOTOR_FRONT_BALLAST, Action.FORWARD)
                cmd_rear = control._rate_command(MOTOR_REAR_BALLAST,
                                                 total_demand, self.deadband)
            else:
                cmd_front, cmd_rear = control.allocate(
                    total_demand, diff_demand, self.actuators.cyl_front,
                    self.actuators.cyl_rear, self.deadband)
            cmd_front = self._respect_sample_floor(cmd_front, self.sample_floor)
            self.actuators = actuation.apply_command(self.actuators, cmd_front)
            self.actuators = actuation.apply_command(self.actuators, cmd_rear)

        # roll excitation held over the control period
        jet_gain = self.params["roll_jet_gain"]
        noise_std = self.params["roll_noise_std"]
        self.roll_disturbance = (
            jet_gain * (self.actuators.right_steer - self.actuators.left_steer)
            + self.rng.normal(0.0, noise_std))

        # physics substeps
        self.prev_ctl_state = self.state
        for _ in range(self.substeps):
            front0 = self.actuators.cyl_front.fill
            cyl_f = actuation.ballast_step(self.actuators.cyl_front, sc.physics_dt)
            cyl_r = actuation.ballast_step(self.actuators.cyl_rear, sc.physics_dt)
            self.actuators = replace(self.actuators, cyl_front=cyl_f,
                                     cyl_rear=cyl_r)
            if sample_intake and cyl_f.fill > front0:
                self.mission_status = mission_mod.record_sample(
                    self.mission_status, cyl_f.fill - front0)
            inputs = actuation.control_inputs(self.actuators,
                                              self.neutral_per_cyl)
            inputs = replace(inputs, roll_disturbance=self.roll_disturbance)
            self.state = dyn_step(self.state, self.vehicle_params, inputs,
                                  sc.physics_dt)

        # telemetry
        tlm_sent = 0
        tlm_delivered = 0
        rssi = ""
        payload = ""
        if t + 1e-9 >= self.next_tlm:
            self.next_tlm += self.params["telemetry_interval"]
            tlm_sent = 1
            packet = self._build_packet(imu)
            payload = encode_telemetry(packet)
            rng_range = math.hypot(self.state.x, self.state.y)
            report = link_transmit(payload, self.state.depth,
                                   max(rng_range, self.params["link_bench_range"]),
                                   self.rng, self.link)
            tlm_delivered = 1 if report.delivered else 0
            rssi = report.rssi_dbm
            if not report.delivered:
                payload = ""
        self.last_tlm = payload

        self.log_rows.append(self._log_row(imu, pressure, steer_diff,
                                           total_demand, diff_demand,
                                           tlm_sent, tlm_delivered, rssi,
                                           payload))
        self.tick += 1

    def _respect_sample_floor(self, cmd: MotorCommand, floor: float):
        if floor <= 0 or cmd.action != Action.REVERSE:
            return cmd
        cyl = self.actuators.cyl_front
        next_fill = cyl.fill - cyl.rate * self.scenario.control_dt
        if next_fill < floor:
            return MotorCommand(cmd.motor_id, Action.STOP)
        return cmd

    def _build_packet(self, imu) -> TelemetryPacket:
        lat, lon = self.last_fix if self.last_fix else self.ref
        return TelemetryPacket(
            lat=lat, lon=lon,
            acc=imu.accel, eul=imu.euler, gyr=imu.gyro, quat=imu.quat,
            vel=self.dr.vel, dis=self.dr.disp)

    def _log_row(self, imu, pressure, steer_diff, total_demand, diff_demand,
                 tlm_sent, tlm_delivered, rssi, payload):
        s = self.state
        a = self.actuators
        fix = self.last_fix or ("", "")
        return [
            s.t, s.x, s.y, s.depth, s.heading, s.pitch, s.roll,
            s.u, s.r, s.w, s.q, s.p,
            pressure.depth_est, imu.euler[0], imu.euler[2], imu.euler[1],
            self.heading_sp, self.depth_sp, self.pitch_sp,
            a.front_prop, a.rear_prop, a.left_steer, a.right_steer,
            a.cyl_front.fill, a.cyl_rear.fill,
            steer_diff, total_demand, diff_demand,
            self.mission_status.phase.value, self.mission_status.sampled,
            fix[0], fix[1],
            tlm_sent, tlm_delivered, rssi, payload,
        ]

    def run(self) -> RunLog:
        n_ticks = int(round(self.scenario.duration / self.scenario.control_dt))
        for _ in range(n_ticks):
            self.control_tick()
        return RunLog(columns=list(COLUMNS), rows=self.log_rows)


def run_scenario(scenario: Scenario, params: SimParams) -> RunLog:
    return Simulator(scenario, params).run()
