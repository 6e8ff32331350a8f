"""Acceptance gate: the nine headless criteria for the simulator.

Each test prints a single PASS line on success (run with -s to see them);
a failing criterion fails the corresponding test.
"""

import math

import numpy as np
import pytest

from squidsub.dynamics import ControlInputs, VehicleParams, VehicleState, step
from squidsub.metrics import step_metrics, unwrap_heading
from squidsub.params import SimParams
from squidsub.protocol import (LinkParams, TelemetryPacket, encode_telemetry,
                               link_rssi, link_transmit, parse_telemetry)
from squidsub.scenario import parse_scenario
from squidsub.simulator import run_scenario

REFERENCE_PACKET = (
    "LAT:21.027252,LON:105.851954|ACC:0.00,-0.02,0.00|"
    "EUL:214.00,-33.06,-6.75|GYR:-0.00,-0.00,0.00|"
    "Q:0.28,-0.26,0.13,0.92|VEL:0.00,0.00,0.00|"
    "DIS:193.02,42.91,0.00")


def shipped(name):
    import importlib.resources
    res = importlib.resources.files("squidsub.data.scenarios") / name
    return parse_scenario(res.read_text())


@pytest.fixture(scope="module")
def params():
    return SimParams.from_dict({})


@pytest.fixture(scope="module")
def yaw_log(params):
    return run_scenario(shipped("yaw_360.scn"), params)


@pytest.fixture(scope="module")
def heading_log(params):
    return run_scenario(shipped("heading_step.scn"), params)


@pytest.fixture(scope="module")
def depth_log(params):
    return run_scenario(shipped("depth_step.scn"), params)


@pytest.fixture(scope="module")
def mission_log(params):
    return run_scenario(shipped("sampling_mission.scn"), params)


def test_criterion_1_yaw_360(yaw_log):
    t = yaw_log.column("t")
    heading = unwrap_heading(yaw_log.column("heading"))
    t_start = 2.0                                   # ramp begins here
    start_hdg = heading[0]
    done_idx = next(i for i, h in enumerate(heading)
                    if h - start_hdg >= 360.0)
    duration = t[done_idx] - t_start
    mean_rate = 360.0 / duration
    max_roll = max(abs(v) for v in yaw_log.column("roll"))
    max_pitch = max(abs(v) for v in yaw_log.column("pitch"))
    assert 36.0 <= duration <= 44.0
    assert abs(mean_rate - 9.0) <= 0.9
    assert max_roll <= 2.0
    assert max_pitch <= 1.5
    print(f"PASS criterion 1: 360-degree yaw in {duration:.1f} s "
          f"({mean_rate:.2f} deg/s), |roll| <= {max_roll:.2f} deg, "
          f"|pitch| <= {max_pitch:.2f} deg")


def test_criterion_2_heading_step(heading_log):
    heading = unwrap_heading(heading_log.column("heading"))
    m = step_metrics(heading_log.column("t"), heading, 20.0, 90.0, 180.0,
                     settle_band=2.0)
    assert 1.5 <= m.rise_time_10_90 <= 2.5
    assert m.overshoot <= 7.0
    assert m.settling_time <= 5.0
    assert m.steady_state_error < 2.0
    print(f"PASS criterion 2: heading step rise {m.rise_time_10_90:.2f} s, "
          f"overshoot {m.overshoot:.2f} deg, settle {m.settling_time:.2f} s, "
          f"sse {m.steady_state_error:.3f} deg")


def test_criterion_3_depth_step(depth_log):
    t = depth_log.column("t")
    depth = depth_log.column("depth")
    reach = next(ti for ti, d in zip(t, depth) if abs(d - 2.5) <= 0.1)
    reach -= 5.0                                    # command issued at t = 5
    tail_err = max(abs(d - 2.5) for ti, d in zip(t, depth) if ti >= t[-1] - 10.0)
    max_pitch = max(abs(v) for v in depth_log.column("pitch"))
    assert 8.0 <= reach <= 10.0
    assert tail_err <= 0.1
    assert max_pitch <= 3.0
    print(f"PASS criterion 3: 2.5 m reached {reach:.2f} s after command, "
          f"final-10s |error| <= {tail_err:.3f} m, |pitch| <= {max_pitch:.2f} deg")


def test_criterion_4_sampling_mission(mission_log):
    x = mission_log.column("x")
    y = mission_log.column("y")
    path = sum(math.hypot(x[i] - x[i - 1], y[i] - y[i - 1])
               for i in range(1, len(x)))
    max_depth = max(mission_log.column("depth"))
    sampled = mission_log.column("sampled")[-1]
    phase = mission_log.column("mission_phase")[-1]
    sc = shipped("sampling_mission.scn")
    quantum = 2e-5 * sc.physics_dt                  # one ballast-rate step
    assert phase == "done"
    assert 32.0 <= path <= 48.0
    assert 0.08 <= max_depth <= 0.18
    assert abs(sampled - sc.mission.sample_volume) <= quantum
    # the sample is still aboard at the end of the run
    assert mission_log.column("fill_front")[-1] >= sampled - quantum
    print(f"PASS criterion 4: mission done, path {path:.1f} m, max depth "
          f"{max_depth:.3f} m, sampled {sampled:.2e} m^3 (retained)")


def test_criterion_5_dynamics_oracle():
    p = VehicleParams()
    dt = 0.01
    surge = VehicleState()
    yaw = VehicleState()
    surge_in = ControlInputs(w_p1=1.0, w_p2=1.0)
    yaw_in = ControlInputs(w_sL=-1.0, w_sR=1.0)
    u_ss = 2 * p.k_p / p.d_u
    r_ss = 2 * p.k_s / p.d_r / math.pi * 180.0
    max_rel = 0.0
    for _ in range(3000):
        surge = step(surge, p, surge_in, dt)
        yaw = step(yaw, p, yaw_in, dt)
        u_exact = u_ss * (1 - math.exp(-p.d_u * surge.t / p.m_u))
        r_exact = r_ss * (1 - math.exp(-p.d_r * yaw.t / p.I_z))
        max_rel = max(max_rel, abs(surge.u - u_exact) / u_ss,
                      abs(yaw.r - r_exact) / r_ss)
    assert max_rel < 1e-4
    print(f"PASS criterion 5: surge/yaw vs closed form, max relative error "
          f"{max_rel:.2e} over 30 s at dt={dt}")


def test_criterion_6_codec():
    p = parse_telemetry(REFERENCE_PACKET)
    assert encode_telemetry(p) == REFERENCE_PACKET
    norm = math.hypot(*p.quat)
    assert abs(norm - 1.0) <= 0.03
    rng = np.random.default_rng(6)
    for _ in range(1000):
        vals = rng.uniform(-500.0, 500.0, size=21)
        pkt = TelemetryPacket(
            lat=float(vals[0] / 3), lon=float(vals[1]),
            acc=tuple(map(float, vals[2:5])), eul=tuple(map(float, vals[5:8])),
            gyr=tuple(map(float, vals[8:11])),
            quat=tuple(map(float, vals[11:15] / 500.0)),
            vel=tuple(map(float, vals[15:18])),
            dis=tuple(map(float, vals[18:21])))
        wire = encode_telemetry(pkt)
        assert encode_telemetry(parse_telemetry(wire)) == wire
    print(f"PASS criterion 6: reference packet byte-exact "
          f"(quat norm {norm:.4f}); 1000 random round-trips stable")


def test_criterion_7_ballast_fuzz():
    from squidsub.actuation import (Action, ActuatorState, BallastMotor,
                                    LimitHit, MotorCommand, apply_command,
                                    ballast_step)
    rng = np.random.default_rng(7)
    actions = list(Action)
    a = ActuatorState()
    limit_hits = 0
    for _ in range(100_000):
        motor_id = int(rng.integers(5, 7))
        action = actions[int(rng.integers(0, 3))]
        dt = float(rng.uniform(0.01, 2.0))
        a = apply_command(a, MotorCommand(motor_id, action))
        cyl_f = ballast_step(a.cyl_front, dt)
        cyl_r = ballast_step(a.cyl_rear, dt)
        from dataclasses import replace
        a = replace(a, cyl_front=cyl_f, cyl_rear=cyl_r)
        for cyl in (cyl_f, cyl_r):
            assert 0.0 <= cyl.fill <= cyl.capacity
            if cyl.limit_hit != LimitHit.NONE:
                assert cyl.motor == BallastMotor.STOPPED
                limit_hits += 1
    print(f"PASS criterion 7: 100000-command fuzz kept fills in bounds; "
          f"{limit_hits} latched-limit states all had the motor halted")


def test_criterion_8_link_monte_carlo():
    link = LinkParams()
    rng = np.random.default_rng(8)
    n = 10_000
    shallow = sum(link_transmit("x", 2.5, link.r0_m, rng, link).delivered
                  for _ in range(n)) / n
    deep = sum(link_transmit("x", 5.0, link.r0_m, rng, link).delivered
               for _ in range(n)) / n
    assert shallow >= 0.95
    assert deep <= 0.05
    bench = link_rssi(0.0, 25.0, link)
    assert abs(bench - (-58.0)) <= 3.0
    depths = np.linspace(0.0, 5.0, 100)
    vals = [link_rssi(float(d), 25.0, link) for d in depths]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    ranges = np.linspace(1.0, 200.0, 100)
    vals = [link_rssi(0.0, float(r), link) for r in ranges]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    print(f"PASS criterion 8: delivery {shallow:.1%} at 2.5 m, {deep:.1%} at "
          f"5 m; bench RSSI {bench:.1f} dBm; monotone in depth and range")


def test_criterion_9_determinism(params):
    a = run_scenario(shipped("depth_step.scn"), params).to_csv()
    b = run_scenario(shipped("depth_step.scn"), params).to_csv()
    assert a == b
    print(f"PASS criterion 9: two identical runs produced byte-identical "
          f"CSV logs ({len(a)} bytes)")
