"""Controller and ballast-allocation tests."""

import pytest

from squidsub.actuation import Action, BallastCylinder, LimitHit
from squidsub.control import (PidGains, PidState, allocate, angle_error,
                              depth_control, heading_control, pitch_control,
                              steering_drives)

GAINS = PidGains(kp=1.0, ki=0.0, kd=0.0, i_limit=1.0, out_limit=10.0)


def test_angle_error_shortest_arc():
    assert angle_error(10.0, 350.0) == pytest.approx(20.0)
    assert angle_error(350.0, 10.0) == pytest.approx(-20.0)
    assert angle_error(180.0, 0.0) == pytest.approx(180.0)
    assert angle_error(0.0, 180.0) == pytest.approx(180.0)   # tie goes positive
    assert angle_error(90.0, 90.0) == 0.0


def test_heading_control_is_wrap_aware():
    out, _ = heading_control(10.0, 350.0, 0.02, GAINS, PidState())
    assert out == pytest.approx(10.0)   # +20 deg error, clipped at out_limit
    out, _ = heading_control(350.0, 10.0, 0.02, GAINS, PidState())
    assert out < 0.0


def test_proportional_term():
    out, st = depth_control(2.0, 1.0, 0.02, GAINS, PidState())
    assert out == pytest.approx(1.0)
    assert st.prev_meas == 1.0


def test_integral_accumulates_and_clamps():
    gains = PidGains(kp=0.0, ki=1.0, kd=0.0, i_limit=0.05, out_limit=10.0)
    st = PidState()
    for _ in range(100):
        out, st = depth_control(1.0, 0.0, 0.02, gains, st)
    assert st.integral == pytest.approx(0.05)


def test_antiwindup_holds_integral_while_saturated():
    gains = PidGains(kp=1.0, ki=1.0, kd=0.0, i_limit=5.0, out_limit=0.5)
    st = PidState()
    for _ in range(200):
        out, st = depth_control(10.0, 0.0, 0.02, gains, st)
        assert out == 0.5
    # integral must not have crept toward its own limit during saturation
    assert st.integral < 0.5


def test_derivative_acts_on_measurement():
    gains = PidGains(kp=0.0, ki=0.0, kd=1.0, i_limit=1.0, out_limit=10.0)
    st = PidState()
    _, st = depth_control(0.0, 1.0, 0.1, gains, st)
    out, st = depth_control(0.0, 1.5, 0.1, gains, st)
    # measurement rising at 5 units/s -> derivative term pushes output down
    assert out == pytest.approx(-5.0)
    # a setpoint change alone produces no derivative kick
    out2, _ = depth_control(99.0, 1.5, 0.1, gains, st)
    assert out2 == pytest.approx(0.0)


def test_derivative_filter_smooths_steps():
    raw = PidGains(kp=0.0, ki=0.0, kd=1.0, i_limit=1.0, out_limit=100.0)
    filt = PidGains(kp=0.0, ki=0.0, kd=1.0, i_limit=1.0, out_limit=100.0,
                    d_tau=0.5)
    st_r, st_f = PidState(), PidState()
    _, st_r = depth_control(0.0, 0.0, 0.02, raw, st_r)
    _, st_f = depth_control(0.0, 0.0, 0.02, filt, st_f)
    out_r, _ = depth_control(0.0, 0.033, 0.02, raw, st_r)
    out_f, _ = depth_control(0.0, 0.033, 0.02, filt, st_f)
    assert abs(out_f) < abs(out_r) / 10.0


def test_heading_derivative_is_wrap_aware():
    gains = PidGains(kp=0.0, ki=0.0, kd=1.0, i_limit=1.0, out_limit=100.0)
    st = PidState()
    _, st = heading_control(0.0, 359.0, 0.1, gains, st)
    out, _ = heading_control(0.0, 1.0, 0.1, gains, st)
    # 359 -> 1 deg is +20 deg/s, not -3580 deg/s
    assert out == pytest.approx(-20.0)


def test_steering_drives_mirror_the_differential():
    assert steering_drives(0.3) == pytest.approx((-0.3, 0.3))
    assert steering_drives(-2.0) == (1.0, -1.0)   # clipped


def test_pitch_control_sign():
    out, _ = pitch_control(0.0, -5.0, 0.02, GAINS, PidState())
    assert out > 0.0    # nose down -> fill front relative to rear


def free(fill=5e-5):
    return BallastCylinder(fill=fill)


def latched_full():
    return BallastCylinder(fill=1.5e-4, limit_hit=LimitHit.FULL)


def latched_empty():
    return BallastCylinder(fill=0.0, limit_hit=LimitHit.EMPTY)


def test_allocate_splits_total_and_differential():
    f, r = allocate(2e-5, 0.0, free(), free())
    assert f.action == Action.FORWARD and r.action == Action.FORWARD
    f, r = allocate(0.0, 2e-5, free(), free())
    assert f.action == Action.FORWARD and r.action == Action.REVERSE
    f, r = allocate(0.0, 0.0, free(), free())
    assert f.action == Action.STOP and r.action == Action.STOP


def test_allocate_sheds_total_to_the_free_cylinder():
    # front latched full, positive total: its total share moves to the rear
    f, r = allocate(2e-5, 0.0, latched_full(), free())
    assert f.action == Action.STOP
    assert r.action == Action.FORWARD
    # both latched against the demand: nothing moves
    f, r = allocate(2e-5, 0.0, latched_full(), latched_full())
    assert f.action == Action.STOP and r.action == Action.STOP


def test_allocate_never_sheds_differential():
    # rear latched empty; pure differential demand (front fill, rear drain)
    # keeps the front half only -- the rear share is not transferred
    f, r = allocate(0.0, 2e-5, free(), latched_empty())
    assert f.action == Action.FORWARD
    assert r.action == Action.STOP
    f2, _ = allocate(0.0, 4e-5, free(), latched_empty())
    assert f2.action == Action.FORWARD


def test_allocate_deadband_suppresses_chatter():
    f, r = allocate(1e-7, 0.0, free(), free(), deadband=1e-6)
    assert f.action == Action.STOP and r.action == Action.STOP


def test_gain_validation():
    with pytest.raises(ValueError):
        PidGains(kp=1.0, ki=0.0, kd=0.0, i_limit=0.0, out_limit=1.0)
    with pytest.raises(ValueError):
        PidGains(kp=-1.0, ki=0.0, kd=0.0, i_limit=1.0, out_limit=1.0)
    with pytest.raises(ValueError):
        depth_control(0.0, 0.0, 0.0, GAINS, PidState())
