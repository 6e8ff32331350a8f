"""Water-sampling mission executor tests with synthetic GPS feeds."""

import pytest

from squidsub.mission import (MissionPlan, MissionStatus, Phase, PHASE_ORDER,
                              bearing, distance_m, flat_earth_offset,
                              mission_step, record_sample)
from squidsub.sensing import METERS_PER_DEG_LAT

HOME = (21.027252, 105.851954)


def north_of(origin, meters):
    return (origin[0] + meters / METERS_PER_DEG_LAT, origin[1])


PLAN = MissionPlan(target=north_of(HOME, 20.0), home=HOME,
                   sample_depth=0.10, sample_volume=5e-5,
                   depth_tolerance=0.02, settle_time=1.0)


def test_flat_earth_offset_and_distance():
    north, east = flat_earth_offset(HOME, north_of(HOME, 20.0))
    assert north == pytest.approx(20.0)
    assert east == pytest.approx(0.0, abs=1e-9)
    assert distance_m(HOME, north_of(HOME, 20.0)) == pytest.approx(20.0)


def test_bearing_cardinal_and_diagonal():
    lat_step = 10.0 / METERS_PER_DEG_LAT
    import math
    lon_step = 10.0 / (METERS_PER_DEG_LAT * math.cos(math.radians(HOME[0])))
    assert bearing(HOME, (HOME[0] + lat_step, HOME[1])) == pytest.approx(0.0)
    assert bearing(HOME, (HOME[0], HOME[1] + lon_step)) == pytest.approx(90.0)
    assert bearing(HOME, (HOME[0] + lat_step, HOME[1] + lon_step)) == \
        pytest.approx(45.0, abs=0.01)
    assert bearing(HOME, (HOME[0] - lat_step, HOME[1])) == pytest.approx(180.0)
    assert bearing(HOME, HOME) == 0.0


def test_transit_steers_toward_target():
    status = MissionStatus(phase=Phase.TRANSIT)
    d, status = mission_step(status, PLAN, HOME, 0.0, 0.0, t=0.0)
    assert d.heading_sp == pytest.approx(0.0)
    assert d.surge_drive == PLAN.surge_drive
    assert status.phase == Phase.TRANSIT


def test_full_phase_walk():
    status = MissionStatus(phase=Phase.TRANSIT)
    seen = [status.phase]
    t = 0.0

    # arrive at the target -> descend
    d, status = mission_step(status, PLAN, PLAN.target, 0.0, 0.0, t)
    assert status.phase == Phase.DESCEND
    seen.append(status.phase)

    # hold in the depth band for settle_time -> sampling
    while status.phase == Phase.DESCEND:
        t += 0.1
        d, status = mission_step(status, PLAN, None, 0.10, 0.0, t)
        assert d.depth_sp == PLAN.sample_depth
    assert status.phase == Phase.SAMPLING
    seen.append(status.phase)
    assert t >= PLAN.settle_time

    # intake is demanded until the target volume is credited
    d, status = mission_step(status, PLAN, None, 0.10, 0.0, t)
    assert d.sample_intake
    status = record_sample(status, PLAN.sample_volume)
    d, status = mission_step(status, PLAN, None, 0.10, 0.0, t)
    assert status.phase == Phase.ASCEND
    seen.append(status.phase)
    assert not d.sample_intake

    # the credited sample becomes a retention floor from here on
    d, status = mission_step(status, PLAN, None, 0.08, 0.0, t)
    assert d.sample_floor == pytest.approx(PLAN.sample_volume)

    # surfacing -> return home -> done
    d, status = mission_step(status, PLAN, None, 0.02, 0.0, t)
    assert status.phase == Phase.RETURN_HOME
    seen.append(status.phase)
    d, status = mission_step(status, PLAN, HOME, 0.0, 180.0, t)
    assert status.phase == Phase.DONE
    seen.append(status.phase)
    assert d.surge_drive == 0.0

    # phases were visited strictly in forward order
    order = [PHASE_ORDER.index(p) for p in seen]
    assert order == sorted(order)


def test_descend_band_must_hold_before_sampling():
    status = MissionStatus(phase=Phase.DESCEND, last_bearing=0.0)
    _, status = mission_step(status, PLAN, None, 0.10, 0.0, t=0.0)
    assert status.phase == Phase.DESCEND
    # leaving the band resets the settle clock
    _, status = mission_step(status, PLAN, None, 0.20, 0.0, t=0.5)
    assert status.band_since is None
    _, status = mission_step(status, PLAN, None, 0.10, 0.0, t=0.6)
    _, status = mission_step(status, PLAN, None, 0.10, 0.0, t=0.9)
    assert status.phase == Phase.DESCEND
    _, status = mission_step(status, PLAN, None, 0.10, 0.0, t=1.7)
    assert status.phase == Phase.SAMPLING


def test_gps_outage_aborts_surface_phases():
    status = MissionStatus(phase=Phase.TRANSIT, phase_start=0.0)
    _, status = mission_step(status, PLAN, None, 0.0, 0.0,
                             t=PLAN.gps_timeout + 0.1)
    assert status.phase == Phase.ABORTED
    assert status.abort_reason == "gps timeout"
    # a fix resets the watchdog
    status = MissionStatus(phase=Phase.TRANSIT, phase_start=0.0)
    _, status = mission_step(status, PLAN, HOME, 0.0, 0.0, t=9.0)
    _, status = mission_step(status, PLAN, None, 0.0, 0.0, t=15.0)
    assert status.phase == Phase.TRANSIT


def test_no_gps_watchdog_while_submerged():
    status = MissionStatus(phase=Phase.SAMPLING, phase_start=0.0)
    _, status = mission_step(status, PLAN, None, 0.10, 0.0, t=100.0)
    assert status.phase in (Phase.SAMPLING, Phase.ASCEND)


def test_terminal_phases_are_inert():
    for phase in (Phase.IDLE, Phase.DONE, Phase.ABORTED):
        status = MissionStatus(phase=phase, sampled=3e-5)
        d, after = mission_step(status, PLAN, HOME, 0.0, 0.0, t=5.0)
        assert after.phase == phase
        assert d.surge_drive == 0.0
        assert d.sample_floor == pytest.approx(3e-5)


def test_record_sample_accumulates():
    status = MissionStatus()
    status = record_sample(status, 2e-5)
    status = record_sample(status, 1e-5)
    assert status.sampled == pytest.approx(3e-5)
    with pytest.raises(ValueError):
        record_sample(status, -1e-9)


def test_plan_validation():
    with pytest.raises(ValueError):
        MissionPlan(target=HOME, home=HOME, sample_volume=0.0)
    with pytest.raises(ValueError):
        MissionPlan(target=HOME, home=HOME, capture_radius=0.0)
    with pytest.raises(ValueError):
        MissionPlan(target=HOME, home=HOME, sample_depth=-0.1)
