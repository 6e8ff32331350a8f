"""Step-response metrics extracted from a run log.

Rise time is the 10%-90% crossing interval, overshoot the peak excursion
beyond the target in the step direction, settling time the last exit from the
band around the target (defaults to 2% of the step magnitude; heading uses an
absolute +/-2 degree band to match how such results are usually reported).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class StepMetrics:
    rise_time_10_90: float
    overshoot: float
    settling_time: float
    steady_state_error: float
    reached: bool = True


def _interp_crossing(t0, v0, t1, v1, level):
    if v1 == v0:
        return t1
    return t0 + (level - v0) / (v1 - v0) * (t1 - t0)


def step_metrics(times, values, step_time, sp_before, sp_after,
                 settle_band=None, tail_fraction=0.1) -> StepMetrics:
    """Compute step metrics from a sampled trajectory.

    times/values are full-run samples; only t >= step_time is analysed.
    The trajectory is assumed continuous over the window (heading traces
    must not wrap across 0/360 within it).
    """
    pairs = [(t, v) for t, v in zip(times, values) if t >= step_time]
    if len(pairs) < 2:
        raise MetricsError("log does not cover the step window")
    ts = [p[0] for p in pairs]
    vs = [p[1] for p in pairs]
    step = sp_after - sp_before
    if step == 0:
        raise MetricsError("zero-size step")
    sign = 1.0 if step > 0 else -1.0

    lvl10 = sp_before + 0.1 * step
    lvl90 = sp_before + 0.9 * step
    t10 = t90 = None
    for i in range(1, len(pairs)):
        if t10 is None and sign * (vs[i] - lvl10) >= 0 >= sign * (vs[i - 1] - lvl10):
            t10 = _interp_crossing(ts[i - 1], vs[i - 1], ts[i], vs[i], lvl10)
        if t90 is None and sign * (vs[i] - lvl90) >= 0 >= sign * (vs[i - 1] - lvl90):
            t90 = _interp_crossing(ts[i - 1], vs[i - 1], ts[i], vs[i], lvl90)
            break
    if sign * (vs[0] - lvl90) >= 0:
        # already past 90% at the step instant: instantaneous response
        t10 = t10 if t10 is not None else ts[0]
        t90 = ts[0]
    if t90 is None:
        return StepMetrics(rise_time_10_90=math.inf, overshoot=0.0,
                           settling_time=math.inf,
                           steady_state_error=abs(vs[-1] - sp_after),
                           reached=False)
    if t10 is None:
        t10 = ts[0]

    overshoot = max(0.0, max(sign * (v - sp_after) for v in vs))
    band = settle_band if settle_band is not None else 0.02 * abs(step)
    settle_t = ts[0]
    for t, v in pairs:
        if abs(v - sp_after) > band:
            settle_t = t
    n_tail = max(1, int(len(pairs) * tail_fraction))
    tail = vs[-n_tail:]
    sse = abs(sum(tail) / len(tail) - sp_after)
    return StepMetrics(rise_time_10_90=t90 - t10, overshoot=overshoot,
                       settling_time=max(0.0, settle_t - step_time),
                       steady_state_error=sse)


def unwrap_heading(values):
    """Unwrap a [0,360) heading trace into a continuous series."""
    out = [values[0]]
    for v in values[1:]:
        prev = out[-1]
        delta = (v - prev % 360.0 + 540.0) % 360.0 - 180.0
        out.append(prev + delta)
    return out
