"""Deterministic grid sweep that tunes plant/gain parameters until the
step-response targets pass, and reports the margins of the winner.

Targets file format (line-oriented):

    scenario <path to .scn, relative to the targets file>
    channel <log column>
    step_time <s>
    sp_before <value>
    sp_after <value>
    settle_band <value>            # optional absolute settling band
    target <metric> <min> <max>    # metric from StepMetrics
    sweep <param> <lo> <hi> <n>    # grid axis; omit for a pure check
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field, fields

import numpy as np

from .metrics import StepMetrics, step_metrics, unwrap_heading
from .params import DEFAULTS, SimParams
from .scenario import load_scenario
from .simulator import run_scenario


class CalibrationError(ValueError):
    pass


_METRIC_NAMES = tuple(f.name for f in fields(StepMetrics) if f.name != "reached")


@dataclass
class CalibrationSpec:
    scenario_path: str
    channel: str = "heading"
    step_time: float = 0.0
    sp_before: float = 0.0
    sp_after: float = 0.0
    settle_band: float | None = None
    targets: dict = field(default_factory=dict)   # metric -> (min, max)
    sweeps: list = field(default_factory=list)    # (param, values)


def parse_targets(text: str, base_dir: str = ".") -> CalibrationSpec:
    spec = CalibrationSpec(scenario_path="")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0]
        try:
            if key == "scenario":
                spec.scenario_path = os.path.join(base_dir, tokens[1])
            elif key == "channel":
                spec.channel = tokens[1]
            elif key in ("step_time", "sp_before", "sp_after", "settle_band"):
                setattr(spec, key, float(tokens[1]))
            elif key == "target":
                if tokens[1] not in _METRIC_NAMES:
                    raise CalibrationError(f"unknown metric {tokens[1]!r}")
                spec.targets[tokens[1]] = (float(tokens[2]), float(tokens[3]))
            elif key == "sweep":
                if tokens[1] not in DEFAULTS:
                    raise CalibrationError(f"unknown parameter {tokens[1]!r}")
                lo, hi, n = float(tokens[2]), float(tokens[3]), int(tokens[4])
                spec.sweeps.append((tokens[1], list(np.linspace(lo, hi, n))))
            else:
                raise CalibrationError(f"unknown directive {key!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, CalibrationError):
                raise CalibrationError(f"line {lineno}: {exc}") from None
            raise CalibrationError(f"line {lineno}: malformed line {line!r}") from None
    if not spec.scenario_path:
        raise CalibrationError("targets file must name a scenario")
    if not spec.targets:
        raise CalibrationError("targets file must list at least one target")
    return spec


def _evaluate(spec: CalibrationSpec, params: SimParams) -> StepMetrics:
    scenario = load_scenario(spec.scenario_path)
    if "rise_time_10_90" in spec.targets:
        if spec.targets["rise_time_10_90"][1] < scenario.physics_dt:
            raise CalibrationError(
                "infeasible target: rise time below the physics step")
    log = run_scenario(scenario, params)
    values = log.column(spec.channel)
    if spec.channel == "heading":
        values = unwrap_heading(values)
    return step_metrics(log.column("t"), values, spec.step_time,
                        spec.sp_before, spec.sp_after,
                        settle_band=spec.settle_band)


def _violation(spec, m: StepMetrics) -> float:
    total = 0.0
    for name, (lo, hi) in spec.targets.items():
        v = getattr(m, name)
        scale = max(abs(hi), abs(lo), 1e-9)
        if v < lo:
            total += (lo - v) / scale
        elif v > hi:
            total += (v - hi) / scale
    return total


def calibrate(spec: CalibrationSpec, base: SimParams):
    """Sweep the grid in deterministic order; return the first passing
    configuration with its metrics. Raises with the nearest miss if the
    search space is exhausted."""
    axes = spec.sweeps or [("", [None])]
    names = [name for name, _ in axes]
    best = None
    for combo in itertools.product(*(vals for _, vals in axes)):
        overrides = {n: v for n, v in zip(names, combo) if n}
        merged = base.as_dict()
        merged.update(overrides)
        params = SimParams.from_dict(merged)
        m = _evaluate(spec, params)
        score = _violation(spec, m)
        if score == 0.0:
            margins = {name: (getattr(m, name) - lo, hi - getattr(m, name))
                       for name, (lo, hi) in spec.targets.items()}
            return params, m, margins
        if best is None or score < best[0]:
            best = (score, overrides, m)
    raise CalibrationError(
        f"search space exhausted; nearest miss {best[1]} with metrics {best[2]}")
