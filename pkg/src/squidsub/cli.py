"""Command-line entry points: run, metrics, calibrate, serve."""

from __future__ import annotations

import argparse
import importlib.resources
import sys

from .calibrate import CalibrationError, calibrate, parse_targets
from .metrics import step_metrics, unwrap_heading
from .params import SimParams, dump_params, load_params
from .scenario import load_scenario
from .simulator import RunLog, run_scenario


def _load_base_params(path):
    if path is None:
        return SimParams.from_dict({})
    return load_params(path)


def _apply_overrides(params, pairs):
    if not pairs:
        return params
    merged = params.as_dict()
    for pair in pairs:
        key, _, value = pair.partition("=")
        merged[key.strip()] = float(value)
    return SimParams.from_dict(merged)


def _resolve_scenario(name):
    """Accept either a filesystem path or the name of a shipped scenario."""
    import os
    if os.path.exists(name):
        return load_scenario(name)
    res = importlib.resources.files("squidsub.data.scenarios") / name
    if res.is_file():
        from .scenario import parse_scenario
        return parse_scenario(res.read_text())
    raise SystemExit(f"scenario not found: {name}")


def main(argv=None):
    parser = argparse.ArgumentParser(prog="squidsub")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_run = sub.add_parser("run", help="run a scenario and write a CSV log")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--params", default=None)
    p_run.add_argument("--param", action="append", default=[],
                       metavar="k=v", help="override one parameter")

    p_met = sub.add_parser("metrics", help="step metrics from a CSV log")
    p_met.add_argument("--log", required=True)
    p_met.add_argument("--channel", required=True)
    p_met.add_argument("--step-time", type=float, required=True)
    p_met.add_argument("--sp-before", type=float, required=True)
    p_met.add_argument("--sp-after", type=float, required=True)
    p_met.add_argument("--settle-band", type=float, default=None)

    p_cal = sub.add_parser("calibrate", help="grid sweep against targets")
    p_cal.add_argument("--targets", required=True)
    p_cal.add_argument("--params", default=None)
    p_cal.add_argument("--out", default=None,
                       help="write the winning parameter file here")

    p_srv = sub.add_parser("serve", help="run the live bridge")
    p_srv.add_argument("--scenario", required=True)
    p_srv.add_argument("--port", type=int, required=True)
    p_srv.add_argument("--speed", type=float, default=1.0)
    p_srv.add_argument("--params", default=None)

    args = parser.parse_args(argv)

    if args.cmd == "run":
        scenario = _resolve_scenario(args.scenario)
        if args.seed is not None:
            scenario.seed = args.seed
        params = _apply_overrides(_load_base_params(args.params), args.param)
        log = run_scenario(scenario, params)
        log.write(args.out)
        print(f"wrote {len(log.rows)} rows to {args.out}")
        return 0

    if args.cmd == "metrics":
        log = RunLog.read(args.log)
        values = log.column(args.channel)
        if args.channel == "heading":
            values = unwrap_heading(values)
        m = step_metrics(log.column("t"), values, args.step_time,
                         args.sp_before, args.sp_after,
                         settle_band=args.settle_band)
        print(f"rise_time_10_90 = {m.rise_time_10_90:.3f}")
        print(f"overshoot = {m.overshoot:.3f}")
        print(f"settling_time = {m.settling_time:.3f}")
        print(f"steady_state_error = {m.steady_state_error:.4f}")
        print(f"reached = {m.reached}")
        return 0

    if args.cmd == "calibrate":
        import os
        with open(args.targets, "r", encoding="utf-8") as fh:
            spec = parse_targets(fh.read(),
                                 base_dir=os.path.dirname(args.targets) or ".")
        base = _load_base_params(args.params)
        try:
            params, m, margins = calibrate(spec, base)
        except CalibrationError as exc:
            print(f"calibration failed: {exc}", file=sys.stderr)
            return 1
        print(f"metrics: {m}")
        for name, (lo_margin, hi_margin) in margins.items():
            print(f"margin {name}: +{lo_margin:.4g} / -{hi_margin:.4g}")
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(dump_params(params))
            print(f"wrote parameter file {args.out}")
        return 0

    if args.cmd == "serve":
        from .bridge import Bridge
        scenario = _resolve_scenario(args.scenario)
        params = _load_base_params(args.params)
        bridge = Bridge(scenario, params, port=args.port, speed=args.speed)
        print(f"bridge listening on port {bridge.port}", flush=True)
        bridge.run_forever()
        return 0

    return 2


if __name__ == "__main__":
    raise SystemExit(main())
