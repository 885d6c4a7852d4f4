"""Command-line front end: run, validate, presets, powder-gen, report.

Exit codes: 0 success, 1 validation failure, 2 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import powder, presets, runner, scenario
from .neighbors import BlowupError
from .stepper import SimulationAbort


def _load_config(spec: str) -> scenario.ScenarioConfig:
    if os.path.exists(spec):
        with open(spec) as fp:
            text = fp.read()
    else:
        text = presets.preset_text(spec)
        if text is None:
            raise scenario.ScenarioError(
                [f"{spec!r} is neither a file nor a bundled preset "
                 f"(available: {', '.join(presets.preset_names())})"])
    return scenario.parse_scenario(text)


def _apply_overrides(cfg, pairs):
    """--set dotted.path=value on the parsed config (values are TOML-ish)."""
    for pair in pairs:
        path, _, raw = pair.partition("=")
        val = _parse_value(raw)
        obj = cfg
        parts = path.split(".")
        for part in parts[:-1]:
            obj = obj[int(part)] if isinstance(obj, list) else _get(obj, part)
        last = parts[-1]
        if isinstance(obj, list):
            obj[int(last)] = val
        elif isinstance(obj, dict):
            obj[last] = val
        else:
            if not hasattr(obj, last):
                raise scenario.ScenarioError([f"--set: unknown field {path!r}"])
            setattr(obj, last, val)
    return cfg


def _get(obj, part):
    if isinstance(obj, dict):
        return obj[part]
    return getattr(obj, part)


def _parse_value(raw: str):
    raw = raw.strip()
    if raw in ("true", "false"):
        return raw == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    if " " in raw:
        from .units import parse_quantity
        try:
            return parse_quantity(raw)
        except Exception:
            pass
    return raw


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="meltflow",
                                 description="meshfree melt/powder dynamics engine")
    ap.add_argument("--threads", type=int, default=0,
                    help="worker threads for pair sums (0 = auto)")
    ap.add_argument("--deterministic", action="store_true",
                    help="single-threaded, synchronous output")
    ap.add_argument("--output-dir", default="out")
    ap.add_argument("--seed", type=int, default=None,
                    help="seed for generated powder beds without explicit seed")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p_run = sub.add_parser("run", help="run a scenario to end_time")
    p_run.add_argument("scenario")
    p_run.add_argument("--set", action="append", default=[], dest="overrides",
                       metavar="PATH=VALUE")

    p_val = sub.add_parser("validate", help="validate a scenario file")
    p_val.add_argument("scenario")

    sub.add_parser("presets", help="list bundled presets")

    p_gen = sub.add_parser("powder-gen", help="generate a settled powder bed CSV")
    p_gen.add_argument("--count", type=int, required=True)
    p_gen.add_argument("--d-min", type=float, required=True, help="[um]")
    p_gen.add_argument("--d-max", type=float, required=True, help="[um]")
    p_gen.add_argument("--domain", required=True, help="X,Y,Z extents [um]")
    p_gen.add_argument("--floor", type=float, default=0.0, help="substrate top [um]")
    p_gen.add_argument("--out", required=True)

    p_rep = sub.add_parser("report", help="summarize a finished run directory")
    p_rep.add_argument("run_dir")

    args = ap.parse_args(argv)

    if args.deterministic:
        args.threads = 1
    if args.threads > 0:
        import numba
        numba.set_num_threads(args.threads)

    try:
        if args.cmd == "validate":
            return cmd_validate(args)
        if args.cmd == "run":
            return cmd_run(args)
        if args.cmd == "presets":
            for name in presets.preset_names():
                print(name)
            return 0
        if args.cmd == "powder-gen":
            return cmd_powder_gen(args)
        if args.cmd == "report":
            return cmd_report(args)
    except scenario.ScenarioError as e:
        for v in e.violations:
            print(f"error: {v}", file=sys.stderr)
        return 1
    except (SimulationAbort, BlowupError, FloatingPointError) as e:
        print(f"numerical abort: {e}", file=sys.stderr)
        return 2
    return 0


def cmd_validate(args) -> int:
    try:
        cfg = _load_config(args.scenario)
    except scenario.ScenarioError as e:
        for v in e.violations:
            print(f"error: {v}", file=sys.stderr)
        return 1
    issues = scenario.validate_scenario(cfg)
    hard = [v for v in issues if not v.startswith("warning:")]
    for v in issues:
        stream = sys.stderr if not v.startswith("warning:") else sys.stdout
        print(v, file=stream)
    if hard:
        return 1
    print(f"{cfg.name}: ok")
    return 0


def cmd_run(args) -> int:
    cfg = _load_config(args.scenario)
    if args.overrides:
        cfg = _apply_overrides(cfg, args.overrides)
    if args.seed is not None:
        for reg in cfg.regions:
            if reg.kind == "powder" and reg.seed is None:
                reg.seed = args.seed
    issues = [v for v in scenario.validate_scenario(cfg) if not v.startswith("warning:")]
    if issues:
        for v in issues:
            print(f"error: {v}", file=sys.stderr)
        return 1
    out_dir = os.path.join(args.output_dir, cfg.name)

    def progress(engine, report):
        print(f"  step {report.step:7d}  t = {report.time*1e3:.5f} ms  "
              f"max|u| = {report.max_speed:.3e} m/s  T = [{report.min_T:.0f}, "
              f"{report.max_T:.0f}] K", flush=True)

    summary = runner.run_scenario(cfg, out_dir, progress=progress,
                                  async_io=not args.deterministic)
    print(json.dumps(summary, indent=2))
    return 0


def cmd_powder_gen(args) -> int:
    extents = [float(v) * 1e-6 for v in args.domain.split(",")]
    grains = powder.generate_powder_bed(
        args.count, args.d_min * 1e-6, args.d_max * 1e-6,
        args.seed if args.seed is not None else 0,
        (0.0, 0.0, 0.0), tuple(extents), args.floor * 1e-6)
    powder.write_csv(grains, args.out)
    print(f"wrote {len(grains)} grains to {args.out}")
    return 0


def cmd_report(args) -> int:
    spath = os.path.join(args.run_dir, "summary.json")
    with open(spath) as fp:
        summary = json.load(fp)
    bodies_path = os.path.join(args.run_dir, "bodies.csv")
    if os.path.exists(bodies_path) and summary.get("bed_top") and summary.get("max_grain_diameter"):
        final = _final_body_rows(bodies_path)
        thr = summary["bed_top"] + 2.0 * summary["max_grain_diameter"]
        summary["ejected_bodies"] = int(sum(1 for z in final if z > thr))
    print(json.dumps(summary, indent=2))
    return 0


def _final_body_rows(path):
    last_step = -1
    rows = {}
    with open(path) as fp:
        next(fp)
        for ln in fp:
            parts = ln.split(",")
            step, bid, z = int(parts[0]), int(parts[2]), float(parts[6])
            if step > last_step:
                last_step = step
            rows.setdefault(bid, []).append((step, z))
    return [max(v)[1] for v in rows.values()]


if __name__ == "__main__":
    sys.exit(main())
