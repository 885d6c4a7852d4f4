"""Scenario execution: step loop, periodic output, event logs, and the final
run summary (melt-pool depth, ejected bodies, surface height profile).
"""

from __future__ import annotations

import json
import math
import os
import time

import numpy as np

from . import vtk_io
from .model import GAS, LIQUID, SOLID_RIGID, SOLID_SUBSTRATE
from .scenario import ScenarioConfig, build_engine, default_dt
from .stepper import Engine, SimulationAbort


def run_scenario(cfg: ScenarioConfig, out_dir: str, progress=None,
                 async_io: bool = True):
    """Run to end_time, writing outputs; returns the summary dict."""
    os.makedirs(out_dir, exist_ok=True)
    engine, info = build_engine(cfg)
    p = engine.particles

    substrate0 = p.phase == SOLID_SUBSTRATE
    z0 = p.pos[:, 2].copy()
    substrate_top = info["substrate_top"]
    bed_top = info["bed_top"]

    engine.prepare()
    dt = cfg.dt if cfg.dt is not None else default_dt(cfg, engine)
    engine.check_dt(dt, policy="abort" if cfg.dt_policy == "abort" else "warn")

    writer = vtk_io.OutputWriter(out_dir, asynchronous=async_io)
    report_path = os.path.join(out_dir, "steps.csv")
    bodies_path = os.path.join(out_dir, "bodies.csv")
    events_path = os.path.join(out_dir, "transitions.csv")
    n_steps = max(1, int(math.ceil(cfg.end_time / dt - 1e-12)))
    out_every = max(1, int(round(cfg.output_interval / dt))) if cfg.output_interval > 0 else n_steps

    t_wall = time.perf_counter()
    melt_depth = 0.0
    with open(report_path, "w") as rep:
        rep.write(_header() + "\n")
        ev_count = 0
        for k in range(n_steps):
            report = engine.step(dt)
            rep.write(report.csv_row() + "\n")
            if cfg.thermal:
                melted_sub = substrate0 & engine.ever_liquid
                if melted_sub.any() and substrate_top is not None:
                    melt_depth = max(melt_depth, float(substrate_top - z0[melted_sub].min()))
            if (k + 1) % out_every == 0 or k == n_steps - 1:
                writer.submit(vtk_io.Snapshot.from_engine(engine, cfg.name,
                                                          cfg.output_formats))
                if engine.bodies.bodies:
                    vtk_io.write_body_states(bodies_path, engine.step_count,
                                             engine.t, engine.bodies)
                if progress:
                    progress(engine, report)
            if len(engine.transition_events) > ev_count:
                with open(events_path, "a") as ev:
                    if ev_count == 0:
                        ev.write("step,particle,old_phase,new_phase\n")
                    for e in engine.transition_events[ev_count:]:
                        ev.write(e.csv_row() + "\n")
                ev_count = len(engine.transition_events)
    writer.close()

    summary = summarize(engine, cfg, info, z0, substrate0, melt_depth, dt,
                        time.perf_counter() - t_wall)
    with open(os.path.join(out_dir, "summary.json"), "w") as fp:
        json.dump(summary, fp, indent=2)
    return summary


def _header():
    from .stepper import StepReport
    return StepReport.CSV_HEADER


def summarize(engine: Engine, cfg, info, z0, substrate0, melt_depth, dt,
              wall_time):
    p = engine.particles
    counts = {nm: int(c) for nm, c in info["counts"].items()}
    counts["wall"] = info["wall_count"]
    summary = {
        "name": cfg.name,
        "steps": engine.step_count,
        "time": engine.t,
        "dt": dt,
        "wall_time_s": wall_time,
        "particles": int(p.n),
        "counts": counts,
        "bodies_final": len(engine.bodies.bodies),
        "transitions": len(engine.transition_events),
        "max_speed": float(np.linalg.norm(p.vel[p.is_fluid()], axis=1).max())
        if p.is_fluid().any() else 0.0,
        "melt_pool_max_depth": melt_depth if cfg.thermal else None,
        "substrate_top": info["substrate_top"],
        "bed_top": info["bed_top"],
        "max_grain_diameter": info["max_grain_diameter"],
    }
    bed_top = info["bed_top"]
    d_max = info["max_grain_diameter"]
    if bed_top is not None and d_max:
        summary["ejected_bodies"] = ejected_body_count(engine.bodies, bed_top, d_max)
    if info["substrate_top"] is not None:
        prof = surface_height_profile(p, cfg.dx)
        summary["surface_height_mean"] = float(np.mean(prof[:, 2])) if len(prof) else None
    return summary


def ejected_body_count(bodies, bed_top, max_diameter) -> int:
    """Bodies whose center of mass ended more than two max-diameters above
    the initial bed top."""
    return sum(1 for b in bodies.bodies.values()
               if b.com[2] > bed_top + 2.0 * max_diameter)


def surface_height_profile(particles, dx):
    """Topmost non-gas material height per (x, y) grid column (walls excluded)."""
    m = (particles.phase <= SOLID_RIGID) & (particles.phase != GAS)
    if not m.any():
        return np.zeros((0, 3))
    pos = particles.pos[m]
    cols = {}
    for x, y, z in pos:
        key = (int(round(x / dx)), int(round(y / dx)))
        if key not in cols or z > cols[key]:
            cols[key] = z
    out = np.array([[kx * dx, ky * dx, z] for (kx, ky), z in sorted(cols.items())])
    return out
