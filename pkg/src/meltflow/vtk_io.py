"""Output writers: legacy-ASCII VTK polydata, CSV field dumps, step reports,
transition events, and body trajectories.

A dedicated writer thread consumes immutable snapshots so the simulation
never blocks on disk except at shutdown.
"""

from __future__ import annotations

import os
import queue
import threading
from dataclasses import dataclass

import numpy as np

from .model import PHASE_NAMES


def _fmt_array(a):
    return " ".join(f"{x:.9e}" for x in a)


def vtk_polydata(pos, phase, rho, p, T, vel, normal, title="particles") -> str:
    """Legacy-ASCII VTK polydata with per-point scalars and vectors."""
    n = pos.shape[0]
    L = ["# vtk DataFile Version 3.0", title, "ASCII", "DATASET POLYDATA",
         f"POINTS {n} double"]
    for i in range(n):
        L.append(f"{pos[i,0]:.9e} {pos[i,1]:.9e} {pos[i,2]:.9e}")
    L.append(f"VERTICES {n} {2*n}")
    for i in range(n):
        L.append(f"1 {i}")
    L.append(f"POINT_DATA {n}")
    L.append("SCALARS phase int 1")
    L.append("LOOKUP_TABLE default")
    L.extend(str(int(v)) for v in phase)
    speed = np.linalg.norm(vel, axis=1)
    for name, arr in (("density", rho), ("pressure", p), ("temperature", T),
                      ("speed", speed)):
        L.append(f"SCALARS {name} double 1")
        L.append("LOOKUP_TABLE default")
        L.extend(f"{v:.9e}" for v in arr)
    for name, arr in (("velocity", vel), ("interface_normal", normal)):
        L.append(f"VECTORS {name} double")
        for i in range(n):
            L.append(f"{arr[i,0]:.9e} {arr[i,1]:.9e} {arr[i,2]:.9e}")
    return "\n".join(L) + "\n"


def csv_fields(pos, phase, rho, p, T, vel, normal) -> str:
    n = pos.shape[0]
    L = ["x,y,z,phase,density,pressure,temperature,speed,vx,vy,vz,nx,ny,nz"]
    speed = np.linalg.norm(vel, axis=1)
    for i in range(n):
        L.append(
            f"{pos[i,0]:.9e},{pos[i,1]:.9e},{pos[i,2]:.9e},{int(phase[i])},"
            f"{rho[i]:.9e},{p[i]:.9e},{T[i]:.9e},{speed[i]:.9e},"
            f"{vel[i,0]:.9e},{vel[i,1]:.9e},{vel[i,2]:.9e},"
            f"{normal[i,0]:.9e},{normal[i,1]:.9e},{normal[i,2]:.9e}")
    return "\n".join(L) + "\n"


@dataclass
class Snapshot:
    step: int
    run: str
    formats: tuple
    pos: np.ndarray
    phase: np.ndarray
    rho: np.ndarray
    p: np.ndarray
    T: np.ndarray
    vel: np.ndarray
    normal: np.ndarray

    @classmethod
    def from_engine(cls, engine, run, formats):
        p = engine.particles
        return cls(engine.step_count, run, tuple(formats), p.pos.copy(),
                   p.phase.copy(), p.rho.copy(), p.p.copy(), p.T.copy(),
                   p.vel.copy(), engine.field.n_lg.copy())


class OutputWriter:
    """Writes snapshots on a daemon thread; close() drains the queue."""

    def __init__(self, out_dir, asynchronous=True):
        self.out_dir = out_dir
        os.makedirs(out_dir, exist_ok=True)
        self.asynchronous = asynchronous
        self._q: queue.Queue = queue.Queue()
        self._thread = None
        if asynchronous:
            self._thread = threading.Thread(target=self._loop, daemon=True)
            self._thread.start()

    def submit(self, snap: Snapshot):
        if self.asynchronous:
            self._q.put(snap)
        else:
            self._write(snap)

    def _loop(self):
        while True:
            snap = self._q.get()
            if snap is None:
                return
            try:
                self._write(snap)
            finally:
                self._q.task_done()

    def _write(self, snap: Snapshot):
        base = os.path.join(self.out_dir, f"{snap.run}_{snap.step}")
        if "vtk" in snap.formats:
            with open(base + ".vtk", "w") as fp:
                fp.write(vtk_polydata(snap.pos, snap.phase, snap.rho, snap.p,
                                      snap.T, snap.vel, snap.normal,
                                      title=f"{snap.run} step {snap.step}"))
        if "csv" in snap.formats:
            with open(base + ".csv", "w") as fp:
                fp.write(csv_fields(snap.pos, snap.phase, snap.rho, snap.p,
                                    snap.T, snap.vel, snap.normal))

    def close(self):
        if self.asynchronous and self._thread is not None:
            self._q.put(None)
            self._thread.join()


def write_body_states(path, step, t, bodies, append=True):
    new = not (append and os.path.exists(path))
    with open(path, "a" if append else "w") as fp:
        if new:
            fp.write("step,time,body,mass,x,y,z,vx,vy,vz\n")
        for bid in sorted(bodies.bodies):
            b = bodies.bodies[bid]
            fp.write(f"{step},{t:.9e},{bid},{b.mass:.9e},"
                     f"{b.com[0]:.9e},{b.com[1]:.9e},{b.com[2]:.9e},"
                     f"{b.vel[0]:.9e},{b.vel[1]:.9e},{b.vel[2]:.9e}\n")


def read_vtk_points(path):
    """Minimal reader for the files this module writes (test support)."""
    with open(path) as fp:
        lines = fp.read().splitlines()
    for k, ln in enumerate(lines):
        if ln.startswith("POINTS"):
            n = int(ln.split()[1])
            pts = [tuple(float(v) for v in lines[k + 1 + i].split()) for i in range(n)]
            return np.array(pts)
    raise ValueError(f"no POINTS block in {path}")
