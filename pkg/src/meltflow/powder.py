"""Powder bed generation: truncated log-normal diameters, sequential random
insertion, then gravity settling of analytic spheres with the same
spring-dashpot contact model the resolved bodies use.

This replaces the cohesive-DEM pre-processing pipeline; externally generated
packings can always be supplied through the same CSV format
(x, y, z, d in micrometers).
"""

from __future__ import annotations

import io
import math

import numpy as np


def sample_diameters(count, d_min, d_max, rng, sigma_log=0.3):
    """Log-normal diameters truncated to [d_min, d_max], median at the
    geometric mean of the bounds."""
    if d_min >= d_max:
        raise ValueError("d_min must be < d_max")
    mu = 0.5 * (math.log(d_min) + math.log(d_max))
    out = np.empty(count)
    have = 0
    while have < count:
        draw = rng.lognormal(mu, sigma_log, size=2 * (count - have))
        draw = draw[(draw >= d_min) & (draw <= d_max)]
        take = min(len(draw), count - have)
        out[have:have + take] = draw[:take]
        have += take
    return out


def generate_powder_bed(count, d_min, d_max, seed, domain_min, domain_max,
                        substrate_top, max_tries=2000, settle_speed=1e-3,
                        k_c=1.0, d_c=1.0e-4):
    """Place and settle `count` spherical grains; deterministic given seed.

    Returns an (n, 4) array of (x, y, z, diameter) in meters.  Raises if the
    requested count cannot be placed.
    """
    rng = np.random.default_rng(seed)
    d = sample_diameters(count, d_min, d_max, rng, 0.3)
    r = d / 2.0
    lo = np.asarray(domain_min, float)
    hi = np.asarray(domain_max, float)
    centers = np.zeros((count, 3))
    placed = 0
    for i in range(count):
        ok = False
        for _ in range(max_tries):
            x = rng.uniform(lo[0] + r[i], hi[0] - r[i])
            y = rng.uniform(lo[1] + r[i], hi[1] - r[i])
            z = rng.uniform(substrate_top + r[i], hi[2] - r[i])
            c = np.array([x, y, z])
            if placed == 0:
                ok = True
            else:
                gap = np.linalg.norm(centers[:placed] - c, axis=1) - (r[:placed] + r[i])
                ok = bool((gap > 0).all())
            if ok:
                centers[i] = c
                placed += 1
                break
        if not ok:
            raise RuntimeError(f"could not place all grains (placed {placed} of {count})")

    centers = _settle(centers, r, lo, hi, substrate_top, settle_speed, k_c, d_c)
    return np.column_stack([centers, d])


def _settle(centers, r, lo, hi, floor, target_speed, k_c, d_c):
    """Explicit spring-dashpot settling under gravity until grains rest."""
    n = len(centers)
    rho = 7430.0  # only sets the inertia scale of the settling dynamics
    mass = rho * 4.0 / 3.0 * math.pi * r**3
    vel = np.zeros((n, 3))
    g = np.array([0.0, 0.0, -9.81])
    dt = 0.2 * math.sqrt(mass.min() / k_c)
    max_steps = 200000
    for step in range(max_steps):
        f = mass[:, None] * g
        # grain-grain contacts
        dvec = centers[:, None, :] - centers[None, :, :]
        dist = np.linalg.norm(dvec, axis=2)
        np.fill_diagonal(dist, np.inf)
        overlap = (r[:, None] + r[None, :]) - dist
        ii, jj = np.where(overlap > 0)
        for a, b in zip(ii.tolist(), jj.tolist()):
            e = dvec[a, b] / dist[a, b]
            gdot = -float(e @ (vel[a] - vel[b]))
            f[a] += (k_c * overlap[a, b] + d_c * abs(overlap[a, b]) * gdot) * e
        # floor and side walls
        gap = (centers[:, 2] - r) - floor
        m = gap < 0
        f[m, 2] += k_c * (-gap[m]) + d_c * (-gap[m]) * (-vel[m, 2])
        for ax in range(2):
            low = (centers[:, ax] - r) - lo[ax]
            m = low < 0
            f[m, ax] += k_c * (-low[m])
            high = hi[ax] - (centers[:, ax] + r)
            m = high < 0
            f[m, ax] -= k_c * (-high[m])
        vel += dt * f / mass[:, None]
        vel *= 0.999  # numerical settling aid
        centers = centers + dt * vel
        if step % 200 == 0 and step > 0:
            if float(np.linalg.norm(vel, axis=1).max()) < target_speed:
                break
    return centers


def write_csv(grains, path):
    """CSV columns x,y,z,d in micrometers."""
    with open(path, "w") as fp:
        fp.write(grains_to_csv(grains))


def grains_to_csv(grains) -> str:
    buf = io.StringIO()
    buf.write("x_um,y_um,z_um,d_um\n")
    for x, y, z, d in grains:
        buf.write(f"{x*1e6:.6f},{y*1e6:.6f},{z*1e6:.6f},{d*1e6:.6f}\n")
    return buf.getvalue()


def read_csv(path_or_text) -> np.ndarray:
    """Read a powder CSV back into meters."""
    if "\n" in str(path_or_text):
        lines = str(path_or_text).strip().splitlines()
    else:
        with open(path_or_text) as fp:
            lines = fp.read().strip().splitlines()
    rows = []
    for ln in lines[1:]:
        x, y, z, d = (float(v) for v in ln.split(","))
        rows.append((x * 1e-6, y * 1e-6, z * 1e-6, d * 1e-6))
    return np.array(rows)
