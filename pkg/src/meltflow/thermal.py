"""Energy equation: conduction with a harmonic-mean conductivity that keeps
fluxes consistent across phase interfaces with discontinuous k, plus the
interface heat sources, integrated with forward Euler.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from .model import BOUNDARY_WALL


@njit(parallel=True, cache=True)
def conduction_pass(start, idx, dist, dw, mass, rho, T, mat, k_t, cp_t, dTdt):
    """dT_i/dt from pairwise conduction, all phases participating.

    Pair exchange is antisymmetric in m*c_p*T, so pure conduction conserves
    total thermal energy to round-off.
    """
    n = T.shape[0]
    for i in prange(n):
        ki = k_t[mat[i]]
        acc = 0.0
        for p in range(start[i], start[i + 1]):
            j = idx[p]
            r = dist[p]
            if r <= 0.0:
                continue
            kj = k_t[mat[j]]
            ks = ki + kj
            if ks <= 0.0:
                continue
            kbar = 4.0 * ki * kj / ks
            # diffusive sign: dw <= 0, so a hotter neighbor heats particle i
            acc += (mass[j] / rho[j]) * kbar * (T[i] - T[j]) / r * dw[p]
        dTdt[i] = acc / (rho[i] * cp_t[mat[i]])


def energy_step(particles, dTdt, source_laser, source_evap, table, dt,
                wall_temperature):
    """Explicit temperature update; wall particles hold their prescribed
    temperature but still conduct into their neighbors."""
    cp = table.c_p[particles.mat]
    src = (source_laser + source_evap) / (particles.rho * cp)
    particles.T += dt * (dTdt + src)
    particles.T[particles.phase == BOUNDARY_WALL] = wall_temperature
    if not np.isfinite(particles.T).all():
        bad = int(np.argmax(~np.isfinite(particles.T)))
        raise FloatingPointError(f"non-finite temperature (particle {bad}, energy step)")


def conduction_rate_pair(i, j, pos, mass, rho, T, k_i, k_j, kern):
    """Reference single-pair conduction contribution to c_p dT_i/dt * rho_i."""
    r = float(np.linalg.norm(pos[i] - pos[j]))
    if k_i + k_j <= 0:
        return 0.0
    kbar = 4.0 * k_i * k_j / (k_i + k_j)
    return (mass[j] / rho[j]) * kbar * (T[i] - T[j]) / r * kern.derivative(r)
