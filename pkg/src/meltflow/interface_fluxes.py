"""Laser heat input, evaporation-induced recoil pressure, and evaporative
heat loss, all distributed over interface bands via the surface delta
functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import GAS, LIQUID, SOLID_RIGID, SOLID_SUBSTRATE


@dataclass
class LaserBeam:
    """Gaussian beam along a piecewise-linear waypoint path with on/off
    windows.  Peak irradiance follows from the total power by normalization:
    s0 = 2 P / (pi r_w^2)."""

    power: float                    # [W]
    radius: float                   # effective radius r_w = d_w / 2 [m]
    direction: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -1.0]))
    waypoints: list = field(default_factory=list)   # (t, x, y, z)
    windows: list = field(default_factory=lambda: [(0.0, math.inf)])

    def __post_init__(self):
        self.direction = np.asarray(self.direction, float)
        nrm = np.linalg.norm(self.direction)
        if nrm == 0:
            raise ValueError("laser direction must be a nonzero vector")
        self.direction = self.direction / nrm
        if not self.waypoints:
            raise ValueError("laser path needs at least one waypoint")
        self.waypoints = sorted(self.waypoints, key=lambda p: p[0])

    @property
    def peak_irradiance(self) -> float:
        return 2.0 * self.power / (math.pi * self.radius**2)

    def is_on(self, t: float) -> bool:
        return any(a <= t < b for a, b in self.windows)

    def center(self, t: float) -> np.ndarray:
        pts = self.waypoints
        if t <= pts[0][0]:
            return np.array(pts[0][1:4], float)
        if t >= pts[-1][0]:
            return np.array(pts[-1][1:4], float)
        for (t0, *p0), (t1, *p1) in zip(pts, pts[1:]):
            if t0 <= t <= t1:
                s = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
                return (1 - s) * np.array(p0, float) + s * np.array(p1, float)
        return np.array(pts[-1][1:4], float)

    def irradiance(self, x: np.ndarray, t: float) -> np.ndarray:
        """Incident power per unit area at positions x (n x 3), measured in
        the plane transverse to the beam direction."""
        if not self.is_on(t):
            return np.zeros(x.shape[0])
        d = x - self.center(t)[None, :]
        along = d @ self.direction
        trans2 = np.einsum("ij,ij->i", d, d) - along**2
        return self.peak_irradiance * np.exp(-2.0 * np.maximum(trans2, 0.0) / self.radius**2)


def recoil_pressure(T, mat):
    """p_v(T) = C_P exp[-C_T (1/T - 1/T_v)], strictly increasing in T."""
    if np.any(np.asarray(T) <= 0):
        raise FloatingPointError("non-positive temperature in recoil pressure")
    return mat.C_P * np.exp(-mat.C_T * (1.0 / np.asarray(T) - 1.0 / mat.T_v))


def recoil_pressure_arrays(T, C_P, C_T, T_v):
    return C_P * np.exp(-C_T * (1.0 / T - 1.0 / T_v))


def recoil_force(field_, vol, T, phase, frac, table, liquid_ref):
    """F_v = -f V p_v(T) n_lg delta_lg on fluid particles at the lg band."""
    n = len(T)
    out = np.zeros((n, 3))
    m = (phase <= GAS) & (field_.delta_lg > 0.0)
    if not m.any():
        return out
    C_P = table.C_P[liquid_ref]
    C_T = table.C_T[liquid_ref]
    T_v = table.T_v[liquid_ref]
    pv = recoil_pressure_arrays(T[m], C_P, C_T, T_v)
    out[m] = -(frac[m] * vol[m] * pv * field_.delta_lg[m])[:, None] * field_.n_lg[m]
    return out


def laser_heating(field_, pos, phase, mat_ids, table, beam: LaserBeam, t):
    """Volumetric heating zeta <-n_hg . e_l> s(x) delta_hg on the
    heat-absorbing (melt + solid) side of the gas interface, [W/m^3]."""
    n = pos.shape[0]
    out = np.zeros(n)
    if beam is None or not beam.is_on(t):
        return out
    h_side = (phase == LIQUID) | (phase == SOLID_SUBSTRATE) | (phase == SOLID_RIGID)
    m = h_side & (field_.delta_hg > 0.0)
    if not m.any():
        return out
    zeta = table.zeta[mat_ids[m]]
    incidence = np.maximum(0.0, -(field_.n_hg[m] @ beam.direction))
    out[m] = zeta * incidence * beam.irradiance(pos[m], t) * field_.delta_hg[m]
    return out


def evaporation_heat_loss(field_, T, phase, table, liquid_ref, c_s=None):
    """Volumetric heat sink -mdot (h_v + h(T)) delta_lg with the vapor mass
    flow mdot = 0.82 c_s p_v(T) sqrt(C_M / T); always <= 0 for T > 0."""
    n = len(T)
    out = np.zeros(n)
    m = (phase <= GAS) & (field_.delta_lg > 0.0)
    if not m.any():
        return out
    C_P = table.C_P[liquid_ref]
    C_T = table.C_T[liquid_ref]
    T_v = table.T_v[liquid_ref]
    C_M = table.C_M[liquid_ref]
    h_v = table.h_v[liquid_ref]
    T_h0 = table.T_h0[liquid_ref]
    c_p = table.c_p[liquid_ref]
    cs = table.c_s[liquid_ref] if c_s is None else c_s
    Tm_ = T[m]
    pv = recoil_pressure_arrays(Tm_, C_P, C_T, T_v)
    mdot = 0.82 * cs * pv * np.sqrt(C_M / Tm_)
    enthalpy = c_p * (Tm_ - T_h0)
    out[m] = -mdot * (h_v + enthalpy) * field_.delta_lg[m]
    return out
