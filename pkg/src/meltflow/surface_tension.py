"""Temperature-dependent surface tension, Marangoni forces, and contact-angle
enforcement by prescribing the liquid-gas interface normal near the triple
line.

The continuum wetting force (a tangential force on the triple line driven by
cos(theta) - cos(theta0)) is never evaluated directly; the equilibrium angle
is imposed through the prescribed-normal scheme below, which feeds back into
curvature and thus into the regular surface tension force.
"""

from __future__ import annotations

import numpy as np

from .model import GAS, LIQUID
from .transitions import transition_f


def surface_tension_coefficient(T, mat):
    """alpha(T) = max(alpha_min, alpha0 + alpha'0 (T - T_alpha0)), clamped."""
    return mat.surface_tension_at(T)


def alpha_arrays(T, mat_ids, phase, table, liquid_ref, thermal):
    """Per-particle clamped alpha and the effective alpha' (zero where the
    clamp is active).  Gas particles use the liquid's coefficients."""
    ref = np.where(phase == GAS, liquid_ref, mat_ids)
    a0 = table.alpha0[ref]
    if not thermal:
        return a0.copy(), np.zeros_like(a0)
    ap0 = table.alpha_prime0[ref]
    Ta = table.T_alpha0[ref]
    amin = table.alpha_min[ref]
    lin = np.where(np.isnan(Ta), a0, a0 + ap0 * (T - Ta))
    alpha = np.maximum(amin, lin)
    aprime = np.where(lin > amin, ap0, 0.0)
    return alpha, aprime


def melt_fraction(T, mat_ids, phase, table, liquid_ref, thermal):
    """Regularization prefactor f[T, T_m, T_m + dT_s] per fluid particle;
    1 for materials that never solidify and for isothermal runs."""
    n = len(T)
    if not thermal:
        return np.ones(n)
    ref = np.where(phase == GAS, liquid_ref, mat_ids)
    tm = table.T_m[ref]
    dts = table.dT_s[ref]
    f = np.ones(n)
    m = ~np.isnan(tm)
    if m.any():
        x = np.clip((T[m] - tm[m]) / dts[m], 0.0, 1.0)
        f[m] = x
    return f


def wetting_corrected_normals(field, phase, mat_ids, table, liquid_ref,
                              c1, c2, eps):
    """Blend the raw liquid-gas normal toward the equilibrium-angle normal
    near the solid, per particle.

    Gas particles are corrected with the complementary angle so both sides of
    the interface stay consistently oriented near the triple line.
    """
    n_raw = field.n_lg_raw
    n_sf = field.n_sf
    c_sf = field.c_sf
    out = n_raw.copy()

    fluid = phase <= GAS
    has_lg = np.einsum("ij,ij->i", n_raw, n_raw) > 0.0
    has_sf = np.einsum("ij,ij->i", n_sf, n_sf) > 0.0
    active = fluid & has_lg & has_sf & (c_sf > c1)
    if not active.any():
        field.t_sf[:] = 0.0
        return out
    idx = np.where(active)[0]
    nr = n_raw[idx]
    ns = n_sf[idx]
    # tangential part of the raw normal along the solid surface
    t_raw = nr - np.einsum("ij,ij->i", nr, ns)[:, None] * ns
    t_norm = np.linalg.norm(t_raw, axis=1)
    t_unit = np.zeros_like(t_raw)
    mt = t_norm > eps
    t_unit[mt] = t_raw[mt] / t_norm[mt, None]
    field.t_sf[:] = 0.0
    field.t_sf[idx] = t_unit

    theta = table.theta0[np.where(phase[idx] == GAS, liquid_ref, mat_ids[idx])]
    theta = np.where(np.isnan(theta), 0.5 * np.pi, theta)
    theta = np.where(phase[idx] == GAS, np.pi - theta, theta)
    n_hat = t_unit * np.sin(theta)[:, None] - ns * np.cos(theta)[:, None]

    blend = np.array([transition_f(c, c1, c2) for c in c_sf[idx]])
    n_tilde = blend[:, None] * n_hat + (1.0 - blend)[:, None] * nr
    norm = np.linalg.norm(n_tilde, axis=1)
    n_fin = np.zeros_like(n_tilde)
    mn = norm > eps
    n_fin[mn] = n_tilde[mn] / norm[mn, None]
    out[idx] = n_fin
    return out


def surface_tension_force(field, vol, alpha, aprime, frac, thermal, marangoni):
    """F_s = f (-V alpha kappa grad_c_lg + V alpha' delta_lg grad_t T)."""
    f_norm = -(vol * alpha * field.kappa)[:, None] * field.grad_c_lg
    if thermal and marangoni:
        f_mar = (vol * aprime * field.delta_lg)[:, None] * field.grad_t_T
        return frac[:, None] * (f_norm + f_mar)
    return frac[:, None] * f_norm
