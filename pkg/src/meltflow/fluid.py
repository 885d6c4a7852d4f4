"""Weakly compressible fluid core.

Density summation, linear equation of state, pressure/viscous pair forces
with the transport-velocity formulation, and Adami-style boundary particles
(static walls, substrate, and rigid-body members all act as moving-wall
boundary particles toward the fluid).

All pair sums are gathered per particle over the CSR adjacency in a fixed
order, which makes results bitwise reproducible for any thread count.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from .model import GAS, SOLID_RIGID

# abort codes set by compiled passes
ERR_NONE = 0
ERR_COINCIDENT = 1


@njit(cache=True, inline="always")
def _f_lin(x, x1, x2):
    """Linear transition ramp: 0 below x1, 1 above x2."""
    if x < x1:
        return 0.0
    if x > x2:
        return 1.0
    return (x - x1) / (x2 - x1)


@njit(parallel=True, cache=True)
def density_pass(start, idx, w, w0, mass, phase, rho):
    """Summation density rho_i = m_i (W(0) + sum_j W_ij) for fluid particles.

    Solid and wall particles keep their reference density (fixed volume).
    """
    n = rho.shape[0]
    for i in prange(n):
        if phase[i] > GAS:
            continue
        s = w0
        for k in range(start[i], start[i + 1]):
            s += w[k]
        rho[i] = mass[i] * s


def equation_of_state(rho, rho0, c):
    """p = c^2 (rho - rho0); negative pressures are permitted."""
    return c * c * (rho - rho0)


@njit(parallel=True, cache=True)
def eos_pass(rho, mat, phase, c_t, rho0_t, p):
    n = rho.shape[0]
    for i in prange(n):
        if phase[i] > GAS:
            p[i] = 0.0
        else:
            c = c_t[mat[i]]
            p[i] = c * c * (rho[i] - rho0_t[mat[i]])


@njit(parallel=True, cache=True)
def wall_extrapolation_pass(start, idx, w, pos, vel, rho, p, phase, a_solid,
                            gravity, p_ext, u_eff):
    """Adami boundary treatment: kernel-weighted fluid pressure plus a
    hydrostatic correction, and the no-slip ghost velocity 2 v_wall - <v_f>.
    """
    n = pos.shape[0]
    for i in prange(n):
        if phase[i] <= GAS:
            continue
        sw = 0.0
        sp = 0.0
        svx = 0.0
        svy = 0.0
        svz = 0.0
        shx = 0.0
        shy = 0.0
        shz = 0.0
        for k in range(start[i], start[i + 1]):
            j = idx[k]
            if phase[j] > GAS:
                continue
            wk = w[k]
            sw += wk
            sp += p[j] * wk
            svx += vel[j, 0] * wk
            svy += vel[j, 1] * wk
            svz += vel[j, 2] * wk
            rw = rho[j] * wk
            shx += rw * (pos[i, 0] - pos[j, 0])
            shy += rw * (pos[i, 1] - pos[j, 1])
            shz += rw * (pos[i, 2] - pos[j, 2])
        # prescribed wall velocity: rigid members carry the rigid-motion
        # field in vel; static walls and substrate are at rest
        if phase[i] == SOLID_RIGID:
            vwx, vwy, vwz = vel[i, 0], vel[i, 1], vel[i, 2]
        else:
            vwx, vwy, vwz = 0.0, 0.0, 0.0
        if sw > 0.0:
            gx = gravity[0] - a_solid[i, 0]
            gy = gravity[1] - a_solid[i, 1]
            gz = gravity[2] - a_solid[i, 2]
            p_ext[i] = (sp + gx * shx + gy * shy + gz * shz) / sw
            u_eff[i, 0] = 2.0 * vwx - svx / sw
            u_eff[i, 1] = 2.0 * vwy - svy / sw
            u_eff[i, 2] = 2.0 * vwz - svz / sw
        else:
            p_ext[i] = 0.0
            u_eff[i, 0] = vwx
            u_eff[i, 1] = vwy
            u_eff[i, 2] = vwz


@njit(parallel=True, cache=True)
def momentum_pass(start, idx, dist, w, dw,
                  pos, vel, vtr, mass, rho, p, T, phase, mat, body,
                  p_ext, u_eff, delta_lg,
                  rho0_t, eta_t, c_t, pb_t, alg0_t, asf0_t, Tm_t, dTd_t,
                  thermal, h, eps_diss, k_b, d_b, r_b,
                  en_pressure, en_viscous, en_dissipation, en_barrier, en_transport,
                  acc, a_bg, err):
    """Pressure, viscous, transport-velocity, dissipation, and barrier forces
    on fluid particles; per unit mass (accelerations)."""
    n = pos.shape[0]
    for i in prange(n):
        if phase[i] > GAS:
            acc[i, 0] = 0.0
            acc[i, 1] = 0.0
            acc[i, 2] = 0.0
            a_bg[i, 0] = 0.0
            a_bg[i, 1] = 0.0
            a_bg[i, 2] = 0.0
            continue
        mi = mass[i]
        rhoi = rho[i]
        vi = mi / rhoi
        vi2 = vi * vi
        pi = p[i]
        etai = eta_t[mat[i]]
        pbi = pb_t[mat[i]]
        ci = c_t[mat[i]]
        # interface viscosity factor (dissipation), split lg + sf
        if en_dissipation:
            ai_d = alg0_t[mat[i]] * h * delta_lg[i]
            if thermal:
                tm = Tm_t[mat[i]]
                if tm == tm:  # material participates in melting
                    ai_d += asf0_t[mat[i]] * (1.0 - _f_lin(T[i], tm, tm + dTd_t[mat[i]]))
        else:
            ai_d = 0.0
        # transport-velocity extra stress A = rho u (u~ - u)
        dux = vtr[i, 0] - vel[i, 0]
        duy = vtr[i, 1] - vel[i, 1]
        duz = vtr[i, 2] - vel[i, 2]
        a_ixx = rhoi * vel[i, 0] * dux
        a_ixy = rhoi * vel[i, 0] * duy
        a_ixz = rhoi * vel[i, 0] * duz
        a_iyx = rhoi * vel[i, 1] * dux
        a_iyy = rhoi * vel[i, 1] * duy
        a_iyz = rhoi * vel[i, 1] * duz
        a_izx = rhoi * vel[i, 2] * dux
        a_izy = rhoi * vel[i, 2] * duy
        a_izz = rhoi * vel[i, 2] * duz

        fx = 0.0
        fy = 0.0
        fz = 0.0
        bx = 0.0
        by = 0.0
        bz = 0.0
        for k in range(start[i], start[i + 1]):
            j = idx[k]
            r = dist[k]
            if r <= 0.0:
                err[0] = ERR_COINCIDENT
                err[1] = i
                continue
            dwk = dw[k]
            ex = (pos[i, 0] - pos[j, 0]) / r
            ey = (pos[i, 1] - pos[j, 1]) / r
            ez = (pos[i, 2] - pos[j, 2]) / r
            rhoj = rho[j]
            vj = mass[j] / rhoj
            vv = vi2 + vj * vj
            solid_j = phase[j] > GAS
            if solid_j:
                pj = p_ext[j]
                ujx = u_eff[j, 0]
                ujy = u_eff[j, 1]
                ujz = u_eff[j, 2]
                etaij = etai
            else:
                pj = p[j]
                ujx = vel[j, 0]
                ujy = vel[j, 1]
                ujz = vel[j, 2]
                ee = etai + eta_t[mat[j]]
                etaij = 2.0 * etai * eta_t[mat[j]] / ee if ee > 0.0 else 0.0
            uijx = vel[i, 0] - ujx
            uijy = vel[i, 1] - ujy
            uijz = vel[i, 2] - ujz

            if en_pressure:
                pt = (rhoj * pi + rhoi * pj) / (rhoi + rhoj)
                c = -vv * pt * dwk
                fx += c * ex
                fy += c * ey
                fz += c * ez
            if en_viscous and etaij > 0.0:
                c = vv * etaij * dwk / r
                fx += c * uijx
                fy += c * uijy
                fz += c * uijz
            if en_transport:
                # background-pressure drift correction
                c = -pbi * vv * dwk / mi
                bx += c * ex
                by += c * ey
                bz += c * ez
                # convected extra stress, 0.5 (A_i + A_j) e_ij
                if solid_j:
                    mxx, mxy, mxz = a_ixx, a_ixy, a_ixz
                    myx, myy, myz = a_iyx, a_iyy, a_iyz
                    mzx, mzy, mzz = a_izx, a_izy, a_izz
                else:
                    djx = vtr[j, 0] - vel[j, 0]
                    djy = vtr[j, 1] - vel[j, 1]
                    djz = vtr[j, 2] - vel[j, 2]
                    mxx = a_ixx + rhoj * vel[j, 0] * djx
                    mxy = a_ixy + rhoj * vel[j, 0] * djy
                    mxz = a_ixz + rhoj * vel[j, 0] * djz
                    myx = a_iyx + rhoj * vel[j, 1] * djx
                    myy = a_iyy + rhoj * vel[j, 1] * djy
                    myz = a_iyz + rhoj * vel[j, 1] * djz
                    mzx = a_izx + rhoj * vel[j, 2] * djx
                    mzy = a_izy + rhoj * vel[j, 2] * djy
                    mzz = a_izz + rhoj * vel[j, 2] * djz
                c = 0.5 * vv * dwk
                fx += c * (mxx * ex + mxy * ey + mxz * ez)
                fy += c * (myx * ex + myy * ey + myz * ez)
                fz += c * (mzx * ex + mzy * ey + mzz * ez)
            if en_dissipation and not solid_j:
                aj_d = alg0_t[mat[j]] * h * delta_lg[j]
                if thermal:
                    tmj = Tm_t[mat[j]]
                    if tmj == tmj:
                        aj_d += asf0_t[mat[j]] * (1.0 - _f_lin(T[j], tmj, tmj + dTd_t[mat[j]]))
                ab = 0.5 * (ai_d + aj_d)
                if ab > 0.0:
                    urij = (uijx * ex + uijy * ey + uijz * ez) * r
                    mu = urij / (r * r + eps_diss * h * h)
                    cbar = 0.5 * (ci + c_t[mat[j]])
                    rbar = 0.5 * (rhoi + rhoj)
                    c = mi * mass[j] * ab * h * cbar / rbar * mu * dwk
                    fx += c * ex
                    fy += c * ey
                    fz += c * ez
            if en_barrier and r < r_b:
                g = r_b - r
                gdot = -(uijx * ex + uijy * ey + uijz * ez)
                c = k_b * g + d_b * g * gdot  # |g| = g here (g > 0)
                fx += c * ex
                fy += c * ey
                fz += c * ez
        acc[i, 0] = fx / mi
        acc[i, 1] = fy / mi
        acc[i, 2] = fz / mi
        a_bg[i, 0] = bx
        a_bg[i, 1] = by
        a_bg[i, 2] = bz


@njit(parallel=True, cache=True)
def solid_loads_pass(start, idx, dist, w, dw,
                     pos, vel, vtr, mass, rho, p, phase, mat, body,
                     p_ext, u_eff, eta_t,
                     dx_contact, k_c, d_c, k_b, d_b, r_b,
                     en_pressure, en_viscous, en_barrier, en_transport,
                     force, err):
    """Mirrored fluid forces plus entity-entity contact on rigid members.

    The fluid interaction terms are the exact negatives of those accumulated
    by momentum_pass, so the fluid-body momentum exchange is antisymmetric
    to round-off.
    """
    n = pos.shape[0]
    for i in prange(n):
        force[i, 0] = 0.0
        force[i, 1] = 0.0
        force[i, 2] = 0.0
        if phase[i] != SOLID_RIGID:
            continue
        mi = mass[i]
        rhoi = rho[i]
        vi = mi / rhoi
        vi2 = vi * vi
        pi = p_ext[i]
        ent_i = body[i]
        fx = 0.0
        fy = 0.0
        fz = 0.0
        for k in range(start[i], start[i + 1]):
            j = idx[k]
            r = dist[k]
            if r <= 0.0:
                err[0] = ERR_COINCIDENT
                err[1] = i
                continue
            ex = (pos[i, 0] - pos[j, 0]) / r
            ey = (pos[i, 1] - pos[j, 1]) / r
            ez = (pos[i, 2] - pos[j, 2]) / r
            if phase[j] <= GAS:
                dwk = dw[k]
                rhoj = rho[j]
                vj = mass[j] / rhoj
                vv = vi2 + vj * vj
                uijx = u_eff[i, 0] - vel[j, 0]
                uijy = u_eff[i, 1] - vel[j, 1]
                uijz = u_eff[i, 2] - vel[j, 2]
                if en_pressure:
                    pt = (rhoj * pi + rhoi * p[j]) / (rhoi + rhoj)
                    c = -vv * pt * dwk
                    fx += c * ex
                    fy += c * ey
                    fz += c * ez
                if en_transport:
                    # mirror of the fluid partner's convected extra stress
                    djx = vtr[j, 0] - vel[j, 0]
                    djy = vtr[j, 1] - vel[j, 1]
                    djz = vtr[j, 2] - vel[j, 2]
                    c = 0.5 * vv * dwk
                    fx += c * rhoj * vel[j, 0] * (djx * ex + djy * ey + djz * ez)
                    fy += c * rhoj * vel[j, 1] * (djx * ex + djy * ey + djz * ez)
                    fz += c * rhoj * vel[j, 2] * (djx * ex + djy * ey + djz * ez)
                if en_viscous:
                    etaij = eta_t[mat[j]]
                    if etaij > 0.0:
                        c = vv * etaij * dwk / r
                        fx += c * uijx
                        fy += c * uijy
                        fz += c * uijz
                if en_barrier and r < r_b:
                    g = r_b - r
                    uvx = vel[i, 0] - vel[j, 0]
                    uvy = vel[i, 1] - vel[j, 1]
                    uvz = vel[i, 2] - vel[j, 2]
                    gdot = -(uvx * ex + uvy * ey + uvz * ez)
                    c = k_b * g + d_b * g * gdot
                    fx += c * ex
                    fy += c * ey
                    fz += c * ez
            else:
                ent_j = body[j] if phase[j] == SOLID_RIGID else np.int32(-2)
                if ent_j != ent_i and r < dx_contact:
                    g = dx_contact - r
                    uvx = vel[i, 0] - vel[j, 0]
                    uvy = vel[i, 1] - vel[j, 1]
                    uvz = vel[i, 2] - vel[j, 2]
                    gdot = -(uvx * ex + uvy * ey + uvz * ez)
                    c = k_c * g + d_c * g * gdot
                    fx += c * ex
                    fy += c * ey
                    fz += c * ez
        force[i, 0] = fx
        force[i, 1] = fy
        force[i, 2] = fz


def pair_pressure_viscous_force(i, j, pos, vel, mass, rho, p, eta_i, eta_j, kern):
    """Reference evaluation of the pressure+viscous pair force on particle i.

    Slow single-pair path used by tests to cross-check the compiled pass.
    """
    rij = pos[i] - pos[j]
    r = float(np.linalg.norm(rij))
    if r == 0.0:
        raise ValueError("coincident particles")
    e = rij / r
    dwk = kern.derivative(r)
    vi = mass[i] / rho[i]
    vj = mass[j] / rho[j]
    vv = vi * vi + vj * vj
    pt = (rho[j] * p[i] + rho[i] * p[j]) / (rho[i] + rho[j])
    f = -vv * pt * dwk * e
    if eta_i + eta_j > 0:
        etaij = 2.0 * eta_i * eta_j / (eta_i + eta_j)
        f = f + vv * etaij * (vel[i] - vel[j]) / r * dwk
    return f
