"""Interface geometry: color fields, surface delta functions, normals,
curvature, and temperature gradients.

Three interface classifications are carried per particle:
  lg -- liquid vs gas (surface tension, recoil, evaporation)
  sf -- fluid vs solid (wetting; the solid-side weight fades a neighbor out
        as it approaches its melt temperature)
  hg -- melt+solid vs gas (laser absorption)

All fields are recomputed from scratch every step; Lagrangian motion
invalidates the geometry each step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .fluid import _f_lin
from .model import BOUNDARY_WALL, GAS, LIQUID, SOLID_RIGID, SOLID_SUBSTRATE


@dataclass
class InterfaceField:
    """Per-step derived geometry, arrays of length n (vectors n x 3)."""

    c_lg: np.ndarray
    grad_c_lg: np.ndarray
    delta_lg: np.ndarray
    n_lg_raw: np.ndarray
    c_sf: np.ndarray
    grad_c_sf: np.ndarray
    n_sf: np.ndarray
    t_sf: np.ndarray
    n_lg: np.ndarray          # final, wetting-corrected
    c_hg: np.ndarray
    grad_c_hg: np.ndarray
    delta_hg: np.ndarray
    n_hg: np.ndarray
    kappa: np.ndarray
    grad_T: np.ndarray
    grad_t_T: np.ndarray

    @classmethod
    def empty(cls, n: int):
        z = lambda: np.zeros(n)
        v = lambda: np.zeros((n, 3))
        return cls(z(), v(), z(), v(), z(), v(), v(), v(), v(),
                   z(), v(), z(), v(), z(), v(), v())


@njit(parallel=True, cache=True)
def color_fields_pass(start, idx, dist, w, dw, pos, mass, rho, T, phase, mat,
                      Tm_t, dTs_t, thermal,
                      c_lg, gc_lg, c_sf, gc_sf, c_hg, gc_hg):
    """Density-weighted color fields and gradients for the three interface
    classifications, fused into one neighbor sweep."""
    n = pos.shape[0]
    for i in prange(n):
        ph_i = phase[i]
        rhoi = rho[i]
        vi = mass[i] / rhoi
        inv_vi = 1.0 / vi
        vi2 = vi * vi
        clg = 0.0
        glgx = 0.0
        glgy = 0.0
        glgz = 0.0
        csf = 0.0
        gsfx = 0.0
        gsfy = 0.0
        gsfz = 0.0
        chg = 0.0
        ghgx = 0.0
        ghgy = 0.0
        ghgz = 0.0
        fluid_i = ph_i <= GAS
        h_side_i = ph_i == LIQUID or ph_i == SOLID_SUBSTRATE or ph_i == SOLID_RIGID
        for k in range(start[i], start[i + 1]):
            j = idx[k]
            ph_j = phase[j]
            r = dist[k]
            if r <= 0.0:
                continue
            # pair classifications
            lg = (ph_i == LIQUID and ph_j == GAS) or (ph_i == GAS and ph_j == LIQUID)
            sf = fluid_i and ph_j >= SOLID_SUBSTRATE
            hg = h_side_i and ph_j == GAS
            if not (lg or sf or hg):
                continue
            rhoj = rho[j]
            vj = mass[j] / rhoj
            base = (vi2 + vj * vj) * rhoi / (rhoi + rhoj) * inv_vi
            cw = base * w[k]
            gw = base * dw[k]
            ex = (pos[i, 0] - pos[j, 0]) / r
            ey = (pos[i, 1] - pos[j, 1]) / r
            ez = (pos[i, 2] - pos[j, 2]) / r
            if lg:
                clg += cw
                glgx += gw * ex
                glgy += gw * ey
                glgz += gw * ez
            if sf:
                chi = 1.0
                if thermal:
                    tmj = Tm_t[mat[j]]
                    if tmj == tmj:
                        chi = 1.0 - _f_lin(T[j], tmj - dTs_t[mat[j]], tmj)
                csf += chi * cw
                gsfx += chi * gw * ex
                gsfy += chi * gw * ey
                gsfz += chi * gw * ez
            if hg:
                chg += cw
                ghgx += gw * ex
                ghgy += gw * ey
                ghgz += gw * ez
        c_lg[i] = clg
        gc_lg[i, 0] = glgx
        gc_lg[i, 1] = glgy
        gc_lg[i, 2] = glgz
        c_sf[i] = csf
        gc_sf[i, 0] = gsfx
        gc_sf[i, 1] = gsfy
        gc_sf[i, 2] = gsfz
        c_hg[i] = chg
        gc_hg[i, 0] = ghgx
        gc_hg[i, 1] = ghgy
        gc_hg[i, 2] = ghgz


def normal_and_delta(grad_c: np.ndarray, eps: float):
    """delta = |grad c|; unit normal where |grad c| > eps, zero otherwise."""
    delta = np.linalg.norm(grad_c, axis=1)
    n = np.zeros_like(grad_c)
    m = delta > eps
    n[m] = grad_c[m] / delta[m, None]
    return delta, n


@njit(parallel=True, cache=True)
def curvature_tempgrad_pass(start, idx, dist, w, dw, w0, pos, mass, rho, T,
                            phase, mat, n_lg, Tm_t, dTs_t, thermal, do_tempgrad,
                            den_floor, kappa, grad_T):
    """Regularized interface curvature from neighbor normals, and the raw
    temperature gradient over particles of all phases."""
    n = pos.shape[0]
    for i in prange(n):
        kappa[i] = 0.0
        grad_T[i, 0] = 0.0
        grad_T[i, 1] = 0.0
        grad_T[i, 2] = 0.0
        fluid_i = phase[i] <= GAS
        nix = n_lg[i, 0]
        niy = n_lg[i, 1]
        niz = n_lg[i, 2]
        valid_i = fluid_i and (nix != 0.0 or niy != 0.0 or niz != 0.0)
        num = 0.0
        den = 0.0
        if valid_i:
            # self term of the normalization (numerator self term vanishes)
            fw_i = 1.0
            if thermal and phase[i] == LIQUID:
                tmi = Tm_t[mat[i]]
                if tmi == tmi:
                    fw_i = _f_lin(T[i], tmi, tmi + dTs_t[mat[i]])
            den = fw_i * (mass[i] / rho[i]) * w0
        gx = 0.0
        gy = 0.0
        gz = 0.0
        for k in range(start[i], start[i + 1]):
            j = idx[k]
            r = dist[k]
            if r <= 0.0:
                continue
            ex = (pos[i, 0] - pos[j, 0]) / r
            ey = (pos[i, 1] - pos[j, 1]) / r
            ez = (pos[i, 2] - pos[j, 2]) / r
            vj = mass[j] / rho[j]
            if do_tempgrad:
                c = vj * (T[j] - T[i]) * dw[k]
                gx += c * ex
                gy += c * ey
                gz += c * ez
            if valid_i and phase[j] <= GAS:
                njx = n_lg[j, 0]
                njy = n_lg[j, 1]
                njz = n_lg[j, 2]
                if njx != 0.0 or njy != 0.0 or njz != 0.0:
                    if phase[j] != phase[i]:
                        # orient the neighbor normal to this particle's side
                        njx = -njx
                        njy = -njy
                        njz = -njz
                    fw = 1.0
                    if thermal and phase[j] == LIQUID:
                        tmj = Tm_t[mat[j]]
                        if tmj == tmj:
                            fw = _f_lin(T[j], tmj, tmj + dTs_t[mat[j]])
                    num += fw * vj * ((nix - njx) * ex + (niy - njy) * ey + (niz - njz) * ez) * dw[k]
                    den += fw * vj * w[k]
        if valid_i and den > den_floor:
            kappa[i] = -num / den
        grad_T[i, 0] = gx
        grad_T[i, 1] = gy
        grad_T[i, 2] = gz


def tangential_projection(grad_T: np.ndarray, n: np.ndarray) -> np.ndarray:
    """(I - n n^T) grad_T, rows with zero normal pass through unchanged."""
    dot = np.einsum("ij,ij->i", grad_T, n)
    return grad_T - dot[:, None] * n
