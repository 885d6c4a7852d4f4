"""Linear transition functions, solid-liquid tag switching, and reference
implementations of the stabilization pair forces (the production versions run
fused inside the momentum pass).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import GAS, LIQUID, NO_BODY, PHASE_NAMES, SOLID_RIGID, SOLID_SUBSTRATE


def transition_f(x, x1, x2):
    """Linear ramp: 0 below x1, 1 above x2, linear in between."""
    if x1 >= x2:
        raise ValueError(f"transition bounds must satisfy x1 < x2, got {x1} >= {x2}")
    if x < x1:
        return 0.0
    if x > x2:
        return 1.0
    return (x - x1) / (x2 - x1)


def transition_fbar(x, x1, x2):
    """Complementary ramp, exactly 1 - f."""
    return 1.0 - transition_f(x, x1, x2)


@dataclass
class TransitionEvent:
    step: int
    particle: int
    old_phase: int
    new_phase: int

    def csv_row(self) -> str:
        return f"{self.step},{self.particle},{PHASE_NAMES[self.old_phase]},{PHASE_NAMES[self.new_phase]}"


def apply_phase_transitions(particles, table, grid, bodies, h, step):
    """Melt solids above T_m, solidify liquids below it.

    Melting detaches particles from rigid bodies permanently; a freezing
    liquid particle welds to the substrate when anything substrate-like lies
    within one smoothing length (including particles frozen earlier in the
    same commit, processed in ascending index order), otherwise it becomes a
    free single-particle rigid body (resolidified spatter).

    Only the tag and routing change; mass, position, and velocity of the
    transitioning particle are untouched.
    """
    events: list[TransitionEvent] = []
    phase = particles.phase
    T = particles.T
    mat = particles.mat

    # melting
    solid = (phase == SOLID_SUBSTRATE) | (phase == SOLID_RIGID)
    melts_to = table.melts_to[mat]
    tm = table.T_m[mat]
    can_melt = solid & (melts_to >= 0) & ~np.isnan(tm) & (T > tm)
    for i in np.where(can_melt)[0]:
        old = int(phase[i])
        if old == SOLID_RIGID:
            bodies.detach(int(particles.body[i]), int(i), particles)
        phase[i] = LIQUID
        particles.mat[i] = melts_to[i]
        particles.body[i] = NO_BODY
        particles.rho[i] = table.rho0[melts_to[i]]
        events.append(TransitionEvent(step, int(i), old, LIQUID))

    # solidification, ascending particle index
    liquid = phase == LIQUID
    solidifies_to = table.solidifies_to[mat]
    tm = table.T_m[mat]
    can_freeze = liquid & (solidifies_to >= 0) & ~np.isnan(tm) & (T < tm)
    r_attach = h * (1.0 + 1e-6)  # tolerance resolves exact-lattice distances
    for i in np.where(can_freeze)[0]:
        attached = False
        s0, s1 = grid.start[i], grid.start[i + 1]
        for k in range(s0, s1):
            j = grid.idx[k]
            if grid.dist[k] < r_attach and phase[j] == SOLID_SUBSTRATE:
                attached = True
                break
        new_mat = int(solidifies_to[i])
        if attached:
            phase[i] = SOLID_SUBSTRATE
            particles.mat[i] = new_mat
            particles.rho[i] = table.rho0[new_mat]
            particles.body[i] = NO_BODY
            events.append(TransitionEvent(step, int(i), LIQUID, SOLID_SUBSTRATE))
        else:
            phase[i] = SOLID_RIGID
            particles.mat[i] = new_mat
            particles.rho[i] = table.rho0[new_mat]
            bid = bodies.new_body([int(i)], particles)
            particles.body[i] = bid
            events.append(TransitionEvent(step, int(i), LIQUID, SOLID_RIGID))
    return events


def dissipation_pair_force(i, j, pos, vel, mass, rho, alpha_i, alpha_j,
                           c_i, c_j, h, eps, kern):
    """Reference interface-viscosity pair force on particle i (dissipative:
    its power against the relative motion is never positive)."""
    rij = pos[i] - pos[j]
    r = float(np.linalg.norm(rij))
    e = rij / r
    uij = vel[i] - vel[j]
    mu = float(uij @ rij) / (r * r + eps * h * h)
    abar = 0.5 * (alpha_i + alpha_j)
    cbar = 0.5 * (c_i + c_j)
    rbar = 0.5 * (rho[i] + rho[j])
    return mass[i] * mass[j] * abar * h * cbar / rbar * mu * kern.derivative(r) * e


def barrier_pair_force(i, j, pos, vel, k_b, d_b, r_b):
    """Reference elastic-viscous barrier force on particle i."""
    rij = pos[i] - pos[j]
    r = float(np.linalg.norm(rij))
    if r >= r_b:
        return np.zeros(3)
    e = rij / r
    g = r_b - r
    gdot = -float(e @ (vel[i] - vel[j]))
    return (k_b * g + d_b * abs(g) * gdot) * e
