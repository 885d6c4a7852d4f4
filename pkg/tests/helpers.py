"""Shared construction helpers for hand-built particle configurations."""

import numpy as np

from meltflow.materials import MaterialTable, atmospheric_gas, molten_metal, solid_metal
from meltflow.model import (GAS, LIQUID, SOLID_SUBSTRATE, ForceToggles,
                            NumericsConfig, ParticleArrays, SimulationConfig,
                            assign_particle_masses)
from meltflow.stepper import Engine


def grid_positions(nx, ny, nz, dx, origin=(0.0, 0.0, 0.0)):
    xs = (np.arange(nx) + 0.5) * dx + origin[0]
    ys = (np.arange(ny) + 0.5) * dx + origin[1]
    zs = (np.arange(nz) + 0.5) * dx + origin[2]
    g = np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1)
    return g.reshape(-1, 3)


def particles_from(pos, phase, mat, dx, rho0_by_mat, T=500.0):
    p = ParticleArrays(len(pos))
    p.pos[:] = pos
    p.phase[:] = phase
    p.mat[:] = mat
    p.T[:] = T
    assign_particle_masses(p, dx, rho0_by_mat)
    return p


def standard_table(extra=()):
    mats = [molten_metal(), solid_metal(), atmospheric_gas(), *extra]
    return MaterialTable(mats)


def make_engine(particles, table, dx, thermal=False, gravity=(0, 0, 0),
                bodies=None, laser=None, toggles=None, **numerics_kw):
    num = NumericsConfig(dx=dx, **numerics_kw)
    cfg = SimulationConfig(numerics=num, gravity=np.array(gravity, float),
                           domain_min=particles.pos.min(axis=0),
                           domain_max=particles.pos.max(axis=0),
                           thermal=thermal,
                           toggles=toggles or ForceToggles())
    particles.v_transport[:] = particles.vel
    return Engine(particles, table, cfg, bodies=bodies, laser=laser)


def liquid_block(nx, ny, nz, dx, table, mat_id=0, T=2000.0):
    pos = grid_positions(nx, ny, nz, dx)
    return particles_from(pos, LIQUID, mat_id, dx, table.rho0, T=T)
