import numpy as np
import pytest

from meltflow.materials import MaterialTable, atmospheric_gas, molten_metal
from meltflow.model import (GAS, LIQUID, SOLID_RIGID, ParticleArrays, PhaseTag,
                            assign_particle_masses)


def test_assign_masses_molten_metal():
    dx = 5.0 / 3.0 * 1e-6  # 1.6 recurring micrometers
    table = MaterialTable([molten_metal(), atmospheric_gas()])
    p = ParticleArrays(2)
    p.mat[:] = [0, 1]
    assign_particle_masses(p, dx, table.rho0)
    assert p.mass[0] == pytest.approx(3.439e-14, rel=1e-3)
    assert p.mass[1] == pytest.approx(3.439e-17, rel=1e-3)
    assert p.rho[0] == 7430.0
    assert p.rho[1] == 7.43


def test_assign_masses_unit_volume():
    table = MaterialTable([molten_metal()])
    p = ParticleArrays(1)
    dx = (1.0 / 7430.0) ** (1.0 / 3.0)
    assign_particle_masses(p, dx, table.rho0)
    assert p.mass[0] == pytest.approx(1.0, rel=1e-12)


def test_assign_masses_rejects_bad_spacing():
    table = MaterialTable([molten_metal()])
    p = ParticleArrays(1)
    with pytest.raises(ValueError):
        assign_particle_masses(p, 0.0, table.rho0)
    with pytest.raises(ValueError):
        assign_particle_masses(p, -1e-6, table.rho0)


def test_phase_tag_invariants():
    with pytest.raises(ValueError):
        PhaseTag(SOLID_RIGID, 0)  # rigid requires a body id
    with pytest.raises(ValueError):
        PhaseTag(LIQUID, 0, body=3)  # only rigid carries one
    t = PhaseTag(SOLID_RIGID, 1, body=7)
    assert t.body == 7


def test_volume_is_mass_over_density():
    table = MaterialTable([molten_metal()])
    p = ParticleArrays(4)
    assign_particle_masses(p, 1e-6, table.rho0)
    p.rho[:] = [7430.0, 7000.0, 8000.0, 7430.0]
    assert np.allclose(p.volumes(), p.mass / p.rho)


def test_total_mass_reduction_is_stable():
    rng = np.random.default_rng(0)
    p = ParticleArrays(1000)
    p.mass[:] = rng.random(1000)
    a = p.total_mass()
    b = p.total_mass()
    assert a == b
