import numpy as np
import pytest

from helpers import grid_positions, make_engine, particles_from, standard_table
from meltflow.model import (GAS, LIQUID, SOLID_RIGID, SOLID_SUBSTRATE,
                            ForceToggles)
from meltflow.rigid import BodyRegistry, aggregate_fluid_loads

DX = 2.5e-6


def make_body(shape=(3, 4, 5), vel=None, omega=None, mat=1):
    table = standard_table()
    pos = grid_positions(*shape, DX)
    p = particles_from(pos, SOLID_RIGID, mat, DX, table.rho0)
    bodies = BodyRegistry()
    bid = bodies.new_body(list(range(len(pos))), p,
                          velocity=vel if vel is not None else np.zeros(3),
                          omega=omega)
    return table, p, bodies, bodies.bodies[bid]


def test_mass_com_inertia_from_members():
    table, p, bodies, b = make_body()
    assert b.mass == pytest.approx(float(p.mass.sum()), rel=1e-14)
    assert np.allclose(b.com, p.pos.mean(axis=0))
    # point-mass inertia oracle
    d = p.pos - b.com
    eye = np.eye(3)
    expect = sum(m * ((dd @ dd) * eye - np.outer(dd, dd))
                 for m, dd in zip(p.mass, d))
    assert np.allclose(b.inertia_world, expect, rtol=1e-12)


def test_aggregate_loads_zero_and_uniform():
    table, p, bodies, b = make_body()
    forces = np.zeros((p.n, 3))
    f, tq = aggregate_fluid_loads(b, forces, p.pos)
    assert np.allclose(f, 0) and np.allclose(tq, 0)
    forces[:] = [0.1, -0.2, 0.3]
    f, tq = aggregate_fluid_loads(b, forces, p.pos)
    assert np.allclose(f, np.array([0.1, -0.2, 0.3]) * p.n, rtol=1e-12)
    assert np.linalg.norm(tq) < 1e-18  # symmetric cloud about the COM


def test_aggregate_loads_single_off_center_force():
    table, p, bodies, b = make_body()
    forces = np.zeros((p.n, 3))
    forces[7] = [0.0, 0.0, 2.0]
    f, tq = aggregate_fluid_loads(b, forces, p.pos)
    lever = p.pos[7] - b.com
    assert np.allclose(tq, np.cross(lever, forces[7]), rtol=1e-12)


def test_free_body_conserves_momentum_exactly():
    table, p, bodies, b = make_body(vel=np.array([0.1, 0.0, 0.0]),
                                    omega=np.array([0.0, 200.0, 100.0]))
    L0 = b.ang_mom.copy()
    v0 = b.vel.copy()
    for _ in range(10000):
        b.kick(0.5e-9, np.zeros(3))
        b.drift(1e-9, p)
        b.kick(0.5e-9, np.zeros(3))
    assert np.array_equal(b.ang_mom, L0)  # torque-free: exact conservation
    assert np.array_equal(b.vel, v0)


def test_rigidity_of_member_distances():
    table, p, bodies, b = make_body(vel=np.array([1.0, -2.0, 0.5]),
                                    omega=np.array([3000.0, -1000.0, 500.0]))
    d0 = np.linalg.norm(p.pos[0] - p.pos[p.n - 1])
    for _ in range(2000):
        b.kick(0.5e-8, np.zeros(3))
        b.drift(1e-8, p)
        b.kick(0.5e-8, np.zeros(3))
    d1 = np.linalg.norm(p.pos[0] - p.pos[p.n - 1])
    assert abs(d1 - d0) < 1e-12 * max(1.0, d0 / DX)
    assert abs(np.linalg.norm(b.quat) - 1.0) < 1e-12


def test_constant_force_parabola():
    table, p, bodies, b = make_body()
    g = np.array([0.0, 0.0, -9.81])
    dt = 1e-6
    steps = 1000
    z0 = b.com[2]
    for _ in range(steps):
        b.kick(0.5 * dt, g)
        b.drift(dt, p)
        b.kick(0.5 * dt, g)
    t = steps * dt
    assert b.com[2] - z0 == pytest.approx(-0.5 * 9.81 * t * t, rel=1e-10)


def test_pure_torque_principal_axis():
    table, p, bodies, b = make_body(shape=(4, 4, 4))
    tau = np.array([0.0, 0.0, 1e-12])
    I_z = b.inertia_world[2, 2]
    dt = 1e-7
    for _ in range(1000):
        b.force = np.zeros(3)
        b.torque = tau
        b.kick(0.5 * dt, np.zeros(3))
        b.drift(dt, p)
        b.kick(0.5 * dt, np.zeros(3))
    t = 1000 * dt
    om = b.omega()
    assert om[2] == pytest.approx(float(tau[2]) * t / I_z, rel=1e-6)


def test_detach_recomputes_properties():
    table, p, bodies, b = make_body()
    m_before = b.mass
    bodies.detach(b.id, 0, p)
    assert b.mass == pytest.approx(m_before - p.mass[0], rel=1e-14)
    assert 0 not in b.members
    assert p.body[0] == -1


def test_body_substrate_contact_rest_overlap():
    """Sphere-like body resting on a substrate: static overlap = M g / k_c."""
    table = standard_table()
    # body: grid-clipped sphere R = 3 dx centered on a grid column
    bpos = grid_positions(7, 7, 7, DX, origin=(2 * DX, 2 * DX, DX))
    c = bpos.mean(axis=0)
    keep = np.linalg.norm(bpos - c, axis=1) <= 3.0 * DX + 1e-12
    bpos = bpos[keep]
    spos = grid_positions(11, 11, 3, DX, origin=(0, 0, -3 * DX))
    pos = np.vstack([bpos, spos])
    nb = len(bpos)
    phase = np.array([SOLID_RIGID] * nb + [SOLID_SUBSTRATE] * len(spos))
    p = particles_from(pos, phase, 1, DX, table.rho0)
    bodies = BodyRegistry()
    bid = bodies.new_body(list(range(nb)), p, velocity=np.zeros(3))
    g = 9.81
    eng = make_engine(p, table, DX, gravity=(0, 0, -g), bodies=bodies,
                      velocity_damping=0.0)
    body = bodies.bodies[bid]
    dt = 0.2 * np.sqrt(p.mass.min() / 1.0)
    for _ in range(4000):
        eng.step(dt)
    # single bottom particle engages one vertical contact pair
    expect = body.mass * g / 1.0
    bottom = np.argmin(bpos[:, 2])
    z_rest = p.pos[bottom, 2]
    overlap = DX - (z_rest - (-0.5 * DX))
    assert overlap == pytest.approx(expect, rel=0.05)
    assert np.linalg.norm(body.vel) < 1e-5


def test_buoyancy_direction():
    """A body lighter than the fluid accelerates upward in hydrostatics."""
    from meltflow.materials import MaterialTable, molten_metal, solid_metal
    light = solid_metal(rho0=743.0)
    light.name = "light_solid"
    table = MaterialTable([molten_metal(), light])
    fpos = grid_positions(14, 14, 14, DX)
    c = np.array([7 * DX, 7 * DX, 7 * DX])
    inside = np.linalg.norm(fpos - c, axis=1) <= 3 * DX
    phase = np.where(inside, SOLID_RIGID, LIQUID)
    mat = np.where(inside, 1, 0).astype(np.int16)
    p = particles_from(fpos, phase, mat, DX, table.rho0)
    bodies = BodyRegistry()
    bid = bodies.new_body(np.where(inside)[0], p, velocity=np.zeros(3))
    body = bodies.bodies[bid]
    # hydrostatic pre-pressurized liquid so buoyancy acts from step one
    g = 9.81
    eng = make_engine(p, table, DX, gravity=(0, 0, -g), bodies=bodies)
    eng.prepare()
    for _ in range(40):
        eng.step(2e-9)
    assert body.vel[2] > 0.0


def test_fluid_body_impulse_antisymmetry():
    table = standard_table()
    fpos = grid_positions(12, 12, 12, DX)
    c = np.array([6 * DX, 6 * DX, 6 * DX])
    inside = np.linalg.norm(fpos - c, axis=1) <= 2.5 * DX
    phase = np.where(inside, SOLID_RIGID, LIQUID)
    mat = np.where(inside, 1, 0).astype(np.int16)
    p = particles_from(fpos, phase, mat, DX, table.rho0)
    rng = np.random.default_rng(0)
    p.vel[phase == LIQUID] = rng.normal(0, 0.1, (int((phase == LIQUID).sum()), 3))
    p.v_transport[:] = p.vel
    bodies = BodyRegistry()
    bodies.new_body(np.where(inside)[0], p, velocity=np.zeros(3))
    tg = ForceToggles(surface_tension=False, body_force=False)
    eng = make_engine(p, table, DX, bodies=bodies, toggles=tg)
    eng.evaluate_forces()
    f_fluid = (p.acc * p.mass[:, None])[p.phase == LIQUID].sum(axis=0)
    f_body = eng.member_forces[p.phase == SOLID_RIGID].sum(axis=0)
    scale = np.abs(p.acc * p.mass[:, None]).sum()
    assert np.linalg.norm(f_fluid + f_body) < 1e-12 * scale
