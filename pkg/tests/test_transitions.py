import numpy as np
import pytest

from helpers import grid_positions, make_engine, particles_from, standard_table
from meltflow.kernel import QuinticKernel
from meltflow.model import GAS, LIQUID, SOLID_RIGID, SOLID_SUBSTRATE
from meltflow.neighbors import CellGrid
from meltflow.rigid import BodyRegistry
from meltflow.transitions import (apply_phase_transitions, barrier_pair_force,
                                  dissipation_pair_force, transition_f,
                                  transition_fbar)

DX = 2.5e-6


def test_transition_branches():
    assert transition_f(0.0, 0.0, 1.0) == 0.0
    assert transition_f(1.0, 0.0, 1.0) == 1.0
    assert transition_f(0.5, 0.0, 1.0) == 0.5
    assert transition_f(-3.0, 0.0, 1.0) == 0.0
    assert transition_f(9.0, 0.0, 1.0) == 1.0


def test_transition_midpoint():
    assert transition_f(1705.0, 1700.0, 1710.0) == 0.5


def test_transition_complementarity_exact():
    rng = np.random.default_rng(0)
    x = rng.uniform(1600, 1800, 1000)
    for v in x:
        assert transition_f(v, 1690.0, 1710.0) + transition_fbar(v, 1690.0, 1710.0) == 1.0


def test_transition_rejects_bad_bounds():
    with pytest.raises(ValueError):
        transition_f(0.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        transition_fbar(0.5, 2.0, 1.0)


def _world_with(grid_T):
    """Liquid layer over substrate; returns engine pieces for transitions."""
    table = standard_table()
    lpos = grid_positions(4, 4, 2, DX, origin=(0, 0, 0))
    spos = grid_positions(4, 4, 2, DX, origin=(0, 0, -2 * DX))
    pos = np.vstack([lpos, spos])
    phase = np.array([LIQUID] * len(lpos) + [SOLID_SUBSTRATE] * len(spos))
    mat = np.array([0] * len(lpos) + [1] * len(spos))
    p = particles_from(pos, phase, mat, DX, table.rho0, T=grid_T)
    k = QuinticKernel(h=DX)
    grid = CellGrid(rc=3 * DX, h=DX, sigma=k.sigma).rebuild(p.pos)
    return table, p, grid


def test_no_transitions_all_solid_below_melt():
    table = standard_table()
    pos = grid_positions(4, 4, 3, DX)
    p = particles_from(pos, SOLID_SUBSTRATE, 1, DX, table.rho0, T=500.0)
    k = QuinticKernel(h=DX)
    grid = CellGrid(rc=3 * DX, h=DX, sigma=k.sigma).rebuild(p.pos)
    ev = apply_phase_transitions(p, table, grid, BodyRegistry(), DX, 0)
    assert ev == []


def test_liquid_freezes_onto_substrate():
    table, p, grid = _world_with(500.0)  # below T_m = 1700
    bodies = BodyRegistry()
    ev = apply_phase_transitions(p, table, grid, bodies, DX, 3)
    # every liquid particle neighbors the substrate within h through the
    # commit-ordered attachment, so all become substrate
    assert len(ev) == 32
    assert (p.phase[:32] == SOLID_SUBSTRATE).all()
    assert all(e.old_phase == LIQUID and e.new_phase == SOLID_SUBSTRATE for e in ev)
    assert (p.mat[:32] == 1).all()  # molten metal solidifies to solid metal


def test_isolated_liquid_becomes_spatter_body():
    table = standard_table()
    p = particles_from(np.zeros((1, 3)), LIQUID, 0, DX, table.rho0, T=300.0)
    p.vel[0] = [1.0, 2.0, 3.0]
    k = QuinticKernel(h=DX)
    grid = CellGrid(rc=3 * DX, h=DX, sigma=k.sigma).rebuild(p.pos)
    bodies = BodyRegistry()
    ev = apply_phase_transitions(p, table, grid, bodies, DX, 0)
    assert len(ev) == 1 and ev[0].new_phase == SOLID_RIGID
    assert p.phase[0] == SOLID_RIGID
    assert len(bodies.bodies) == 1
    body = bodies.bodies[int(p.body[0])]
    assert not body.rotatable  # single particle cannot spin
    # particle velocity untouched by the transition itself
    assert np.allclose(p.vel[0], [1.0, 2.0, 3.0])


def test_substrate_melts_above_tm():
    table, p, grid = _world_with(1800.0)  # above T_m everywhere
    bodies = BodyRegistry()
    ev = apply_phase_transitions(p, table, grid, bodies, DX, 1)
    # substrate melts into molten metal (solid_metal.melts_to)
    melted = [e for e in ev if e.old_phase == SOLID_SUBSTRATE]
    assert len(melted) == 32
    assert (p.phase == LIQUID).all()
    assert (p.mat == 0).all()


def test_rigid_body_fully_melts_removes_registry():
    table = standard_table()
    pos = grid_positions(2, 2, 2, DX)
    p = particles_from(pos, SOLID_RIGID, 1, DX, table.rho0, T=1800.0)
    bodies = BodyRegistry()
    bid = bodies.new_body(list(range(8)), p)
    k = QuinticKernel(h=DX)
    grid = CellGrid(rc=3 * DX, h=DX, sigma=k.sigma).rebuild(p.pos)
    ev = apply_phase_transitions(p, table, grid, bodies, DX, 0)
    assert len(ev) == 8
    assert bodies.bodies == {}
    assert (p.phase == LIQUID).all()
    assert (p.body == -1).all()


def test_transition_preserves_mass_position_velocity():
    table, p, grid = _world_with(1800.0)
    m0, x0, v0 = p.mass.copy(), p.pos.copy(), p.vel.copy()
    apply_phase_transitions(p, table, grid, BodyRegistry(), DX, 0)
    assert np.array_equal(p.mass, m0)
    assert np.array_equal(p.pos, x0)
    assert np.array_equal(p.vel, v0)


def test_dissipation_sign_opposes_approach():
    table = standard_table()
    pos = np.array([[0.0, 0.0, 0.0], [1.5 * DX, 0.0, 0.0]])
    p = particles_from(pos, LIQUID, 0, DX, table.rho0)
    p.vel[0] = [1.0, 0.0, 0.0]
    p.vel[1] = [-1.0, 0.0, 0.0]  # approaching
    k = QuinticKernel(h=DX)
    c = table.c_sound[0]
    f = dissipation_pair_force(0, 1, p.pos, p.vel, p.mass, p.rho, 1.0, 1.0,
                               c, c, DX, 0.01, k)
    # force on 0 points along -x: opposes its approach toward 1
    assert f[0] < 0.0
    # receding: force flips sign (still opposing relative motion)
    p.vel[0], p.vel[1] = np.array([-1.0, 0, 0]), np.array([1.0, 0, 0])
    f2 = dissipation_pair_force(0, 1, p.pos, p.vel, p.mass, p.rho, 1.0, 1.0,
                                c, c, DX, 0.01, k)
    assert f2[0] > 0.0


def test_dissipation_zero_relative_velocity():
    table = standard_table()
    pos = np.array([[0.0, 0.0, 0.0], [1.5 * DX, 0.0, 0.0]])
    p = particles_from(pos, LIQUID, 0, DX, table.rho0)
    p.vel[:] = [[0.3, 0.2, 0.1], [0.3, 0.2, 0.1]]
    k = QuinticKernel(h=DX)
    f = dissipation_pair_force(0, 1, p.pos, p.vel, p.mass, p.rho, 1.0, 1.0,
                               36.0, 36.0, DX, 0.01, k)
    assert np.allclose(f, 0.0)


def test_dissipation_power_nonpositive_random():
    table = standard_table()
    rng = np.random.default_rng(9)
    k = QuinticKernel(h=DX)
    for _ in range(50):
        pos = np.array([[0.0, 0.0, 0.0], rng.uniform(-2 * DX, 2 * DX, 3)])
        if np.linalg.norm(pos[1]) < 0.1 * DX:
            continue
        p = particles_from(pos, LIQUID, 0, DX, table.rho0)
        p.vel[:] = rng.normal(0, 1, (2, 3))
        a_i, a_j = rng.uniform(0, 2, 2)
        f0 = dissipation_pair_force(0, 1, p.pos, p.vel, p.mass, p.rho, a_i, a_j,
                                    36.0, 36.0, DX, 0.01, k)
        power = f0 @ (p.vel[0] - p.vel[1])  # antisymmetric pair
        assert power <= 1e-30


def test_barrier_inactive_beyond_rb():
    rb = 0.5 * DX
    pos = np.array([[0.0, 0.0, 0.0], [rb, 0.0, 0.0]])
    vel = np.zeros((2, 3))
    assert np.allclose(barrier_pair_force(0, 1, pos, vel, 1.0, 1e-4, rb), 0.0)


def test_barrier_static_halfway():
    rb = 0.5 * DX
    pos = np.array([[0.0, 0.0, 0.0], [0.5 * rb, 0.0, 0.0]])
    vel = np.zeros((2, 3))
    f = barrier_pair_force(0, 1, pos, vel, 1.0, 1e-4, rb)
    assert np.linalg.norm(f) == pytest.approx(1.0 * rb / 2, rel=1e-12)
    assert f[0] < 0  # repulsive: pushes particle 0 away from 1


def test_barrier_contact_at_zero_distance_magnitude():
    # §-level arithmetic: r_b = 0.83 recurring um, k_b = 1 -> |F| at r=0
    rb = 5.0 / 6.0 * 1e-6
    pos = np.array([[0.0, 0.0, 0.0], [1e-12, 0.0, 0.0]])  # effectively r -> 0
    vel = np.zeros((2, 3))
    f = barrier_pair_force(0, 1, pos, vel, 1.0, 1e-4, rb)
    assert np.linalg.norm(f) == pytest.approx(8.3333e-7, rel=1e-3)


def test_barrier_antisymmetry():
    rb = 0.5 * DX
    rng = np.random.default_rng(3)
    pos = np.array([[0.0, 0.0, 0.0], rng.uniform(-0.4 * rb, 0.4 * rb, 3)])
    vel = rng.normal(0, 1, (2, 3))
    f01 = barrier_pair_force(0, 1, pos, vel, 1.0, 1e-4, rb)
    f10 = barrier_pair_force(1, 0, pos, vel, 1.0, 1e-4, rb)
    assert np.allclose(f01, -f10, rtol=0, atol=1e-18)
