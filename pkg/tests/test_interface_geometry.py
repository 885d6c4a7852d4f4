import numpy as np
import pytest

from helpers import grid_positions, make_engine, particles_from, standard_table
from meltflow.interface_geometry import normal_and_delta, tangential_projection
from meltflow.model import GAS, LIQUID, SOLID_SUBSTRATE

DX = 2.5e-6


def two_slab(nxy=20, nz_each=10, dx=DX):
    """Liquid below gas, flat interface at z = nz_each * dx."""
    table = standard_table()
    lpos = grid_positions(nxy, nxy, nz_each, dx)
    gpos = grid_positions(nxy, nxy, nz_each, dx, origin=(0, 0, nz_each * dx))
    pos = np.vstack([lpos, gpos])
    phase = np.array([LIQUID] * len(lpos) + [GAS] * len(gpos))
    mat = np.array([0] * len(lpos) + [2] * len(gpos))
    p = particles_from(pos, phase, mat, dx, table.rho0)
    return table, p


def interior_mask(p, nxy, dx, margin=4):
    return ((p.pos[:, 0] > margin * dx) & (p.pos[:, 0] < (nxy - margin) * dx)
            & (p.pos[:, 1] > margin * dx) & (p.pos[:, 1] < (nxy - margin) * dx))


def test_bulk_particle_no_interface():
    table, p = two_slab()
    eng = make_engine(p, table, DX)
    eng.evaluate_forces()
    f = eng.field
    z = p.pos[:, 2]
    bulk = z < 5 * DX
    assert np.allclose(f.c_lg[bulk], 0.0)
    assert np.allclose(f.delta_lg[bulk], 0.0)
    assert np.allclose(f.n_lg[bulk], 0.0)


def test_normals_point_outward_and_antiparallel():
    table, p = two_slab()
    eng = make_engine(p, table, DX)
    eng.evaluate_forces()
    f = eng.field
    z = p.pos[:, 2]
    inner = interior_mask(p, 20, DX)
    liq_band = (p.phase == LIQUID) & (f.delta_lg > 0.5 * f.delta_lg.max()) & inner
    gas_band = (p.phase == GAS) & (f.delta_lg > 0.5 * f.delta_lg.max()) & inner
    assert liq_band.sum() > 0 and gas_band.sum() > 0
    # liquid-side normal points up toward the gas
    assert (f.n_lg[liq_band][:, 2] > 0.99).all()
    assert (f.n_lg[gas_band][:, 2] < -0.99).all()
    # antiparallel across the flat interface
    nl = f.n_lg[liq_band].mean(axis=0)
    ng = f.n_lg[gas_band].mean(axis=0)
    assert np.linalg.norm(nl + ng) < 1e-6


def test_delta_integral_measures_area():
    table, p = two_slab()
    eng = make_engine(p, table, DX)
    eng.evaluate_forces()
    f = eng.field
    inner = interior_mask(p, 20, DX, margin=4)
    vol = p.mass / p.rho
    total = float((vol * f.delta_lg)[inner].sum())
    area = (20 - 8) * (20 - 8) * DX * DX
    assert total == pytest.approx(area, rel=0.05)


def test_delta_majority_on_denser_side():
    table, p = two_slab()
    eng = make_engine(p, table, DX)
    eng.evaluate_forces()
    f = eng.field
    vol = p.mass / p.rho
    liq = p.phase == LIQUID
    share_l = float((vol * f.delta_lg)[liq].sum())
    share_g = float((vol * f.delta_lg)[~liq].sum())
    assert share_l > share_g


def test_equal_density_weight_reduces():
    # rho_i = rho_j makes the pair weight (V_i^2+V_j^2)/(2 V_i) W_ij
    table, p = two_slab(nxy=8, nz_each=4)
    eng = make_engine(p, table, DX)
    eng.evaluate_forces()
    # direct check of the color field on a hand pair
    from meltflow.kernel import QuinticKernel
    k = QuinticKernel(h=DX)
    v = (p.mass[0] / p.rho[0])
    w = k.value(DX)
    expected_pair = (v * v + v * v) * 0.5 * w / v
    assert expected_pair == pytest.approx(v * w, rel=1e-12)


def test_normal_and_delta_thresholds():
    g = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.5], [3.0, 0.0, 4.0]])
    delta, n = normal_and_delta(g, eps=1.0)
    assert delta[0] == 0.0 and np.allclose(n[0], 0)
    assert delta[1] == 0.5 and np.allclose(n[1], 0)  # below eps
    assert delta[2] == 5.0 and np.allclose(n[2], [0.6, 0.0, 0.8])


def test_flat_interface_zero_curvature():
    table, p = two_slab()
    eng = make_engine(p, table, DX)
    eng.evaluate_forces()
    f = eng.field
    inner = interior_mask(p, 20, DX)
    band = (f.delta_lg > 0.5 * f.delta_lg.max()) & inner
    assert np.abs(f.kappa[band]).max() < 0.02 / DX


def sphere_world(R_mult=12, box=None):
    table = standard_table()
    R = R_mult * DX
    box = box or int(2 * R_mult + 14)
    pos = grid_positions(box, box, box, DX)
    c = pos.mean(axis=0)
    inside = np.linalg.norm(pos - c, axis=1) <= R
    phase = np.where(inside, LIQUID, GAS)
    mat = np.where(inside, 0, 2).astype(np.int16)
    p = particles_from(pos, phase, mat, DX, table.rho0)
    return table, p, c, R


def test_sphere_curvature_matches_2_over_R():
    table, p, c, R = sphere_world(R_mult=12)
    eng = make_engine(p, table, DX)
    eng.evaluate_forces()
    f = eng.field
    liq = p.phase == LIQUID
    band = liq & (f.delta_lg > 0.5 * f.delta_lg[liq].max())
    kappa_mean = float(f.kappa[band].mean())
    assert kappa_mean == pytest.approx(2.0 / R, rel=0.05)


def test_sphere_delta_integral_measures_surface():
    table, p, c, R = sphere_world(R_mult=10)
    eng = make_engine(p, table, DX)
    eng.evaluate_forces()
    f = eng.field
    vol = p.mass / p.rho
    total = float((vol * f.delta_lg).sum())
    assert total == pytest.approx(4 * np.pi * R * R, rel=0.10)


def test_temperature_gradient_linear_field():
    table, p = two_slab(nxy=12, nz_each=6)
    G = 1.0e6  # K/m
    p.T[:] = 300.0 + G * p.pos[:, 2]
    eng = make_engine(p, table, DX, thermal=True)
    eng.evaluate_forces()
    f = eng.field
    inner = interior_mask(p, 12, DX) & (p.pos[:, 2] > 4 * DX) & (p.pos[:, 2] < 8 * DX)
    g = f.grad_T[inner]
    assert np.allclose(g[:, 2], G, rtol=1e-2)
    assert np.abs(g[:, :2]).max() < 1e-2 * G


def test_uniform_temperature_zero_gradient():
    table, p = two_slab(nxy=8, nz_each=4)
    eng = make_engine(p, table, DX, thermal=True)
    eng.evaluate_forces()
    assert np.abs(eng.field.grad_T).max() < 1e-6


def test_tangential_projection():
    g = np.array([[1.0, 2.0, 3.0]])
    n = np.array([[0.0, 0.0, 1.0]])
    t = tangential_projection(g, n)
    assert np.allclose(t, [[1.0, 2.0, 0.0]])
    # gradient parallel to the normal projects to zero
    t2 = tangential_projection(np.array([[0.0, 0.0, 5.0]]), n)
    assert np.allclose(t2, 0.0)
