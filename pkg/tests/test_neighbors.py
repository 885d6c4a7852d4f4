import numpy as np
import pytest

from meltflow.kernel import QuinticKernel
from meltflow.neighbors import (BlowupError, CellGrid, brute_force_neighbors,
                                for_each_pair)


def make_grid(h=1.0):
    k = QuinticKernel(h=h)
    return CellGrid(rc=3 * h, h=h, sigma=k.sigma)


def test_two_particles_inside_support():
    g = make_grid()
    pos = np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    g.rebuild(pos)
    assert list(g.neighbors(0)) == [1]
    assert list(g.neighbors(1)) == [0]


def test_two_particles_outside_support():
    g = make_grid()
    pos = np.array([[0.0, 0.0, 0.0], [4.0, 0.0, 0.0]])
    g.rebuild(pos)
    assert len(g.neighbors(0)) == 0
    assert len(g.neighbors(1)) == 0


def test_matches_brute_force():
    rng = np.random.default_rng(42)
    pos = rng.uniform(0, 10, size=(1000, 3))
    g = make_grid()
    g.rebuild(pos)
    ref = brute_force_neighbors(pos, 3.0)
    for i in range(1000):
        assert set(g.neighbors(i).tolist()) == ref[i]


def test_pair_visits_once():
    g = make_grid()
    pos = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    g.rebuild(pos)
    visits = []
    for_each_pair(g, lambda i, j: visits.append((i, j)))
    assert sorted(visits) == [(0, 1), (0, 2), (1, 2)]


def test_pair_count_full_cluster():
    rng = np.random.default_rng(1)
    pos = rng.uniform(0, 0.8, size=(12, 3))  # all within rc of each other
    g = make_grid()
    g.rebuild(pos)
    i, j = g.pairs()
    assert len(i) == 12 * 11 // 2


def test_pairs_match_brute_force_random():
    rng = np.random.default_rng(7)
    pos = rng.uniform(0, 6, size=(500, 3))
    g = make_grid()
    g.rebuild(pos)
    ref = brute_force_neighbors(pos, 3.0)
    got = set(zip(*map(lambda a: a.tolist(), g.pairs())))
    want = {(i, j) for i in range(500) for j in ref[i] if j > i}
    assert got == want


def test_determinism():
    rng = np.random.default_rng(5)
    pos = rng.uniform(0, 8, size=(800, 3))
    g1 = make_grid().rebuild(pos)
    g2 = make_grid().rebuild(pos.copy())
    assert np.array_equal(g1.start, g2.start)
    assert np.array_equal(g1.idx, g2.idx)
    assert np.array_equal(g1.dist, g2.dist)


def test_nonfinite_position_aborts():
    g = make_grid()
    pos = np.zeros((3, 3))
    pos[1, 2] = np.nan
    with pytest.raises(BlowupError) as ei:
        g.rebuild(pos)
    assert ei.value.particle == 1


def test_out_of_domain_flagged():
    g = make_grid()
    pos = np.array([[0.5, 0.5, 0.5], [20.0, 0.5, 0.5]])
    g.rebuild(pos, bounds=((0, 0, 0), (3, 3, 3)))
    assert not g.out_of_domain[0]
    assert g.out_of_domain[1]


def test_cached_kernel_values_match_kernel():
    rng = np.random.default_rng(11)
    pos = rng.uniform(0, 5, size=(200, 3))
    h = 1.0
    k = QuinticKernel(h=h)
    g = CellGrid(rc=3 * h, h=h, sigma=k.sigma)
    g.rebuild(pos)
    assert np.allclose(g.w, k.value(g.dist), rtol=0, atol=1e-15)
    assert np.allclose(g.dw, k.derivative(g.dist), rtol=0, atol=1e-15)
