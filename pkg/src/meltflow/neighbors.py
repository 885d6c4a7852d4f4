"""Uniform-cell spatial index with CSR adjacency, rebuilt every step.

Cell size equals the kernel support radius (27-cell stencil).  Adjacency is
stored per particle in a fixed, reproducible order so that per-particle
gather sums are bitwise deterministic regardless of thread count.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from . import model


class BlowupError(RuntimeError):
    """Raised when particle state becomes non-finite (simulation blow-up)."""

    def __init__(self, particle: int, where: str):
        super().__init__(f"non-finite particle state (particle {particle}, {where})")
        self.particle = particle
        self.where = where


@njit(cache=True)
def _cell_ids(pos, origin, inv_cell, dims):
    n = pos.shape[0]
    ids = np.empty(n, np.int64)
    flags = np.zeros(n, np.uint8)
    for i in range(n):
        cx = int((pos[i, 0] - origin[0]) * inv_cell)
        cy = int((pos[i, 1] - origin[1]) * inv_cell)
        cz = int((pos[i, 2] - origin[2]) * inv_cell)
        if cx < 0 or cy < 0 or cz < 0 or cx >= dims[0] or cy >= dims[1] or cz >= dims[2]:
            flags[i] = 1
            cx = min(max(cx, 0), dims[0] - 1)
            cy = min(max(cy, 0), dims[1] - 1)
            cz = min(max(cz, 0), dims[2] - 1)
        ids[i] = (cx * dims[1] + cy) * dims[2] + cz
    return ids, flags


@njit(cache=True)
def _sort_by_cell(ids, ncells):
    n = ids.shape[0]
    counts = np.zeros(ncells + 1, np.int64)
    for i in range(n):
        counts[ids[i] + 1] += 1
    for c in range(ncells):
        counts[c + 1] += counts[c]
    order = np.empty(n, np.int64)
    fill = counts.copy()
    for i in range(n):  # stable: ascending particle index within each cell
        c = ids[i]
        order[fill[c]] = i
        fill[c] += 1
    return counts, order


@njit(parallel=True, cache=True)
def _scan_neighbors(pos_sorted, orig, skip_pair, ids, cell_start, dims, rc2,
                    cap, tmp_idx, tmp_dist, counts):
    """One fused candidate scan over cell-sorted copies.

    Writes up to `cap` neighbors per particle; counts carry the true number so
    the caller can detect overflow and retry with a larger capacity.
    """
    n = pos_sorted.shape[0]
    nyz = dims[1] * dims[2]
    for s_i in prange(n):
        i = orig[s_i]
        xi = pos_sorted[s_i, 0]
        yi = pos_sorted[s_i, 1]
        zi = pos_sorted[s_i, 2]
        skip_i = skip_pair[s_i]
        ci = ids[i]
        cz = ci % dims[2]
        cy = (ci // dims[2]) % dims[1]
        cx = ci // nyz
        cnt = 0
        base = i * cap
        for ox in range(-1, 2):
            x = cx + ox
            if x < 0 or x >= dims[0]:
                continue
            for oy in range(-1, 2):
                y = cy + oy
                if y < 0 or y >= dims[1]:
                    continue
                for oz in range(-1, 2):
                    z = cz + oz
                    if z < 0 or z >= dims[2]:
                        continue
                    c = (x * dims[1] + y) * dims[2] + z
                    for s in range(cell_start[c], cell_start[c + 1]):
                        if s == s_i:
                            continue
                        if skip_i and skip_pair[s]:
                            continue
                        dx = xi - pos_sorted[s, 0]
                        dy = yi - pos_sorted[s, 1]
                        dz = zi - pos_sorted[s, 2]
                        r2 = dx * dx + dy * dy + dz * dz
                        if r2 < rc2:
                            if cnt < cap:
                                tmp_idx[base + cnt] = orig[s]
                                tmp_dist[base + cnt] = np.sqrt(r2)
                            cnt += 1
        counts[i] = cnt


@njit(parallel=True, cache=True)
def _compact(cap, counts, start, tmp_idx, tmp_dist, idx, dist):
    n = counts.shape[0]
    for i in prange(n):
        w = start[i]
        base = i * cap
        for k in range(counts[i]):
            idx[w + k] = tmp_idx[base + k]
            dist[w + k] = tmp_dist[base + k]


@njit(parallel=True, cache=True)
def _kernel_cache(dist, h, sigma, w, dw):
    """Quintic spline value and radial derivative for every cached pair."""
    m = dist.shape[0]
    inv_h = 1.0 / h
    for k in prange(m):
        q = dist[k] * inv_h
        b = 0.0
        db = 0.0
        if q < 3.0:
            t = 3.0 - q
            t2 = t * t
            b = t2 * t2 * t
            db = -5.0 * t2 * t2
            if q < 2.0:
                t = 2.0 - q
                t2 = t * t
                b -= 6.0 * t2 * t2 * t
                db += 30.0 * t2 * t2
                if q < 1.0:
                    t = 1.0 - q
                    t2 = t * t
                    b += 15.0 * t2 * t2 * t
                    db -= 75.0 * t2 * t2
        w[k] = sigma * b
        dw[k] = sigma * inv_h * db


class CellGrid:
    """Spatial index over current positions plus cached pair geometry."""

    def __init__(self, rc: float, h: float, sigma: float):
        self.rc = rc
        self.h = h
        self.sigma = sigma
        self.start = None   # (n+1,) CSR row offsets
        self.idx = None     # neighbor indices
        self.dist = None    # pair distances
        self.w = None       # kernel values per pair
        self.dw = None      # kernel radial derivatives per pair
        self.out_of_domain = None
        self._cap = 176     # per-row candidate capacity, grows on demand
        self._tmp_idx = None
        self._tmp_dist = None
        self._pair_cap = 0
        self._pair_bufs = None

    def _tmp_buffers(self, n):
        need = n * self._cap
        if self._tmp_idx is None or self._tmp_idx.shape[0] < need:
            self._tmp_idx = np.empty(need, np.int32)
            self._tmp_dist = np.empty(need)
        return self._tmp_idx, self._tmp_dist

    def _pair_buffers(self, total):
        if total > self._pair_cap:
            self._pair_cap = int(total * 1.3) + 1024
            self._pair_bufs = (np.empty(self._pair_cap, np.int32),
                               np.empty(self._pair_cap),
                               np.empty(self._pair_cap),
                               np.empty(self._pair_cap))
        b = self._pair_bufs
        return b[0][:total], b[1][:total], b[2][:total], b[3][:total]

    def rebuild(self, pos: np.ndarray, skip_mutual=None, bounds=None):
        """Rebuild the index.  Pairs where both particles have skip_mutual
        set are omitted (used for wall-wall pairs no kernel consumes)."""
        bad = ~np.isfinite(pos).all(axis=1)
        if bad.any():
            raise BlowupError(int(np.argmax(bad)), "neighbor rebuild")
        if bounds is None:
            lo = pos.min(axis=0) - self.rc
            hi = pos.max(axis=0) + self.rc
        else:
            lo, hi = np.asarray(bounds[0], float), np.asarray(bounds[1], float)
        dims = np.maximum(((hi - lo) / self.rc).astype(np.int64), 1)
        ncells = int(dims[0] * dims[1] * dims[2])
        ids, flags = _cell_ids(pos, lo, 1.0 / self.rc, dims)
        cell_start, order = _sort_by_cell(ids, ncells)
        n = pos.shape[0]
        pos_sorted = np.ascontiguousarray(pos[order])
        if skip_mutual is None:
            skip_sorted = np.zeros(n, np.bool_)
        else:
            skip_sorted = np.ascontiguousarray(skip_mutual[order])
        counts = np.empty(n, np.int64)
        while True:
            tmp_idx, tmp_dist = self._tmp_buffers(n)
            _scan_neighbors(pos_sorted, order, skip_sorted, ids, cell_start,
                            dims, self.rc**2, self._cap, tmp_idx, tmp_dist,
                            counts)
            peak = int(counts.max()) if n else 0
            if peak <= self._cap:
                break
            self._cap = peak + 32
            self._tmp_idx = None
        start = np.zeros(n + 1, np.int64)
        np.cumsum(counts, out=start[1:])
        total = int(start[-1])
        idx, dist, w, dw = self._pair_buffers(total)
        _compact(self._cap, counts, start, tmp_idx, tmp_dist, idx, dist)
        _kernel_cache(dist, self.h, self.sigma, w, dw)
        self.start, self.idx, self.dist, self.w, self.dw = start, idx, dist, w, dw
        self.out_of_domain = flags.astype(bool)
        return self

    def neighbors(self, i: int) -> np.ndarray:
        return self.idx[self.start[i]:self.start[i + 1]]

    def pairs(self):
        """Each unordered pair within r_c exactly once, as (i, j) arrays."""
        n = len(self.start) - 1
        row = np.repeat(np.arange(n), np.diff(self.start))
        keep = self.idx > row
        return row[keep], self.idx[keep]


def for_each_pair(grid: CellGrid, visitor):
    """Visit each unordered pair once, in deterministic order."""
    i_arr, j_arr = grid.pairs()
    for i, j in zip(i_arr.tolist(), j_arr.tolist()):
        visitor(i, j)


def brute_force_neighbors(pos: np.ndarray, rc: float):
    """O(n^2) reference neighbor sets for validation."""
    n = pos.shape[0]
    d2 = ((pos[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2)
    out = []
    for i in range(n):
        js = np.where((d2[i] < rc * rc) & (np.arange(n) != i))[0]
        out.append(set(js.tolist()))
    return out
