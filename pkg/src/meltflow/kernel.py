"""Quintic spline smoothing kernel with support radius 3h.

Normalization constants are obtained by numerically integrating the
unnormalized spline over its support at construction time instead of
hard-coding literature values, so the unit-integral property holds by
construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad


def _b(q: float) -> float:
    """Unnormalized quintic spline, piecewise in q = r/h with joints at 1, 2, 3."""
    if q < 1.0:
        return (3.0 - q) ** 5 - 6.0 * (2.0 - q) ** 5 + 15.0 * (1.0 - q) ** 5
    if q < 2.0:
        return (3.0 - q) ** 5 - 6.0 * (2.0 - q) ** 5
    if q < 3.0:
        return (3.0 - q) ** 5
    return 0.0


def _db(q: float) -> float:
    if q < 1.0:
        return -5.0 * (3.0 - q) ** 4 + 30.0 * (2.0 - q) ** 4 - 75.0 * (1.0 - q) ** 4
    if q < 2.0:
        return -5.0 * (3.0 - q) ** 4 + 30.0 * (2.0 - q) ** 4
    if q < 3.0:
        return -5.0 * (3.0 - q) ** 4
    return 0.0


def _sigma(dim: int) -> float:
    """Normalization 1/(h^d * integral of B over the d-dim support), h = 1."""
    if dim == 1:
        integral = 2.0 * sum(quad(_b, a, b, epsrel=1e-12)[0] for a, b in ((0, 1), (1, 2), (2, 3)))
    elif dim == 2:
        integral = 2.0 * math.pi * sum(
            quad(lambda q: _b(q) * q, a, b, epsrel=1e-12)[0] for a, b in ((0, 1), (1, 2), (2, 3))
        )
    elif dim == 3:
        integral = 4.0 * math.pi * sum(
            quad(lambda q: _b(q) * q * q, a, b, epsrel=1e-12)[0] for a, b in ((0, 1), (1, 2), (2, 3))
        )
    else:
        raise ValueError(f"dimension must be 1, 2 or 3, got {dim}")
    return 1.0 / integral


@dataclass
class QuinticKernel:
    """W(r, h) and dW/dr for one smoothing length and dimension."""

    h: float
    dim: int = 3
    sigma: float = field(init=False)

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("smoothing length must be positive")
        self.sigma = _sigma(self.dim) / self.h**self.dim

    @property
    def support_radius(self) -> float:
        return 3.0 * self.h

    def value(self, r):
        """Kernel value, vectorized over r >= 0."""
        q = np.asarray(r, dtype=float) / self.h
        out = np.zeros_like(q)
        m = q < 3.0
        out[m] = (3.0 - q[m]) ** 5
        m = q < 2.0
        out[m] -= 6.0 * (2.0 - q[m]) ** 5
        m = q < 1.0
        out[m] += 15.0 * (1.0 - q[m]) ** 5
        res = self.sigma * out
        return float(res) if np.isscalar(r) else res

    def derivative(self, r):
        """dW/dr, vectorized; <= 0 everywhere, 0 at r = 0 and r >= 3h."""
        q = np.asarray(r, dtype=float) / self.h
        out = np.zeros_like(q)
        m = q < 3.0
        out[m] = -5.0 * (3.0 - q[m]) ** 4
        m = q < 2.0
        out[m] += 30.0 * (2.0 - q[m]) ** 4
        m = q < 1.0
        out[m] -= 75.0 * (1.0 - q[m]) ** 4
        res = self.sigma / self.h * out
        return float(res) if np.isscalar(r) else res
