"""Particle container, phase taxonomy, and global simulation configuration.

Particles live in structure-of-arrays storage addressed by a stable integer
index; phase changes mutate the tag in place so neighbor lists and rigid-body
membership stay valid across transitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# phase codes (int8 column `phase`)
LIQUID = 0
GAS = 1
SOLID_SUBSTRATE = 2
SOLID_RIGID = 3
BOUNDARY_WALL = 4

PHASE_NAMES = {
    LIQUID: "liquid",
    GAS: "gas",
    SOLID_SUBSTRATE: "substrate",
    SOLID_RIGID: "rigid",
    BOUNDARY_WALL: "wall",
}

NO_BODY = -1


@dataclass(frozen=True)
class PhaseTag:
    """Per-particle phase tag: kind + material id (+ rigid body id)."""

    kind: int
    material: int
    body: int = NO_BODY

    def __post_init__(self):
        if self.kind == SOLID_RIGID and self.body < 0:
            raise ValueError("SolidRigid tag requires a body id")
        if self.kind != SOLID_RIGID and self.body != NO_BODY:
            raise ValueError("only SolidRigid tags carry a body id")


class ParticleArrays:
    """Structure-of-arrays particle state.

    mass is constant after initialization (no particle creation/destruction);
    the volume used by all pair formulas is mass/density.
    """

    def __init__(self, n: int):
        self.n = n
        self.pos = np.zeros((n, 3))
        self.vel = np.zeros((n, 3))
        self.v_transport = np.zeros((n, 3))
        self.mass = np.zeros(n)
        self.rho = np.zeros(n)
        self.p = np.zeros(n)
        self.T = np.zeros(n)
        self.phase = np.zeros(n, np.int8)
        self.mat = np.zeros(n, np.int16)
        self.body = np.full(n, NO_BODY, np.int32)
        # scratch, rewritten every force pass
        self.acc = np.zeros((n, 3))
        self.dTdt = np.zeros(n)

    def volumes(self) -> np.ndarray:
        return self.mass / self.rho

    def tag(self, i: int) -> PhaseTag:
        return PhaseTag(int(self.phase[i]), int(self.mat[i]), int(self.body[i]))

    def is_fluid(self) -> np.ndarray:
        return self.phase <= GAS

    def is_solid(self) -> np.ndarray:
        return self.phase >= SOLID_SUBSTRATE

    def total_mass(self) -> float:
        # summed in fixed index order for bit-reproducibility
        return float(np.add.reduce(self.mass))


def assign_particle_masses(particles: ParticleArrays, spacing: float, rho0_by_mat: np.ndarray):
    """Set particle masses from reference density and grid volume.

    mass = rho0(material) * spacing^3; density is initialized to rho0.
    """
    if spacing <= 0:
        raise ValueError("particle spacing must be positive")
    rho0 = np.asarray(rho0_by_mat, dtype=float)[particles.mat]
    particles.mass[:] = rho0 * spacing**3
    particles.rho[:] = rho0


@dataclass
class ForceToggles:
    """Per-family switches of the momentum assembly, mainly for testing and
    for the recoil on/off process studies."""

    pressure: bool = True
    viscous: bool = True
    surface_tension: bool = True
    marangoni: bool = True
    recoil: bool = True
    dissipation: bool = True
    barrier: bool = True
    body_force: bool = True


@dataclass
class NumericsConfig:
    dx: float                        # grid spacing = smoothing length [m]
    dt: float | None = None          # None -> 0.9x the binding stability limit
    end_time: float = 0.0
    cfl_safety: float = 0.9
    dt_policy: str = "abort"         # "abort" | "warn" on limit violation mid-run
    eps_normal_rel: float = 1e-6     # normal acceptance: eps = rel / h
    eps_curvature: float = 1e-3      # curvature denominator floor (dimensionless)
    eps_dissipation: float = 0.01    # denominator guard in the dissipation force
    k_b: float = 1.0                 # barrier stiffness [kg/s^2]
    d_b: float = 1.0e-4              # barrier damping [kg/s]
    r_b: float | None = None         # barrier distance, default dx/2, must be < h
    k_c: float = 1.0                 # contact stiffness [kg/s^2]
    d_c: float = 1.0e-4              # contact damping [kg/s]
    wetting_c1: float = 0.0          # wetting blend lower threshold
    wetting_c2: float = 0.2          # wetting blend upper threshold
    velocity_damping: float = 0.0    # [1/s], quasi-static relaxation aid
    damping_time: float = 0.0        # damping active for t < damping_time (0: always if set)

    def barrier_distance(self) -> float:
        return self.r_b if self.r_b is not None else 0.5 * self.dx


@dataclass
class SimulationConfig:
    numerics: NumericsConfig
    gravity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    domain_min: np.ndarray = field(default_factory=lambda: np.zeros(3))
    domain_max: np.ndarray = field(default_factory=lambda: np.ones(3))
    thermal: bool = False
    wall_temperature: float = 500.0
    toggles: ForceToggles = field(default_factory=ForceToggles)
