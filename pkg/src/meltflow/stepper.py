"""Explicit step loop: pass ordering, stability-limit bookkeeping, and
per-step diagnostics.

One step = half-kick, drift with the transport velocity, full force/rate
evaluation at the new configuration, second half-kick, explicit temperature
update, then the phase-transition commit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fluid, interface_fluxes, surface_tension, thermal, transitions
from .interface_geometry import (InterfaceField, color_fields_pass,
                                 curvature_tempgrad_pass, normal_and_delta,
                                 tangential_projection)
from .kernel import QuinticKernel
from .model import (BOUNDARY_WALL, GAS, LIQUID, SOLID_RIGID, SOLID_SUBSTRATE,
                    ParticleArrays, SimulationConfig)
from .neighbors import CellGrid
from .rigid import BodyRegistry

DT_LIMIT_NAMES = ("cfl", "viscous", "body_force", "surface_tension", "contact",
                  "conductivity")


class SimulationAbort(RuntimeError):
    def __init__(self, message: str, particle: int | None = None, where: str = ""):
        super().__init__(message)
        self.particle = particle
        self.where = where


@dataclass
class StepReport:
    step: int
    time: float
    max_speed: float
    min_T: float
    max_T: float
    dt_limits: dict
    transition_count: int
    total_mass: float
    momentum: np.ndarray
    thermal_energy: float

    CSV_HEADER = ("step,time,max_speed,min_T,max_T,"
                  + ",".join("dt_" + n for n in DT_LIMIT_NAMES)
                  + ",transitions,total_mass,px,py,pz,thermal_energy")

    def csv_row(self) -> str:
        lim = ",".join(f"{self.dt_limits[n]:.6e}" for n in DT_LIMIT_NAMES)
        return (f"{self.step},{self.time:.9e},{self.max_speed:.6e},"
                f"{self.min_T:.4f},{self.max_T:.4f},{lim},{self.transition_count},"
                f"{self.total_mass:.17e},{self.momentum[0]:.9e},{self.momentum[1]:.9e},"
                f"{self.momentum[2]:.9e},{self.thermal_energy:.9e}")


def compute_dt_limits(h, particles: ParticleArrays, table, numerics, thermal_run,
                      gravity) -> dict:
    """The six stability limits, evaluated with conservative material choices."""
    is_fluid = particles.is_fluid()
    fluid_mats = set(np.unique(particles.mat[is_fluid]).tolist())
    for m in np.unique(particles.mat[~is_fluid]).tolist():
        tgt = table.melts_to[m]
        if tgt >= 0:
            fluid_mats.add(int(tgt))
    fluid_mats = sorted(fluid_mats)

    lim = {}
    u_max = float(np.linalg.norm(particles.vel[is_fluid], axis=1).max()) if is_fluid.any() else 0.0
    c_max = max((table.c_sound[m] for m in fluid_mats), default=0.0)
    lim["cfl"] = 0.25 * h / (c_max + u_max) if c_max + u_max > 0 else math.inf

    nu_max = max((table.eta[m] / table.rho0[m] for m in fluid_mats), default=0.0)
    lim["viscous"] = 0.125 * h * h / nu_max if nu_max > 0 else math.inf

    b = float(np.linalg.norm(gravity))
    lim["body_force"] = 0.25 * math.sqrt(h / b) if b > 0 else math.inf

    st = math.inf
    for m in fluid_mats:
        a = table.alpha0[m]
        if a > 0:
            st = min(st, 0.25 * math.sqrt(table.rho0[m] * h**3 / (2.0 * math.pi * a)))
    lim["surface_tension"] = st

    m_min = float(particles.mass.min()) if particles.n else math.inf
    k_stiff = max(numerics.k_b, numerics.k_c)
    lim["contact"] = 0.22 * math.sqrt(m_min / k_stiff) if k_stiff > 0 else math.inf

    cond = math.inf
    if thermal_run:
        for m in sorted(set(np.unique(particles.mat).tolist())):
            k = table.k[m]
            cp = table.c_p[m]
            if k and k > 0 and cp and cp > 0:
                cond = min(cond, 0.1 * table.rho0[m] * cp * h * h / k)
    lim["conductivity"] = cond
    return lim


class Engine:
    """One simulation instance; externally single-threaded."""

    def __init__(self, particles: ParticleArrays, table, config: SimulationConfig,
                 bodies: BodyRegistry | None = None, laser=None,
                 liquid_ref: int | None = None):
        self.particles = particles
        self.table = table
        self.config = config
        self.bodies = bodies if bodies is not None else BodyRegistry()
        self.laser = laser
        self.liquid_ref = liquid_ref if liquid_ref is not None else self._find_liquid_ref()
        h = config.numerics.dx
        self.h = h
        self.kernel = QuinticKernel(h=h, dim=3)
        self.grid = CellGrid(rc=3.0 * h, h=h, sigma=self.kernel.sigma)
        n = particles.n
        self.field = InterfaceField.empty(n)
        self.p_ext = np.zeros(n)
        self.u_eff = np.zeros((n, 3))
        self.a_bg = np.zeros((n, 3))
        self.member_forces = np.zeros((n, 3))
        self.src_laser = np.zeros(n)
        self.src_evap = np.zeros(n)
        self.melt_frac = np.ones(n)
        self._err = np.zeros(2, np.int64)
        self.t = 0.0
        self.step_count = 0
        self.transition_events: list = []
        self.ever_liquid = particles.phase == LIQUID
        # wall-wall pairs feed no kernel (wall temperatures are clamped)
        self._wall_mask = particles.phase == BOUNDARY_WALL
        self._prepared = False

    def _find_liquid_ref(self) -> int:
        liq = np.unique(self.particles.mat[self.particles.phase == LIQUID])
        if len(liq):
            return int(liq[0])
        tgt = self.table.melts_to[np.unique(self.particles.mat)]
        tgt = tgt[tgt >= 0]
        return int(tgt[0]) if len(tgt) else 0

    # -- force / rate evaluation ------------------------------------------

    def evaluate_forces(self):
        p = self.particles
        cfg = self.config
        tgl = cfg.toggles
        thermal_run = cfg.thermal
        self.grid.rebuild(p.pos, skip_mutual=self._wall_mask)
        g = self.grid
        self._err[:] = 0

        fluid.density_pass(g.start, g.idx, g.w, self.kernel.value(0.0),
                           p.mass, p.phase, p.rho)
        fluid.eos_pass(p.rho, p.mat, p.phase, self.table.c_sound, self.table.rho0, p.p)

        a_solid = self.bodies.solid_accels(p.n)
        fluid.wall_extrapolation_pass(g.start, g.idx, g.w, p.pos, p.vel, p.rho,
                                      p.p, p.phase, a_solid, cfg.gravity,
                                      self.p_ext, self.u_eff)

        f = self.field
        color_fields_pass(g.start, g.idx, g.dist, g.w, g.dw, p.pos, p.mass, p.rho,
                          p.T, p.phase, p.mat, self.table.T_m, self.table.dT_s,
                          thermal_run, f.c_lg, f.grad_c_lg, f.c_sf, f.grad_c_sf,
                          f.c_hg, f.grad_c_hg)
        eps_n = cfg.numerics.eps_normal_rel / self.h
        f.delta_lg, f.n_lg_raw = normal_and_delta(f.grad_c_lg, eps_n)
        _, f.n_sf = normal_and_delta(f.grad_c_sf, eps_n)
        f.delta_hg, f.n_hg = normal_and_delta(f.grad_c_hg, eps_n)
        f.n_lg = surface_tension.wetting_corrected_normals(
            f, p.phase, p.mat, self.table, self.liquid_ref,
            cfg.numerics.wetting_c1, cfg.numerics.wetting_c2, 1e-6)

        curvature_tempgrad_pass(g.start, g.idx, g.dist, g.w, g.dw,
                                self.kernel.value(0.0), p.pos, p.mass,
                                p.rho, p.T, p.phase, p.mat, f.n_lg,
                                self.table.T_m, self.table.dT_s, thermal_run,
                                thermal_run, cfg.numerics.eps_curvature,
                                f.kappa, f.grad_T)
        f.grad_t_T = tangential_projection(f.grad_T, f.n_lg)

        nm = cfg.numerics
        fluid.momentum_pass(g.start, g.idx, g.dist, g.w, g.dw,
                            p.pos, p.vel, p.v_transport, p.mass, p.rho, p.p, p.T,
                            p.phase, p.mat, p.body, self.p_ext, self.u_eff,
                            f.delta_lg,
                            self.table.rho0, self.table.eta, self.table.c_sound,
                            self.table.p_b, self.table.alpha_lg0, self.table.alpha_sf0,
                            self.table.T_m, self.table.dT_d,
                            thermal_run, self.h, nm.eps_dissipation,
                            nm.k_b, nm.d_b, nm.barrier_distance(),
                            tgl.pressure, tgl.viscous, tgl.dissipation,
                            tgl.barrier, True,
                            p.acc, self.a_bg, self._err)
        if self._err[0] != 0:
            raise SimulationAbort(
                f"coincident particles (particle {int(self._err[1])}, momentum pass)",
                int(self._err[1]), "momentum")

        vol = p.mass / p.rho
        self.melt_frac = surface_tension.melt_fraction(
            p.T, p.mat, p.phase, self.table, self.liquid_ref, thermal_run)
        if tgl.surface_tension:
            alpha, aprime = surface_tension.alpha_arrays(
                p.T, p.mat, p.phase, self.table, self.liquid_ref, thermal_run)
            fs = surface_tension.surface_tension_force(
                f, vol, alpha, aprime, self.melt_frac, thermal_run, tgl.marangoni)
            p.acc += fs / p.mass[:, None]
        if thermal_run and tgl.recoil:
            fv = interface_fluxes.recoil_force(f, vol, p.T, p.phase,
                                               self.melt_frac, self.table,
                                               self.liquid_ref)
            p.acc += fv / p.mass[:, None]
        is_fluid = p.is_fluid()
        p.acc[~is_fluid] = 0.0
        if tgl.body_force:
            p.acc[is_fluid] += cfg.gravity

        if thermal_run:
            thermal.conduction_pass(g.start, g.idx, g.dist, g.dw, p.mass, p.rho,
                                    p.T, p.mat, self.table.k, self.table.c_p,
                                    p.dTdt)
            self.src_laser = interface_fluxes.laser_heating(
                f, p.pos, p.phase, p.mat, self.table, self.laser, self.t)
            self.src_evap = interface_fluxes.evaporation_heat_loss(
                f, p.T, p.phase, self.table, self.liquid_ref)

        if self.bodies.bodies:
            fluid.solid_loads_pass(g.start, g.idx, g.dist, g.w, g.dw,
                                   p.pos, p.vel, p.v_transport, p.mass, p.rho, p.p,
                                   p.phase, p.mat, p.body, self.p_ext, self.u_eff,
                                   self.table.eta,
                                   nm.dx, nm.k_c, nm.d_c, nm.k_b, nm.d_b,
                                   nm.barrier_distance(),
                                   tgl.pressure, tgl.viscous, tgl.barrier, True,
                                   self.member_forces, self._err)
            if self._err[0] != 0:
                raise SimulationAbort(
                    f"coincident particles (particle {int(self._err[1])}, solid loads)",
                    int(self._err[1]), "solid_loads")
            self.bodies.gather_loads(self.member_forces, p)

    def prepare(self):
        """Initial force evaluation; must run once before stepping."""
        self.evaluate_forces()
        self._prepared = True

    # -- stepping ----------------------------------------------------------

    def step(self, dt: float) -> StepReport:
        if not self._prepared:
            self.prepare()
        p = self.particles
        cfg = self.config
        g_eff = cfg.gravity if cfg.toggles.body_force else np.zeros(3)

        is_fluid = p.is_fluid()
        p.vel[is_fluid] += 0.5 * dt * p.acc[is_fluid]
        p.v_transport[is_fluid] = p.vel[is_fluid] + 0.5 * dt * self.a_bg[is_fluid]
        self.bodies.kick(0.5 * dt, g_eff)

        p.pos[is_fluid] += dt * p.v_transport[is_fluid]
        self.bodies.drift(dt, p)

        self.evaluate_forces()

        is_fluid = p.is_fluid()
        p.vel[is_fluid] += 0.5 * dt * p.acc[is_fluid]
        self.bodies.kick(0.5 * dt, g_eff)
        for body in self.bodies.bodies.values():
            body.push_members(p)

        nm = cfg.numerics
        if nm.velocity_damping > 0.0 and (nm.damping_time == 0.0 or self.t < nm.damping_time):
            factor = max(0.0, 1.0 - nm.velocity_damping * dt)
            p.vel[is_fluid] *= factor
            self.bodies.damp(factor)

        events = []
        if cfg.thermal:
            thermal.energy_step(p, p.dTdt, self.src_laser, self.src_evap,
                                self.table, dt, cfg.wall_temperature)
            events = transitions.apply_phase_transitions(
                p, self.table, self.grid, self.bodies, self.h, self.step_count)
            self.transition_events.extend(events)
            if events:
                self.ever_liquid |= p.phase == LIQUID

        self.t += dt
        self.step_count += 1
        return self._report(len(events))

    def _report(self, n_transitions: int) -> StepReport:
        p = self.particles
        is_fluid = p.is_fluid()
        speeds = np.linalg.norm(p.vel[is_fluid], axis=1)
        cp = self.table.c_p[p.mat]
        e_th = float(np.nansum(p.mass * cp * p.T)) if self.config.thermal else 0.0
        limits = compute_dt_limits(self.h, p, self.table, self.config.numerics,
                                   self.config.thermal, self.config.gravity)
        mom = (p.mass[:, None] * p.vel)[is_fluid].sum(axis=0)
        for body in self.bodies.bodies.values():
            mom = mom + body.mass * body.vel
        return StepReport(
            step=self.step_count, time=self.t,
            max_speed=float(speeds.max()) if len(speeds) else 0.0,
            min_T=float(p.T.min()), max_T=float(p.T.max()),
            dt_limits=limits, transition_count=n_transitions,
            total_mass=p.total_mass(), momentum=mom, thermal_energy=e_th)

    def check_dt(self, dt: float, policy: str | None = None):
        """Abort or warn when dt exceeds an active stability limit."""
        limits = compute_dt_limits(self.h, self.particles, self.table,
                                   self.config.numerics, self.config.thermal,
                                   self.config.gravity)
        policy = policy or self.config.numerics.dt_policy
        violated = [n for n, v in limits.items() if dt > v]
        if violated:
            msg = f"dt = {dt:.3e} s exceeds limits: " + ", ".join(
                f"{n} ({limits[n]:.3e} s)" for n in violated)
            if policy == "abort":
                raise SimulationAbort(msg, where="dt check")
            import warnings
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
        return violated
