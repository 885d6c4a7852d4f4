"""Material parameter records and the bundled reference materials.

One record per phase material.  Thermal fields are optional; an isothermal
scenario may leave them unset, a thermal scenario is rejected by validation
if its materials lack them.  Folded model constants (C_P, C_T, C_M) are
stored directly; the raw physical constants behind them are not exposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields


@dataclass
class FluidNumerics:
    """Weakly compressible EOS stiffness for one material.

    The speed of sound is always derived from the reference pressure so that
    p0 = rho0 * c^2 holds exactly.
    """

    p0: float = 1.0e7          # reference pressure [Pa]
    background_factor: float = 5.0  # p_b = factor * p0

    def speed_of_sound(self, rho0: float) -> float:
        return math.sqrt(self.p0 / rho0)

    @property
    def p_b(self) -> float:
        return self.background_factor * self.p0


@dataclass
class MaterialParams:
    name: str
    rho0: float                      # reference density [kg/m^3]
    eta: float = 0.0                 # dynamic viscosity [kg/(m s)]
    # surface tension against atmospheric gas
    alpha0: float | None = None      # [N/m] at reference temperature
    alpha_prime0: float = 0.0        # d alpha / dT [N/(m K)], <= 0
    T_alpha0: float | None = None    # reference temperature [K]
    alpha_min: float = 0.0           # clamp floor [N/m]
    theta0: float | None = None      # equilibrium wetting angle [rad]
    # melting / solidification
    T_m: float | None = None         # melt temperature [K]
    dT_s: float | None = None        # surface-tension regularization interval [K]
    dT_d: float | None = None        # dissipation regularization interval [K]
    # thermal
    T_v: float | None = None         # boiling temperature [K]
    c_p: float | None = None         # heat capacity [J/(kg K)]
    k: float | None = None           # thermal conductivity [W/(m K)]
    zeta_l: float = 0.0              # laser absorptivity [-]
    C_P: float | None = None         # recoil pressure constant [N/m^2]
    C_T: float | None = None         # recoil temperature constant [K]
    h_v: float | None = None         # latent heat of evaporation [J/kg]
    T_h0: float | None = None        # enthalpy reference temperature [K]
    C_M: float | None = None         # vapor mass flow constant [K s^2/m^2]
    c_s: float = 1.0                 # sticking constant, close to one for metals
    # interface stabilization
    alpha_lg0: float = 0.0           # artificial viscosity factor liquid-gas [-]
    alpha_sf0: float = 0.0           # artificial viscosity factor solid-fluid [-]
    # phase-change routing
    melts_to: str | None = None      # liquid material a solid melts into
    solidifies_to: str | None = None  # solid material a liquid freezes into
    numerics: FluidNumerics = field(default_factory=FluidNumerics)

    def validate(self) -> list[str]:
        errs = []
        if self.rho0 <= 0:
            errs.append(f"material {self.name}: rho0 must be > 0")
        if self.eta < 0:
            errs.append(f"material {self.name}: eta must be >= 0")
        if self.alpha_min < 0:
            errs.append(f"material {self.name}: alpha_min must be >= 0")
        if self.theta0 is not None and not (0.0 < self.theta0 < math.pi):
            errs.append(f"material {self.name}: theta0 must lie in (0, 180) deg")
        for nm in ("dT_s", "dT_d"):
            v = getattr(self, nm)
            if v is not None and v <= 0:
                errs.append(f"material {self.name}: {nm} must be > 0")
        for nm in ("c_p", "k"):
            v = getattr(self, nm)
            if v is not None and v <= 0:
                errs.append(f"material {self.name}: {nm} must be > 0")
        return errs

    def missing_thermal_fields(self, needs_transition: bool) -> list[str]:
        """Names of fields required for a thermal run but unset."""
        need = ["c_p", "k"]
        if needs_transition:
            need += ["T_m", "dT_s", "dT_d"]
        return [nm for nm in need if getattr(self, nm) is None]

    def surface_tension_at(self, T: float) -> float:
        """alpha(T) = max(alpha_min, alpha0 + alpha'0 (T - T_alpha0))."""
        if self.alpha0 is None:
            return 0.0
        if self.T_alpha0 is None or self.alpha_prime0 == 0.0:
            return self.alpha0
        return max(self.alpha_min, self.alpha0 + self.alpha_prime0 * (T - self.T_alpha0))


def molten_metal(**overrides) -> MaterialParams:
    """Representative molten stainless steel."""
    p = MaterialParams(
        name="molten_metal",
        rho0=7430.0,
        eta=6.0e-3,
        alpha0=1.8,
        alpha_min=0.2,
        T_alpha0=1700.0,
        alpha_prime0=-1.0e-3,
        theta0=math.radians(60.0),
        T_m=1700.0,
        dT_s=5.0,
        dT_d=300.0,
        T_v=3000.0,
        c_p=965.0,
        k=35.95,
        zeta_l=0.5,
        C_P=5.4e4,
        C_T=5.0e4,
        h_v=6.583e6,
        T_h0=663.731,
        C_M=1.1095e-3,
        alpha_lg0=7.2,
        alpha_sf0=1.0,
        solidifies_to="solid_metal",
    )
    return _apply(p, overrides)


def solid_metal(**overrides) -> MaterialParams:
    """Representative solid stainless steel."""
    p = MaterialParams(
        name="solid_metal",
        rho0=7430.0,
        c_p=965.0,
        k=35.95,
        zeta_l=0.5,
        melts_to="molten_metal",
    )
    return _apply(p, overrides)


def atmospheric_gas(**overrides) -> MaterialParams:
    p = MaterialParams(
        name="atmospheric_gas",
        rho0=7.43,
        eta=6.0e-4,
        c_p=10.0,
        k=0.026,
        zeta_l=0.0,
    )
    return _apply(p, overrides)


def liquid_binder(**overrides) -> MaterialParams:
    p = MaterialParams(
        name="liquid_binder",
        rho0=1000.0,
        eta=1.0e-3,
        alpha0=0.5,
        theta0=math.radians(60.0),
        alpha_lg0=1.8,
    )
    return _apply(p, overrides)


def _apply(p: MaterialParams, overrides: dict) -> MaterialParams:
    valid = {f.name for f in fields(MaterialParams)}
    for k, v in overrides.items():
        if k not in valid:
            raise TypeError(f"unknown material field {k!r}")
        setattr(p, k, v)
    return p


class MaterialTable:
    """Materials packed into flat arrays indexed by material id, the layout
    the compiled pair kernels consume.  Absent optional fields become NaN."""

    def __init__(self, mats: list[MaterialParams]):
        import numpy as np

        self.materials = list(mats)
        self.index = {m.name: i for i, m in enumerate(mats)}
        if len(self.index) != len(mats):
            raise ValueError("duplicate material names")
        n = len(mats)

        def col(get, default=np.nan):
            out = np.empty(n)
            for i, m in enumerate(mats):
                v = get(m)
                out[i] = default if v is None else v
            return out

        self.rho0 = col(lambda m: m.rho0)
        self.eta = col(lambda m: m.eta, 0.0)
        self.c_sound = np.array([m.numerics.speed_of_sound(m.rho0) for m in mats])
        self.p0 = np.array([m.numerics.p0 for m in mats])
        self.p_b = np.array([m.numerics.p_b for m in mats])
        self.c_p = col(lambda m: m.c_p)
        self.k = col(lambda m: m.k)
        self.zeta = col(lambda m: m.zeta_l, 0.0)
        self.alpha0 = col(lambda m: m.alpha0, 0.0)
        self.alpha_prime0 = col(lambda m: m.alpha_prime0, 0.0)
        self.T_alpha0 = col(lambda m: m.T_alpha0)
        self.alpha_min = col(lambda m: m.alpha_min, 0.0)
        self.theta0 = col(lambda m: m.theta0)
        self.T_v = col(lambda m: m.T_v)
        self.C_P = col(lambda m: m.C_P)
        self.C_T = col(lambda m: m.C_T)
        self.h_v = col(lambda m: m.h_v)
        self.T_h0 = col(lambda m: m.T_h0)
        self.C_M = col(lambda m: m.C_M)
        self.c_s = col(lambda m: m.c_s, 1.0)
        self.alpha_lg0 = col(lambda m: m.alpha_lg0, 0.0)
        self.alpha_sf0 = col(lambda m: m.alpha_sf0, 0.0)
        self.melts_to = np.array(
            [self.index.get(m.melts_to, -1) if m.melts_to else -1 for m in mats], np.int64
        )
        self.solidifies_to = np.array(
            [self.index.get(m.solidifies_to, -1) if m.solidifies_to else -1 for m in mats],
            np.int64,
        )
        # effective melt temperature / regularization intervals: a solid
        # material inherits them from its liquid counterpart
        self.T_m = col(lambda m: m.T_m)
        self.dT_s = col(lambda m: m.dT_s)
        self.dT_d = col(lambda m: m.dT_d)
        for i, m in enumerate(mats):
            j = self.melts_to[i]
            if j >= 0:
                for a in (self.T_m, self.dT_s, self.dT_d):
                    if np.isnan(a[i]):
                        a[i] = a[j]

    def __len__(self):
        return len(self.materials)

    def id_of(self, name: str) -> int:
        return self.index[name]
