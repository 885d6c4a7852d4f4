"""Declarative scenario files (TOML with unit suffixes), geometry stamping,
validation, and serialization.

Particles are stamped onto a single global grid with spacing dx; regions
claim interior grid sites in file order and may not claim a site someone
else already owns.  Domain walls are stamped automatically as wall_layers
boundary shells around the interior.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import powder
from .materials import FluidNumerics, MaterialParams, MaterialTable
from .model import (BOUNDARY_WALL, GAS, LIQUID, SOLID_RIGID, SOLID_SUBSTRATE,
                    ForceToggles, NumericsConfig, ParticleArrays,
                    SimulationConfig, assign_particle_masses)
from .interface_fluxes import LaserBeam
from .rigid import BodyRegistry
from .stepper import Engine, compute_dt_limits
from .units import UnitError, parse_quantity, parse_vector

PHASE_BY_NAME = {"liquid": LIQUID, "gas": GAS, "substrate": SOLID_SUBSTRATE,
                 "rigid": SOLID_RIGID}
DEFAULT_PHASE = {"box": "substrate", "sphere": "liquid", "powder": "rigid",
                 "gas_fill": "gas"}


class ScenarioError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass
class Region:
    kind: str
    material: str
    name: str = ""
    phase: str = ""
    min: list | None = None          # box corners [m]
    max: list | None = None
    center: list | None = None       # sphere [m]
    radius: float | None = None
    velocity: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    temperature: float | None = None
    file: str | None = None          # powder CSV path
    csv_text: str | None = None      # inline powder CSV (serialized form)
    count: int | None = None         # powder generation
    d_min: float | None = None
    d_max: float | None = None
    seed: int | None = None


@dataclass
class LaserSpec:
    power: float
    radius: float
    direction: list = field(default_factory=lambda: [0.0, 0.0, -1.0])
    path: list = field(default_factory=list)       # (t, x, y, z)
    windows: list = field(default_factory=list)    # (t_on, t_off)

    def build(self) -> LaserBeam:
        return LaserBeam(power=self.power, radius=self.radius,
                         direction=np.array(self.direction),
                         waypoints=[tuple(p) for p in self.path],
                         windows=[tuple(w) for w in self.windows] or [(0.0, math.inf)])


@dataclass
class ScenarioConfig:
    name: str
    dx: float
    end_time: float
    domain_size: list
    thermal: bool = False
    dt: float | None = None
    dt_policy: str = "warn"
    cfl_safety: float = 0.9
    wall_layers: int = 3
    wall_material: str = ""
    wall_temperature: float = 500.0
    initial_temperature: float = 500.0
    gravity: list = field(default_factory=lambda: [0.0, 0.0, -9.81])
    velocity_damping: float = 0.0
    damping_time: float = 0.0
    k_b: float = 1.0
    d_b: float = 1.0e-4
    k_c: float = 1.0
    d_c: float = 1.0e-4
    output_interval: float = 0.0
    output_formats: list = field(default_factory=lambda: ["vtk", "csv"])
    forces: dict = field(default_factory=dict)
    materials: dict = field(default_factory=dict)   # name -> MaterialParams
    laser: LaserSpec | None = None
    regions: list = field(default_factory=list)


# -- parsing ----------------------------------------------------------------


def _line_of(text: str, key: str) -> str:
    for ln_no, ln in enumerate(text.splitlines(), 1):
        if key in ln:
            return f" (line {ln_no})"
    return ""


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse and fully validate a scenario; raises ScenarioError with the
    complete list of violations."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError([f"TOML parse error: {e}"]) from None
    errs: list[str] = []
    cfg = _parse_raw(raw, text, errs)
    if errs:
        raise ScenarioError(errs)
    more = validate_scenario(cfg)
    hard = [v for v in more if not v.startswith("warning:")]
    if hard:
        raise ScenarioError(hard)
    return cfg


def _q(raw, key, expect, errs, text, default=None, required=False):
    cur = raw
    for part in key.split("."):
        if not isinstance(cur, dict) or part not in cur:
            if required:
                errs.append(f"missing required key {key!r}")
            return default
        cur = cur[part]
    try:
        return parse_quantity(cur, expect)
    except UnitError as e:
        errs.append(f"{key}: {e}{_line_of(text, key.split('.')[-1])}")
        return default


def _parse_raw(raw: dict, text: str, errs: list) -> ScenarioConfig:
    known_top = {"name", "thermal", "domain", "numerics", "gravity", "output",
                 "forces", "materials", "laser", "regions"}
    for k in raw:
        if k not in known_top:
            errs.append(f"unknown key {k!r}{_line_of(text, k)}")

    name = raw.get("name", "scenario")
    dom = raw.get("domain", {})
    size = dom.get("size", [1.0, 1.0, 1.0])
    try:
        size = [parse_quantity(s, "m") for s in size]
    except (UnitError, TypeError) as e:
        errs.append(f"domain.size: {e}")
        size = [1.0, 1.0, 1.0]
    num = raw.get("numerics", {})
    dx = _q(raw, "numerics.dx", "m", errs, text, required=True, default=1.0)
    end_time = _q(raw, "numerics.end_time", "s", errs, text, required=True, default=0.0)

    cfg = ScenarioConfig(
        name=name, dx=dx, end_time=end_time, domain_size=size,
        thermal=bool(raw.get("thermal", False)),
        dt=_q(raw, "numerics.dt", "s", errs, text),
        dt_policy=num.get("dt_policy", "warn"),
        cfl_safety=float(num.get("cfl_safety", 0.9)),
        wall_layers=int(dom.get("wall_layers", 3)),
        wall_material=dom.get("wall_material", ""),
        wall_temperature=_q(raw, "domain.wall_temperature", "K", errs, text, default=500.0),
        initial_temperature=_q(raw, "domain.initial_temperature", "K", errs, text, default=500.0),
        velocity_damping=float(num.get("velocity_damping", 0.0)),
        damping_time=_q(raw, "numerics.damping_time", "s", errs, text, default=0.0),
        k_b=float(num.get("k_b", 1.0)),
        d_b=float(num.get("d_b", 1.0e-4)),
        k_c=float(num.get("k_c", 1.0)),
        d_c=float(num.get("d_c", 1.0e-4)),
        output_interval=_q(raw, "output.interval", "s", errs, text, default=0.0),
        output_formats=list(raw.get("output", {}).get("formats", ["vtk", "csv"])),
        forces=dict(raw.get("forces", {})),
    )
    if "gravity" in raw:
        try:
            cfg.gravity = parse_vector(raw["gravity"].get("vector", [0, 0, -9.81]), "m/s^2")
        except UnitError as e:
            errs.append(f"gravity.vector: {e}")

    for mname, mraw in raw.get("materials", {}).items():
        cfg.materials[mname] = _parse_material(mname, mraw, errs, text)

    if "laser" in raw:
        cfg.laser = _parse_laser(raw["laser"], size, errs, text)

    for i, rr in enumerate(raw.get("regions", [])):
        cfg.regions.append(_parse_region(i, rr, errs, text))
    return cfg


_MAT_UNITS = {
    "rho0": None, "eta": None, "alpha0": None, "alpha_prime0": None,
    "T_alpha0": "K", "alpha_min": None, "theta0": "deg", "T_m": "K",
    "dT_s": "K", "dT_d": "K", "T_v": "K", "c_p": None, "k": None,
    "zeta_l": None, "C_P": "Pa", "C_T": "K", "h_v": None, "T_h0": "K",
    "C_M": None, "c_s": None, "alpha_lg0": None, "alpha_sf0": None,
}


def _parse_material(name, mraw, errs, text) -> MaterialParams:
    kwargs = {}
    p0 = 1.0e7
    bg = 5.0
    for k, v in mraw.items():
        if k == "p0":
            p0 = parse_quantity(v, "Pa")
        elif k == "background_factor":
            bg = float(v)
        elif k in ("melts_to", "solidifies_to"):
            kwargs[k] = str(v)
        elif k in _MAT_UNITS:
            try:
                kwargs[k] = parse_quantity(v, _MAT_UNITS[k])
            except UnitError as e:
                errs.append(f"materials.{name}.{k}: {e}")
        else:
            errs.append(f"materials.{name}: unknown field {k!r}{_line_of(text, k)}")
    if "rho0" not in kwargs:
        errs.append(f"materials.{name}: rho0 is required")
        kwargs["rho0"] = 1.0
    m = MaterialParams(name=name, numerics=FluidNumerics(p0=p0, background_factor=bg),
                       **kwargs)
    errs.extend(m.validate())
    return m


def _parse_laser(lraw, size, errs, text) -> LaserSpec:
    power = parse_quantity(lraw.get("power", 0.0), "W")
    if "radius" in lraw:
        radius = parse_quantity(lraw["radius"], "m")
    elif "diameter" in lraw:
        radius = 0.5 * parse_quantity(lraw["diameter"], "m")
    else:
        errs.append("laser: radius or diameter is required")
        radius = 1.0
    direction = [float(v) for v in lraw.get("direction", [0, 0, -1])]
    path = []
    for wp in lraw.get("path", []):
        t = parse_quantity(wp[0], "s")
        x = parse_quantity(wp[1], "m")
        y = parse_quantity(wp[2], "m")
        z = parse_quantity(wp[3], "m") if len(wp) > 3 else size[2]
        path.append([t, x, y, z])
    if not path:
        path = [[0.0, 0.5 * size[0], 0.5 * size[1], size[2]]]
    windows = [[parse_quantity(a, "s"), parse_quantity(b, "s")]
               for a, b in lraw.get("on_windows", [])]
    return LaserSpec(power=power, radius=radius, direction=direction,
                     path=path, windows=windows)


def _parse_region(i, rr, errs, text) -> Region:
    kind = rr.get("kind", "")
    if kind not in DEFAULT_PHASE:
        errs.append(f"regions[{i}]: unknown kind {kind!r}")
        kind = "box"
    reg = Region(kind=kind, material=rr.get("material", ""),
                 name=rr.get("name", f"{kind}#{i}"),
                 phase=rr.get("phase", DEFAULT_PHASE[kind]))
    if not reg.material:
        errs.append(f"regions[{i}] ({reg.name}): material is required")
    try:
        if "min" in rr:
            reg.min = [parse_quantity(v, "m") for v in rr["min"]]
        if "max" in rr:
            reg.max = [parse_quantity(v, "m") for v in rr["max"]]
        if "center" in rr:
            reg.center = [parse_quantity(v, "m") for v in rr["center"]]
        if "radius" in rr:
            reg.radius = parse_quantity(rr["radius"], "m")
        elif "diameter" in rr:
            reg.radius = 0.5 * parse_quantity(rr["diameter"], "m")
        if "velocity" in rr:
            reg.velocity = [parse_quantity(v, "m/s") for v in rr["velocity"]]
        if "temperature" in rr:
            reg.temperature = parse_quantity(rr["temperature"], "K")
    except (UnitError, TypeError) as e:
        errs.append(f"regions[{i}] ({reg.name}): {e}")
    if kind == "box" and (reg.min is None or reg.max is None):
        errs.append(f"regions[{i}] ({reg.name}): box needs min and max")
    if kind == "sphere" and (reg.center is None or reg.radius is None):
        errs.append(f"regions[{i}] ({reg.name}): sphere needs center and radius/diameter")
    if kind == "powder":
        reg.file = rr.get("file")
        reg.csv_text = rr.get("csv_text")
        for k in ("count", "seed"):
            if k in rr:
                setattr(reg, k, int(rr[k]))
        for k in ("d_min", "d_max"):
            if k in rr:
                setattr(reg, k, parse_quantity(rr[k], "m"))
        generated = reg.count is not None and reg.d_min is not None and reg.d_max is not None
        if not (reg.file or reg.csv_text or generated):
            errs.append(f"regions[{i}] ({reg.name}): powder needs file/csv_text or count+d_min+d_max")
    return reg


# -- validation ---------------------------------------------------------------


def validate_scenario(cfg: ScenarioConfig) -> list[str]:
    """Every violated invariant (prefix 'warning:' for soft issues)."""
    out: list[str] = []
    if cfg.dx <= 0:
        out.append("numerics.dx must be positive")
        return out
    if any(s <= 0 for s in cfg.domain_size):
        out.append("domain.size must be positive")
    for r in cfg.regions:
        if r.material and r.material not in cfg.materials:
            out.append(f"region {r.name}: unknown material {r.material!r}")
        if r.phase and r.phase not in PHASE_BY_NAME:
            out.append(f"region {r.name}: unknown phase {r.phase!r}")
    if cfg.wall_material and cfg.wall_material not in cfg.materials:
        out.append(f"domain.wall_material {cfg.wall_material!r} is unknown")
    if cfg.thermal:
        for name, m in cfg.materials.items():
            for f_ in m.missing_thermal_fields(needs_transition=False):
                out.append(f"material {name}: missing {_FIELD_DESC.get(f_, f_)} required for a thermal run")
        liquid_mats = {r.material for r in cfg.regions if r.phase == "liquid"}
        for name in sorted(liquid_mats):
            m = cfg.materials.get(name)
            if m and m.T_m is None:
                out.append(f"material {name}: missing melt temperature (T_m) for a thermal run")
            if m and m.T_m is not None:
                for f_ in ("dT_s", "dT_d"):
                    if getattr(m, f_) is None:
                        out.append(f"material {name}: missing {f_} for a thermal run")
    else:
        if cfg.laser is not None:
            out.append("laser heating requires thermal = true")
    if cfg.laser is not None:
        liquid_mats = [r.material for r in cfg.regions if r.phase == "liquid"]
        melt_targets = [m.melts_to for m in cfg.materials.values() if m.melts_to]
        ref = (liquid_mats + melt_targets)
        if ref:
            m = cfg.materials.get(ref[0])
            if m is not None:
                for f_ in ("T_v", "C_P", "C_T", "h_v", "T_h0", "C_M"):
                    if getattr(m, f_) is None:
                        out.append(f"material {m.name}: missing {f_} required for laser-driven evaporation")

    if out:
        return out

    # dry build: stamping overlaps and t=0 stability limits
    try:
        engine, info = build_engine(cfg, validate_only=True)
    except ScenarioError as e:
        return list(e.violations)
    limits = compute_dt_limits(cfg.dx, engine.particles, engine.table,
                               engine.config.numerics, cfg.thermal,
                               np.array(cfg.gravity))
    if cfg.dt is None:
        binding = min(limits.values())
        out.append(f"warning: dt not set, defaulting to {0.9 * binding:.3e} s "
                   f"(0.9x binding limit {min(limits, key=limits.get)})")
    else:
        for nm, v in limits.items():
            if cfg.dt > v:
                out.append(f"dt = {cfg.dt:.3e} s violates the {nm} condition (limit {v:.3e} s)")
    return out


_FIELD_DESC = {"c_p": "heat capacity (c_p)", "k": "thermal conductivity (k)",
               "T_m": "melt temperature (T_m)"}


def default_dt(cfg: ScenarioConfig, engine) -> float:
    limits = compute_dt_limits(cfg.dx, engine.particles, engine.table,
                               engine.config.numerics, cfg.thermal,
                               np.array(cfg.gravity))
    return cfg.cfl_safety * min(limits.values())


# -- stamping -----------------------------------------------------------------


class _Stamp:
    """Occupancy bookkeeping on the global grid."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.dx = cfg.dx
        self.ni = [max(1, int(round(s / cfg.dx))) for s in cfg.domain_size]
        self.owner: dict[tuple, int] = {}   # site -> region index
        self.rows = []  # (site, phase, mat_name, velocity, T, grain_id)

    def site_pos(self, site):
        return np.array([(site[a] + 0.5) * self.dx for a in range(3)])

    def interior_sites_in_box(self, lo, hi):
        i0 = [max(0, int(math.ceil(lo[a] / self.dx - 0.5))) for a in range(3)]
        i1 = [min(self.ni[a] - 1, int(math.floor(hi[a] / self.dx - 0.5))) for a in range(3)]
        for x in range(i0[0], i1[0] + 1):
            for y in range(i0[1], i1[1] + 1):
                for z in range(i0[2], i1[2] + 1):
                    yield (x, y, z)

    def claim(self, sites, ridx, phase, mat, vel, T, grain=-1):
        clashes = 0
        for s in sites:
            if s in self.owner:
                clashes += 1
                continue
            self.owner[s] = ridx
            self.rows.append((s, phase, mat, vel, T, grain))
        return clashes


def build_engine(cfg: ScenarioConfig, validate_only: bool = False):
    """Stamp particles and assemble an Engine plus build metadata."""
    errs: list[str] = []
    mats = list(cfg.materials.values())
    if not mats:
        raise ScenarioError(["no materials defined"])
    table = MaterialTable(mats)
    st = _Stamp(cfg)
    dx = cfg.dx
    t_init = cfg.initial_temperature

    grain_records = []  # (grain_id, velocity)
    next_grain = 0
    for ridx, reg in enumerate(cfg.regions):
        phase = PHASE_BY_NAME[reg.phase]
        T = reg.temperature if reg.temperature is not None else t_init
        if reg.kind == "box":
            sites = list(st.interior_sites_in_box(reg.min, reg.max))
            n_clash = st.claim(sites, ridx, phase, reg.material, reg.velocity, T)
            if n_clash:
                other = _first_clash_name(cfg, st, reg)
                errs.append(f"region {reg.name} overlaps {other} on {n_clash} grid sites")
        elif reg.kind == "sphere":
            sites = _sphere_sites(st, reg.center, reg.radius)
            n_clash = st.claim(sites, ridx, phase, reg.material, reg.velocity, T)
            if n_clash:
                other = _first_clash_name(cfg, st, reg)
                errs.append(f"region {reg.name} overlaps {other} on {n_clash} grid sites")
        elif reg.kind == "powder":
            grains = _load_grains(cfg, reg)
            for (gx, gy, gz, gd) in grains:
                sites = _sphere_sites(st, (gx, gy, gz), gd / 2.0)
                if not sites:
                    continue
                gid = next_grain
                next_grain += 1
                grain_records.append((gid, reg.velocity))
                n_clash = st.claim(sites, ridx, phase, reg.material, reg.velocity,
                                   T, grain=gid)
                if n_clash:
                    other = _first_clash_name(cfg, st, reg)
                    errs.append(f"region {reg.name} grain {gid} overlaps {other} "
                                f"on {n_clash} grid sites")
        elif reg.kind == "gas_fill":
            sites = [s for s in st.interior_sites_in_box(
                (0.0, 0.0, 0.0), tuple(cfg.domain_size)) if s not in st.owner]
            st.claim(sites, ridx, phase, reg.material, reg.velocity, T)
    if errs:
        raise ScenarioError(errs)

    # boundary wall shells
    wall_mat = cfg.wall_material or _default_wall_material(cfg)
    wl = cfg.wall_layers
    wall_sites = []
    if wl > 0:
        for x in range(-wl, st.ni[0] + wl):
            for y in range(-wl, st.ni[1] + wl):
                for z in range(-wl, st.ni[2] + wl):
                    if 0 <= x < st.ni[0] and 0 <= y < st.ni[1] and 0 <= z < st.ni[2]:
                        continue
                    wall_sites.append((x, y, z))

    n = len(st.rows) + len(wall_sites)
    particles = ParticleArrays(n)
    mat_id = {m.name: i for i, m in enumerate(mats)}
    grain_members: dict[int, list[int]] = {}
    for i, (s, phase, mname, vel, T, grain) in enumerate(st.rows):
        particles.pos[i] = st.site_pos(s)
        particles.phase[i] = phase
        particles.mat[i] = mat_id[mname]
        particles.vel[i] = vel
        particles.T[i] = T
        if grain >= 0:
            grain_members.setdefault(grain, []).append(i)
    base = len(st.rows)
    for j, s in enumerate(wall_sites):
        i = base + j
        particles.pos[i] = st.site_pos(s)
        particles.phase[i] = BOUNDARY_WALL
        particles.mat[i] = mat_id[wall_mat]
        particles.T[i] = cfg.wall_temperature
    particles.v_transport[:] = particles.vel

    assign_particle_masses(particles, dx, table.rho0)

    bodies = BodyRegistry()
    for gid, vel in grain_records:
        members = grain_members.get(gid)
        if members:
            bodies.new_body(members, particles, velocity=np.array(vel, float))

    toggles = ForceToggles(**{k: bool(v) for k, v in cfg.forces.items()})
    numerics = NumericsConfig(
        dx=dx, dt=cfg.dt, end_time=cfg.end_time, cfl_safety=cfg.cfl_safety,
        dt_policy=cfg.dt_policy, k_b=cfg.k_b, d_b=cfg.d_b, k_c=cfg.k_c,
        d_c=cfg.d_c, velocity_damping=cfg.velocity_damping,
        damping_time=cfg.damping_time)
    sim = SimulationConfig(
        numerics=numerics, gravity=np.array(cfg.gravity, float),
        domain_min=np.zeros(3), domain_max=np.array(cfg.domain_size, float),
        thermal=cfg.thermal, wall_temperature=cfg.wall_temperature,
        toggles=toggles)
    laser = cfg.laser.build() if cfg.laser is not None else None
    engine = Engine(particles, table, sim, bodies=bodies, laser=laser)

    info = {
        "counts": {nm: int((particles.phase == ph).sum())
                   for nm, ph in PHASE_BY_NAME.items()},
        "wall_count": len(wall_sites),
        "n_bodies": len(bodies.bodies),
        "substrate_top": _top_z(particles, SOLID_SUBSTRATE, dx),
        "bed_top": _top_z(particles, SOLID_RIGID, dx),
        "max_grain_diameter": _max_grain_diameter(cfg),
    }
    return engine, info


def _top_z(particles, phase, dx):
    m = particles.phase == phase
    if not m.any():
        return None
    return float(particles.pos[m, 2].max() + 0.5 * dx)


def _max_grain_diameter(cfg):
    d = 0.0
    for reg in cfg.regions:
        if reg.kind != "powder":
            continue
        if reg.d_max:
            d = max(d, reg.d_max)
        elif reg.csv_text or reg.file:
            grains = powder.read_csv(reg.csv_text or reg.file)
            if len(grains):
                d = max(d, float(grains[:, 3].max()))
    return d or None


def _default_wall_material(cfg):
    for reg in cfg.regions:
        if reg.kind == "box":
            return reg.material
    return next(iter(cfg.materials))


def _first_clash_name(cfg, st, reg):
    owners = {cfg.regions[v].name for v in st.owner.values()}
    owners.discard(reg.name)
    return sorted(owners)[0] if owners else "another region"


def _sphere_sites(st: _Stamp, center, radius):
    c = np.asarray(center, float)
    lo = c - radius
    hi = c + radius
    out = []
    for s in st.interior_sites_in_box(lo, hi):
        p = st.site_pos(s)
        if float(((p - c) ** 2).sum()) <= radius * radius:
            out.append(s)
    return out


def _load_grains(cfg, reg):
    if reg.csv_text:
        return powder.read_csv(reg.csv_text)
    if reg.file:
        return powder.read_csv(reg.file)
    sub_top = 0.0
    for other in cfg.regions:
        if other.kind == "box" and other.phase == "substrate":
            sub_top = max(sub_top, other.max[2])
    return powder.generate_powder_bed(
        reg.count, reg.d_min, reg.d_max, reg.seed or 0,
        (0.0, 0.0, 0.0), tuple(cfg.domain_size), sub_top)


# -- serialization ------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return '"' + v.replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {v!r}")


def serialize_scenario(cfg: ScenarioConfig) -> str:
    """Emit the scenario back as TOML in SI units; parse(serialize(c)) == c."""
    L: list[str] = []
    L.append(f"name = {_fmt(cfg.name)}")
    L.append(f"thermal = {_fmt(cfg.thermal)}")
    L.append("")
    L.append("[domain]")
    L.append(f"size = {_fmt(cfg.domain_size)}")
    L.append(f"wall_layers = {cfg.wall_layers}")
    if cfg.wall_material:
        L.append(f"wall_material = {_fmt(cfg.wall_material)}")
    L.append(f"wall_temperature = {_fmt(cfg.wall_temperature)}")
    L.append(f"initial_temperature = {_fmt(cfg.initial_temperature)}")
    L.append("")
    L.append("[numerics]")
    L.append(f"dx = {_fmt(cfg.dx)}")
    if cfg.dt is not None:
        L.append(f"dt = {_fmt(cfg.dt)}")
    L.append(f"end_time = {_fmt(cfg.end_time)}")
    L.append(f"dt_policy = {_fmt(cfg.dt_policy)}")
    L.append(f"cfl_safety = {_fmt(cfg.cfl_safety)}")
    L.append(f"velocity_damping = {_fmt(cfg.velocity_damping)}")
    L.append(f"damping_time = {_fmt(cfg.damping_time)}")
    for k in ("k_b", "d_b", "k_c", "d_c"):
        L.append(f"{k} = {_fmt(getattr(cfg, k))}")
    L.append("")
    L.append("[gravity]")
    L.append(f"vector = {_fmt(cfg.gravity)}")
    L.append("")
    L.append("[output]")
    L.append(f"interval = {_fmt(cfg.output_interval)}")
    L.append(f"formats = {_fmt(cfg.output_formats)}")
    if cfg.forces:
        L.append("")
        L.append("[forces]")
        for k, v in cfg.forces.items():
            L.append(f"{k} = {_fmt(bool(v))}")
    for name, m in cfg.materials.items():
        L.append("")
        L.append(f"[materials.{name}]")
        L.append(f"p0 = {_fmt(m.numerics.p0)}")
        L.append(f"background_factor = {_fmt(m.numerics.background_factor)}")
        for f_ in _MAT_UNITS:
            v = getattr(m, f_)
            if v is None:
                continue
            # bare numbers are SI (theta0 in radians); unit strings only in
            # hand-written files
            if f_ in ("eta", "alpha_prime0", "alpha_min", "zeta_l",
                      "alpha_lg0", "alpha_sf0") and v == 0.0:
                continue
            if f_ == "c_s" and v == 1.0:
                continue
            L.append(f"{f_} = {_fmt(v)}")
        for f_ in ("melts_to", "solidifies_to"):
            v = getattr(m, f_)
            if v:
                L.append(f"{f_} = {_fmt(v)}")
    if cfg.laser is not None:
        ls = cfg.laser
        L.append("")
        L.append("[laser]")
        L.append(f"power = {_fmt(ls.power)}")
        L.append(f"radius = {_fmt(ls.radius)}")
        L.append(f"direction = {_fmt(ls.direction)}")
        L.append(f"path = {_fmt(ls.path)}")
        L.append(f"on_windows = {_fmt(ls.windows)}")
    for reg in cfg.regions:
        L.append("")
        L.append("[[regions]]")
        L.append(f"kind = {_fmt(reg.kind)}")
        L.append(f"name = {_fmt(reg.name)}")
        L.append(f"material = {_fmt(reg.material)}")
        L.append(f"phase = {_fmt(reg.phase)}")
        for f_ in ("min", "max", "center"):
            v = getattr(reg, f_)
            if v is not None:
                L.append(f"{f_} = {_fmt(v)}")
        if reg.radius is not None:
            L.append(f"radius = {_fmt(reg.radius)}")
        L.append(f"velocity = {_fmt(reg.velocity)}")
        if reg.temperature is not None:
            L.append(f"temperature = {_fmt(reg.temperature)}")
        for f_ in ("file", "csv_text"):
            v = getattr(reg, f_)
            if v:
                L.append(f"{f_} = {_fmt(v)}")
        for f_ in ("count", "seed"):
            v = getattr(reg, f_)
            if v is not None:
                L.append(f"{f_} = {_fmt(v)}")
        for f_ in ("d_min", "d_max"):
            v = getattr(reg, f_)
            if v is not None:
                L.append(f"{f_} = {_fmt(v)}")
    return "\n".join(L) + "\n"
