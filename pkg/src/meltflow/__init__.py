"""Meshfree simulation engine for coupled microfluid-powder dynamics with
thermo-capillary two-phase flow and reversible melting/solidification,
discretized by weakly compressible smoothed particle hydrodynamics.
"""

import numba as _numba

# workqueue is warning-free on minimal images and the gather-style pair sums
# are bitwise deterministic under any threading layer
try:
    _numba.config.THREADING_LAYER = "workqueue"
except Exception:
    pass

from .kernel import QuinticKernel
from .materials import (FluidNumerics, MaterialParams, MaterialTable,
                        atmospheric_gas, liquid_binder, molten_metal,
                        solid_metal)
from .model import (BOUNDARY_WALL, GAS, LIQUID, SOLID_RIGID, SOLID_SUBSTRATE,
                    ForceToggles, NumericsConfig, ParticleArrays, PhaseTag,
                    SimulationConfig, assign_particle_masses)
from .neighbors import CellGrid, for_each_pair
from .rigid import BodyRegistry, RigidBody
from .scenario import (ScenarioConfig, ScenarioError, build_engine,
                       parse_scenario, serialize_scenario, validate_scenario)
from .stepper import Engine, SimulationAbort, StepReport, compute_dt_limits
from .transitions import transition_f, transition_fbar

__version__ = "0.1.0"
