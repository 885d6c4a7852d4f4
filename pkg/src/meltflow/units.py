"""Unit-suffixed scalar parsing for scenario files.

Internally everything is SI (m, kg, s, K, Pa, W).  Scenario files may write
values as strings like "2.5 um" or "0.05 ms"; bare numbers are taken as SI.
"""

from __future__ import annotations

import math

# factor to SI per unit token
_FACTORS = {
    "m": 1.0,
    "mm": 1e-3,
    "um": 1e-6,
    "µm": 1e-6,
    "nm": 1e-9,
    "s": 1.0,
    "ms": 1e-3,
    "us": 1e-6,
    "µs": 1e-6,
    "ns": 1e-9,
    "K": 1.0,
    "Pa": 1.0,
    "kPa": 1e3,
    "MPa": 1e6,
    "W": 1.0,
    "kW": 1e3,
    "deg": math.pi / 180.0,  # converted to radians
    "rad": 1.0,
    "m/s": 1.0,
    "mm/s": 1e-3,
    "m/s^2": 1.0,
    "kg": 1.0,
    "kg/m^3": 1.0,
    "N/m": 1.0,
}


class UnitError(ValueError):
    pass


def parse_quantity(value, expect: str | None = None) -> float:
    """Parse a scalar with optional unit suffix into SI.

    `value` is a number (taken as SI, or radians if expect == 'deg') or a
    string "<number> <unit>".  `expect` restricts the unit dimension by
    example token ('m', 's', 'K', 'Pa', 'W', 'deg', 'm/s').
    """
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, str):
        raise UnitError(f"expected number or '<value> <unit>' string, got {value!r}")
    parts = value.split()
    if len(parts) == 1:
        try:
            return float(parts[0])
        except ValueError:
            raise UnitError(f"cannot parse quantity {value!r}") from None
    if len(parts) != 2:
        raise UnitError(f"cannot parse quantity {value!r}")
    num, unit = parts
    if unit not in _FACTORS:
        raise UnitError(f"unknown unit {unit!r} in {value!r}")
    if expect is not None and not _compatible(unit, expect):
        raise UnitError(f"unit {unit!r} incompatible with expected {expect!r}")
    try:
        x = float(num)
    except ValueError:
        raise UnitError(f"cannot parse quantity {value!r}") from None
    return x * _FACTORS[unit]


_DIM = {
    "m": "L", "mm": "L", "um": "L", "µm": "L", "nm": "L",
    "s": "T", "ms": "T", "us": "T", "µs": "T", "ns": "T",
    "K": "K",
    "Pa": "P", "kPa": "P", "MPa": "P",
    "W": "W", "kW": "W",
    "deg": "A", "rad": "A",
    "m/s": "V", "mm/s": "V",
    "m/s^2": "a",
    "kg": "M",
    "kg/m^3": "D",
    "N/m": "S",
}


def _compatible(unit: str, expect: str) -> bool:
    return _DIM.get(unit) == _DIM.get(expect)


def parse_vector(value, expect: str | None = None):
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise UnitError(f"expected 3-vector, got {value!r}")
    return [parse_quantity(v, expect) for v in value]
