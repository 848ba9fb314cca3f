"""Engineering-unit parsing for config values.

Internally everything is SI-flavoured: bits, Hz, W, J, s, plus km for
path lengths (propagation coefficients are quoted per km).  Config files
may attach a unit suffix to any numeric value ("2.7 GHz", "4e4 pJ/b",
"50 Mb/s"); bare numbers are taken as already canonical.
"""

from __future__ import annotations

import re

FREQUENCY = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}
TIME = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9}
POWER = {"W": 1.0, "mW": 1e-3, "kW": 1e3}
BITS = {"b": 1.0, "kb": 1e3, "Mb": 1e6, "Gb": 1e9}
RATE = {
    "b/s": 1.0, "kb/s": 1e3, "Mb/s": 1e6, "Gb/s": 1e9,
    "bps": 1.0, "kbps": 1e3, "Mbps": 1e6, "Gbps": 1e9,
}
ENERGY_PER_BIT = {
    "J/b": 1.0, "mJ/b": 1e-3, "uJ/b": 1e-6, "µJ/b": 1e-6,
    "nJ/b": 1e-9, "pJ/b": 1e-12,
}
DISTANCE = {"km": 1.0, "m": 1e-3}
TIME_PER_DISTANCE = {
    "s/km": 1.0, "ms/km": 1e-3, "us/km": 1e-6, "µs/km": 1e-6,
}
DIMENSIONLESS = {"": 1.0}

_NUMBER = re.compile(
    r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(.*?)\s*$"
)


class UnitError(ValueError):
    """Raised when a config value carries an unknown or misplaced unit."""


def parse_quantity(value, scales: dict[str, float], what: str = "value") -> float:
    """Convert a config value to its canonical unit.

    ``value`` may be an int/float (already canonical) or a string with an
    optional suffix drawn from ``scales``.
    """
    if isinstance(value, bool):
        raise UnitError(f"{what}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise UnitError(f"{what}: expected number or string, got {type(value).__name__}")
    m = _NUMBER.match(value)
    if m is None:
        raise UnitError(f"{what}: cannot parse quantity {value!r}")
    number, suffix = m.groups()
    if suffix not in scales:
        accepted = ", ".join(sorted(s for s in scales if s)) or "none"
        raise UnitError(f"{what}: unknown unit {suffix!r} (accepted: {accepted})")
    return float(number) * scales[suffix]


def from_canonical(value: float, unit: str, scales: dict[str, float]) -> float:
    """Express a canonical value in ``unit`` (inverse of parse_quantity)."""
    if unit not in scales:
        raise UnitError(f"unknown unit {unit!r}")
    return value / scales[unit]
