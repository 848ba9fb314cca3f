"""Bundled CPU power/efficiency profiles and the CSV loader.

The "i5_2500k" table approximates the package power of an Intel
i5-2500K desktop part across its usable clock range; it is
shape-faithful (efficiency peaks near 2.7 GHz), not a point-accurate
measurement.  "microserver" is the same curve family scaled to an
efficient low-power edge server; the bundled scenarios use it for both
edge and cloud nodes, with the cloud efficiency adjusted separately.
"""

from __future__ import annotations

import numpy as np

from .model import CpuProfile

_GHZ = 1e9

_I5_FREQ = (1.6, 2.0, 2.3, 2.5, 2.7, 2.9, 3.1, 3.3, 3.7, 4.1, 4.4)
_I5_POWER = (45.0, 52.0, 58.0, 62.0, 66.5, 72.0, 78.5, 86.0, 105.0, 135.0, 165.0)
_MICRO_POWER = (8.0, 9.3, 10.4, 11.1, 11.9, 12.9, 14.1, 15.4, 18.8, 24.1, 29.5)

BUNDLED: dict[str, CpuProfile] = {
    "i5_2500k": CpuProfile(
        freq_grid_hz=tuple(f * _GHZ for f in _I5_FREQ),
        power_w=_I5_POWER,
        flops_per_cycle=4.0,
    ),
    "microserver": CpuProfile(
        freq_grid_hz=tuple(f * _GHZ for f in _I5_FREQ),
        power_w=_MICRO_POWER,
        flops_per_cycle=4.0,
    ),
}


def get_profile(name: str) -> CpuProfile:
    try:
        return BUNDLED[name]
    except KeyError:
        raise KeyError(
            f"unknown bundled profile {name!r} (have: {', '.join(sorted(BUNDLED))})"
        ) from None


def load_profile_csv(path, flops_per_cycle: float) -> CpuProfile:
    """Read a two-column (Hz, W) CSV into a profile."""
    table = np.loadtxt(path, delimiter=",", ndmin=2)
    if table.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns (Hz, W)")
    return CpuProfile(
        freq_grid_hz=tuple(table[:, 0]),
        power_w=tuple(table[:, 1]),
        flops_per_cycle=flops_per_cycle,
    )


def scale_efficiency(profile: CpuProfile, factor: float) -> CpuProfile:
    """Scale FLOP-per-Joule efficiency by ``factor`` (power by 1/factor)."""
    if not factor > 0:
        raise ValueError("efficiency scale factor must be positive")
    return CpuProfile(
        freq_grid_hz=profile.freq_grid_hz,
        power_w=tuple(p / factor for p in profile.power_w),
        flops_per_cycle=profile.flops_per_cycle,
    )
