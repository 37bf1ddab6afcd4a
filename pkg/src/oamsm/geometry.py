"""Placement of the transmit line array and the ring-mounted receive pairs.

The transmit elements sit on a line with spacing ``xi``; each one faces a
receive antenna pair mounted on the annular intensity maximum (radius
``ring_radius``) of its own beam, a propagation distance ``z`` away.  The
two antennas of a pair are separated by the azimuth ``beta``.  All antenna
indices are 1-based to match the usual m/j array notation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError

__all__ = ["ArrayLayout", "DegenerateGeometryError", "pair_distances", "pair_azimuths", "radial_offsets"]


class DegenerateGeometryError(ValueError):
    """A receive antenna landed exactly on a transmit beam axis, where the
    azimuth formula is undefined."""


@dataclass(frozen=True)
class ArrayLayout:
    """Geometry of one transmit array / receive-pair arrangement.

    ``beta`` must stay strictly below pi / l_max or the pair phase readout
    of the highest beam state becomes ambiguous.
    """

    M: int
    xi: float
    z: float
    beta: float
    ring_radius: float
    l_max: int

    def __post_init__(self):
        if not isinstance(self.M, int) or self.M < 1:
            raise ConfigError(f"antenna count must be a positive integer, got {self.M!r}")
        for name in ("xi", "z", "ring_radius"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ConfigError(f"{name} must be finite and > 0, got {v!r}")
        if not isinstance(self.l_max, int) or self.l_max < 1:
            raise ConfigError(f"l_max must be a positive integer, got {self.l_max!r}")
        limit = math.pi / self.l_max
        if not (0.0 < self.beta < limit):
            raise ConfigError(
                f"pair separation beta={self.beta!r} outside (0, pi/{self.l_max}) = (0, {limit!r})"
            )


def _check_indices(layout: ArrayLayout, *indices: int) -> None:
    for idx in indices:
        if not isinstance(idx, (int,)) or not 1 <= idx <= layout.M:
            raise ConfigError(f"antenna index {idx!r} outside 1..{layout.M}")


def pair_distances(m: int, j: int, layout: ArrayLayout) -> tuple[float, float]:
    """Distances from transmit element m to both antennas of receive pair j.

    The first antenna of pair j sits at transverse offset (j-m)*xi from the
    beam axis of element m and height ring_radius; the second is rotated by
    beta around pair j's own axis.  d1 depends on |j-m| only.
    """
    _check_indices(layout, m, j)
    dx = (j - m) * layout.xi
    r = layout.ring_radius
    d1 = math.sqrt(layout.z**2 + dx**2 + r**2)
    d2 = math.sqrt(layout.z**2 + (dx - r * math.sin(layout.beta)) ** 2 + (r * math.cos(layout.beta)) ** 2)
    return d1, d2


def pair_azimuths(m: int, j: int, layout: ArrayLayout) -> tuple[float, float]:
    """Azimuths of receive pair j as seen from transmit element m.

    For j == m the pair sits at (pi/2, pi/2 + beta).  Off-axis pairs get the
    angle of their transverse position; a pair exactly on the m-th beam axis
    has no defined azimuth and raises DegenerateGeometryError.
    """
    _check_indices(layout, m, j)
    beta = layout.beta
    if j == m:
        return math.pi / 2.0, math.pi / 2.0 + beta
    dx = (j - m) * layout.xi
    r = layout.ring_radius
    x2 = dx - r * math.sin(beta)
    if x2 == 0.0:
        raise DegenerateGeometryError(
            f"second antenna of pair j={j} lies on the beam axis of element m={m}"
        )
    phi1 = math.atan2(r, dx)
    phi2 = math.atan2(r * math.cos(beta), x2)
    return phi1, phi2


def radial_offsets(m: int, j: int, layout: ArrayLayout) -> tuple[float, float]:
    """Transverse distances of receive pair j from the m-th beam axis.

    r1 equals ring_radius exactly when j == m and exceeds it otherwise.
    """
    _check_indices(layout, m, j)
    dx = (j - m) * layout.xi
    r = layout.ring_radius
    r1 = math.sqrt(dx**2 + r**2)
    r2 = math.sqrt((dx - r * math.sin(layout.beta)) ** 2 + (r * math.cos(layout.beta)) ** 2)
    return r1, r2
