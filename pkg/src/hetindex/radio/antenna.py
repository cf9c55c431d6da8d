"""Sectored (flat-top) antenna pattern."""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AntennaPattern:
    """Constant gain ``g_max`` inside the main lobe of width ``beamwidth``
    (radians, centered on the boresight) and ``g_min`` everywhere else.
    Gains are linear."""

    beamwidth: float
    g_max: float
    g_min: float

    def __post_init__(self):
        if not 0.0 < self.beamwidth < TWO_PI:
            raise ValueError(f"beamwidth must lie in (0, 2*pi), got {self.beamwidth}")
        if not self.g_max >= self.g_min > 0.0:
            raise ValueError(f"need g_max >= g_min > 0, got {self.g_max}, {self.g_min}")

    @classmethod
    def normalized(cls, beamwidth: float, g_max: float) -> "AntennaPattern":
        """Pattern whose gain integrates to 2*pi over the circle.

        >>> AntennaPattern.normalized(math.pi / 6, 10.0).g_min  # doctest: +ELLIPSIS
        0.18181818...
        """
        if not 0.0 < beamwidth < TWO_PI:
            raise ValueError(f"beamwidth must lie in (0, 2*pi), got {beamwidth}")
        g_min = (TWO_PI - beamwidth * g_max) / (TWO_PI - beamwidth)
        if g_min <= 0.0:
            raise ValueError(f"g_max={g_max} too large to normalize at beamwidth {beamwidth}")
        return cls(beamwidth, g_max, g_min)

    @classmethod
    def omni(cls) -> "AntennaPattern":
        # any beamwidth works when both gains are 1
        return cls(math.pi, 1.0, 1.0)

    @property
    def half_beamwidth(self) -> float:
        return 0.5 * self.beamwidth

    def integral(self) -> float:
        return self.beamwidth * self.g_max + (TWO_PI - self.beamwidth) * self.g_min

    def is_normalized(self, tol: float = 1e-9) -> bool:
        return abs(self.integral() - TWO_PI) <= tol

    def gain(self, offset: float) -> float:
        """Linear gain at angular ``offset`` from boresight, ``offset`` in [0, pi]."""
        return self.g_max if offset <= self.half_beamwidth else self.g_min

    def gain_db(self, offset: float) -> float:
        return 10.0 * math.log10(self.gain(offset))
