"""Actuator geometry and operating points.

All lengths are meters, pressures pascals and forces newtons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, OutOfRangeError

__all__ = [
    "MAX_FOLD_RATIO",
    "Geometry",
    "OperatingPoint",
    "make_geometry",
    "wf_circ",
]

#: Folding limit. Two symmetric folds can take at most 2/3 of the flat width;
#: the nominal value 0.67 is accepted as the fully folded state.
MAX_FOLD_RATIO = 0.67


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be finite and positive, got {value!r}")
    return value


@dataclass(frozen=True)
class Geometry:
    """Flat-pattern dimensions of one actuator.

    ``W0`` is the unfolded flat width, ``l0`` the uninflated length, ``wf``
    the total folded width and ``h`` the flattened end thickness.
    """

    W0: float
    l0: float
    wf: float
    h: float

    def __post_init__(self) -> None:
        _positive("W0", self.W0)
        _positive("l0", self.l0)
        _positive("h", self.h)
        if not math.isfinite(self.wf) or self.wf < 0.0:
            raise DomainError(f"wf must be finite and >= 0, got {self.wf!r}")
        if self.wf / self.W0 > MAX_FOLD_RATIO + 1e-12:
            raise OutOfRangeError(
                f"fold ratio {self.wf / self.W0:.4g} exceeds the folding limit "
                f"{MAX_FOLD_RATIO}"
            )

    @property
    def fold_ratio(self) -> float:
        return self.wf / self.W0

    @property
    def aspect_ratio(self) -> float:
        return self.l0 / self.W0

    @property
    def width(self) -> float:
        """Uninflated width after folding, ``W0 - wf``."""
        return self.W0 - self.wf

    @property
    def tube_diameter(self) -> float:
        """Inflated tube diameter, from ``W0 = pi D0 / 2``."""
        return 2.0 * self.W0 / math.pi

    def with_fold_ratio(self, fold_ratio: float) -> "Geometry":
        return Geometry(self.W0, self.l0, fold_ratio * self.W0, self.h)


@dataclass(frozen=True)
class OperatingPoint:
    strain: float
    force: float
    pressure: float


def make_geometry(W0: float, l0: float, wf: float = 0.0, h: float | None = None) -> Geometry:
    """Validated geometry; ``h`` defaults to ``0.1 * W0`` (a demo value)."""
    if h is None:
        h = 0.1 * _positive("W0", W0)
    return Geometry(float(W0), float(l0), float(wf), float(h))


def wf_circ(l0: float) -> float:
    """Folded width at which the inflated section becomes circular, ``2 l0 / pi``."""
    return 2.0 * _positive("l0", l0) / math.pi
