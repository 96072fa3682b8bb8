"""Sampled force-strain characteristics and their CSV form."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataFormatError, DomainError

__all__ = ["ForceStrainCurve", "ZERO_FORCE_FRACTION", "CURVE_CSV_HEADER"]

#: A force below this fraction of the curve maximum counts as zero.
ZERO_FORCE_FRACTION = 0.01

CURVE_CSV_HEADER = ("strain", "force_n")


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ForceStrainCurve:
    """Force against strain at fixed geometry and pressure.

    Strains are strictly increasing, forces nonnegative, and the last force is
    at most ``ZERO_FORCE_FRACTION`` of the first (the curve runs out to the
    zero-force state).
    """

    strain: np.ndarray
    force: np.ndarray
    pressure: float
    label: str = ""
    fold_ratio: float | None = field(default=None)

    def __post_init__(self) -> None:
        strain = _frozen(self.strain)
        force = _frozen(self.force)
        object.__setattr__(self, "strain", strain)
        object.__setattr__(self, "force", force)
        object.__setattr__(self, "pressure", float(self.pressure))
        if strain.ndim != 1 or strain.shape != force.shape:
            raise DomainError("strain and force must be 1-D arrays of equal length")
        if strain.size == 0:
            raise DomainError("a curve needs at least one point")
        if not (np.all(np.isfinite(strain)) and np.all(np.isfinite(force))):
            raise DomainError("curve contains non-finite values")
        if np.any(np.diff(strain) <= 0.0):
            raise DomainError("curve strains must be strictly increasing")
        if np.any(force < 0.0):
            raise DomainError("curve forces must be nonnegative")
        if force[-1] > ZERO_FORCE_FRACTION * force[0] and strain.size > 1:
            raise DomainError(
                f"curve {self.label!r} does not reach the zero-force state "
                f"(last force {force[-1]:.4g} N, first {force[0]:.4g} N)"
            )
        if not math.isfinite(self.pressure) or self.pressure <= 0.0:
            raise DomainError(f"pressure must be positive, got {self.pressure!r}")

    def __len__(self) -> int:
        return self.strain.size

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.strain.tolist(), self.force.tolist()))

    def sort_key(self) -> tuple:
        fr = math.inf if self.fold_ratio is None else self.fold_ratio
        return (fr, self.label)

    def resample(self, n: int) -> "ForceStrainCurve":
        """Linear resampling onto ``n`` equally spaced strains over the curve's span."""
        grid = np.linspace(self.strain[0], self.strain[-1], n)
        return ForceStrainCurve(
            grid, np.interp(grid, self.strain, self.force), self.pressure, self.label, self.fold_ratio
        )

    def scaled(self, factor: float) -> "ForceStrainCurve":
        """Forces and pressure multiplied by ``factor``."""
        return ForceStrainCurve(
            self.strain, self.force * factor, self.pressure * factor, self.label, self.fold_ratio
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CURVE_CSV_HEADER)
        for s, f in zip(self.strain, self.force):
            writer.writerow((repr(float(s)), repr(float(f))))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, pressure: float, label: str = "", fold_ratio=None):
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("empty curve file") from None
        if tuple(h.strip() for h in header) != CURVE_CSV_HEADER:
            raise DataFormatError(f"expected header {','.join(CURVE_CSV_HEADER)!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                raise DataFormatError(f"line {lineno}: malformed row {row!r}") from None
        arr = np.array(rows, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], pressure, label, fold_ratio)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "fold_ratio": self.fold_ratio,
            "pressure_pa": self.pressure,
            "strain": self.strain.tolist(),
            "force_n": self.force.tolist(),
        }
