"""Force-gauge test-stand records.

A record is a time series of gauge force taken while the stand compresses the
pressurized actuator at a constant travel rate, down to the zero-force state,
and back. Strain follows from the travel rate, so no displacement channel is
needed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .curves import ZERO_FORCE_FRACTION, ForceStrainCurve
from .errors import DataFormatError, DomainError

__all__ = [
    "NOISE_FLOOR_N",
    "MEASUREMENT_CSV_HEADER",
    "Stroke",
    "DatasetMeta",
    "MeasurementDataset",
    "load_measurements",
    "load_metadata",
    "dataset_to_curve",
    "synthesize_measurements",
    "default_seed",
]

#: Negative gauge readings down to this value are noise, not errors.
NOISE_FLOOR_N = -0.05
MEASUREMENT_CSV_HEADER = ("time_s", "force_n")
_META_KEYS = (
    "pressure_kpa",
    "l0_mm",
    "w0_mm",
    "fold_ratio",
    "travel_rate_mm_per_min",
    "sample_rate_hz",
)


class Stroke(str, Enum):
    COMPRESSION = "compression"
    RETURN = "return"
    BOTH = "both"


@dataclass(frozen=True)
class DatasetMeta:
    """Test conditions, SI units."""

    pressure: float
    l0: float
    W0: float
    fold_ratio: float
    travel_rate: float
    sample_rate: float

    def __post_init__(self):
        for name in ("pressure", "l0", "W0", "travel_rate", "sample_rate"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise DataFormatError(f"metadata {name} must be positive, got {value!r}")
        if not math.isfinite(self.fold_ratio) or self.fold_ratio < 0.0:
            raise DataFormatError(f"metadata fold_ratio must be >= 0, got {self.fold_ratio!r}")

    @classmethod
    def from_sidecar(cls, doc: dict) -> "DatasetMeta":
        missing = [k for k in _META_KEYS if k not in doc]
        if missing:
            raise DataFormatError(f"metadata missing keys: {', '.join(missing)}")
        try:
            return cls(
                pressure=float(doc["pressure_kpa"]) * 1e3,
                l0=float(doc["l0_mm"]) * 1e-3,
                W0=float(doc["w0_mm"]) * 1e-3,
                fold_ratio=float(doc["fold_ratio"]),
                travel_rate=float(doc["travel_rate_mm_per_min"]) * 1e-3 / 60.0,
                sample_rate=float(doc["sample_rate_hz"]),
            )
        except (TypeError, ValueError) as exc:
            raise DataFormatError(f"metadata value not numeric: {exc}") from None

    def to_sidecar(self) -> dict:
        return {
            "pressure_kpa": self.pressure / 1e3,
            "l0_mm": self.l0 * 1e3,
            "w0_mm": self.W0 * 1e3,
            "fold_ratio": self.fold_ratio,
            "travel_rate_mm_per_min": self.travel_rate * 60.0 * 1e3,
            "sample_rate_hz": self.sample_rate,
        }


@dataclass(frozen=True, eq=False)
class MeasurementDataset:
    time: np.ndarray
    force: np.ndarray
    meta: DatasetMeta

    def __post_init__(self):
        if self.time.shape != self.force.shape or self.time.ndim != 1:
            raise DataFormatError("time and force must be 1-D and equally long")
        if self.time.size and np.any(np.diff(self.time) <= 0.0):
            raise DataFormatError("time must be strictly increasing")

    def __len__(self):
        return self.time.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(MEASUREMENT_CSV_HEADER)
        for t, f in zip(self.time, self.force):
            writer.writerow((repr(float(t)), repr(float(f))))
        return buf.getvalue()


def load_metadata(source) -> DatasetMeta:
    """Read a JSON sidecar from a path, text, or open file."""
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"metadata is not valid JSON: {exc}") from None
    return DatasetMeta.from_sidecar(doc)


def load_measurements(source, meta: DatasetMeta) -> MeasurementDataset:
    """Parse a ``time_s,force_n`` CSV (bytes, text or file object)."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    reader = csv.reader(io.StringIO(source))
    try:
        header = next(reader)
    except StopIteration:
        raise DataFormatError("line 1: empty measurement file") from None
    if tuple(h.strip() for h in header) != MEASUREMENT_CSV_HEADER:
        raise DataFormatError(
            f"line 1: expected header {','.join(MEASUREMENT_CSV_HEADER)!r}, got {','.join(header)!r}"
        )
    times, forces = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise DataFormatError(f"line {lineno}: expected 2 fields, got {len(row)}")
        try:
            t, f = float(row[0]), float(row[1])
        except ValueError:
            raise DataFormatError(f"line {lineno}: non-numeric value in {row!r}") from None
        if not (math.isfinite(t) and math.isfinite(f)):
            raise DataFormatError(f"line {lineno}: non-finite value")
        if times and t <= times[-1]:
            raise DataFormatError(f"line {lineno}: time {t} not after {times[-1]}")
        if f < NOISE_FLOOR_N:
            raise DataFormatError(
                f"line {lineno}: force {f} N below the {NOISE_FLOOR_N} N noise floor"
            )
        times.append(t)
        forces.append(f)
    return MeasurementDataset(np.array(times), np.array(forces), meta)


def _turnaround(force: np.ndarray) -> tuple[int, bool]:
    """Index where the stand reverses and whether the record starts compressing.

    The reversal is the middle of the zero-force plateau (compression first)
    or of the peak-force plateau (return first).
    """
    n = force.size
    if n < 3:
        raise DomainError("stroke detection needs at least 3 samples")
    f_max = force.max()
    span = f_max - force.min()
    if span <= 0.0:
        raise DomainError("stroke detection failed: force is constant")
    tol = ZERO_FORCE_FRACTION * max(abs(f_max), span)
    i_min = int(np.argmin(force))
    i_max = int(np.argmax(force))
    if 0 < i_min < n - 1 and force[0] - force[i_min] > tol and force[-1] - force[i_min] > tol:
        low = force <= force[i_min] + tol
        lo = hi = i_min
        while lo > 0 and low[lo - 1]:
            lo -= 1
        while hi < n - 1 and low[hi + 1]:
            hi += 1
        return (lo + hi) // 2, True
    if 0 < i_max < n - 1 and force[i_max] - force[0] > tol and force[i_max] - force[-1] > tol:
        high = force >= force[i_max] - tol
        lo = hi = i_max
        while lo > 0 and high[lo - 1]:
            lo -= 1
        while hi < n - 1 and high[hi + 1]:
            hi += 1
        return (lo + hi) // 2, False
    raise DomainError("stroke detection failed: force is monotone over the record")


def _average_duplicates(strain: np.ndarray, force: np.ndarray):
    order = np.argsort(strain, kind="stable")
    strain, force = strain[order], force[order]
    keys = np.round(strain, 12)
    uniq, inverse = np.unique(keys, return_inverse=True)
    sums = np.bincount(inverse, weights=force)
    counts = np.bincount(inverse)
    return uniq, sums / counts


def dataset_to_curve(
    ds: MeasurementDataset, stroke: Stroke | str = Stroke.COMPRESSION, label: str | None = None
) -> ForceStrainCurve:
    """Force-strain curve of one stroke, with strain from the travel rate."""
    stroke = Stroke(stroke)
    meta = ds.meta
    k, compress_first = _turnaround(ds.force)
    t0 = ds.time[0]
    t_turn = ds.time[k]
    travel = meta.travel_rate * (t_turn - t0)
    if compress_first:
        pos = np.where(ds.time <= t_turn, ds.time - t0, 2.0 * t_turn - ds.time - t0)
    else:
        pos = np.where(ds.time <= t_turn, t_turn - ds.time, ds.time - t_turn)
    strain = np.clip(meta.travel_rate * pos / meta.l0, 0.0, travel / meta.l0)
    index = np.arange(ds.time.size)
    compression = index <= k if compress_first else index >= k
    if stroke is Stroke.COMPRESSION:
        keep = compression
    elif stroke is Stroke.RETURN:
        keep = ~compression | (index == k)
    else:
        keep = np.ones(ds.time.size, dtype=bool)
    strain, force = _average_duplicates(strain[keep], np.clip(ds.force[keep], 0.0, None))
    if label is None:
        label = f"fr={meta.fold_ratio:g}"
    return ForceStrainCurve(strain, force, meta.pressure, label, meta.fold_ratio)


def default_seed() -> int:
    """Seed from ``FOLDPAM_SEED`` (0 when unset)."""
    raw = os.environ.get("FOLDPAM_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"FOLDPAM_SEED must be an integer, got {raw!r}") from None


def synthesize_measurements(
    force_fn: Callable[[float], float],
    max_strain: float,
    meta: DatasetMeta,
    noise_n: float = 0.0,
    seed: int | None = None,
) -> MeasurementDataset:
    """Simulated test-stand record: compress to ``max_strain`` and return.

    ``force_fn`` maps strain to force. Gaussian gauge noise of standard
    deviation ``noise_n`` is added and readings are clipped at the noise floor.
    """
    if seed is None:
        seed = default_seed()
    step = meta.travel_rate / meta.sample_rate / meta.l0
    n_half = int(math.floor(max_strain / step + 1e-9))
    down = np.arange(n_half + 1) * step
    path = np.concatenate([down, down[-2::-1]])
    force = np.array([max(force_fn(e), 0.0) for e in path])
    if noise_n > 0.0:
        rng = np.random.default_rng(seed)
        force = np.maximum(force + rng.normal(0.0, noise_n, force.size), NOISE_FLOOR_N)
    time = np.arange(path.size) / meta.sample_rate
    return MeasurementDataset(time, force, meta)
