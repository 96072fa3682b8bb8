"""Curve families and the area they sweep on the force-strain plane.

The swept region of a family ordered by fold ratio is the union of strips
between consecutive curves. A strip is the closed polygon running along one
curve, across the zero-force ends, back along the next curve and across the
starting ends. Self-intersecting strips (crossing curves) count area by the
even-odd rule.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import shapely

from .curves import ZERO_FORCE_FRACTION, ForceStrainCurve
from .errors import DomainError, FoldpamError
from .geometry import MAX_FOLD_RATIO, Geometry
from .models import DEFAULT_THETA_MIN, ModelKind, sample_curve

__all__ = [
    "RESAMPLE_POINTS",
    "RegionArea",
    "FamilyMemberError",
    "curve_family",
    "strip_rings",
    "design_space_area",
    "normalized_area",
    "curve_extrema",
]

RESAMPLE_POINTS = 512


class FamilyMemberError(FoldpamError):
    """One member of a curve family could not be generated."""

    def __init__(self, fold_ratio: float, cause: Exception):
        super().__init__(f"family member fr={fold_ratio:g} failed: {cause}")
        self.fold_ratio = fold_ratio
        self.cause = cause


@dataclass(frozen=True)
class RegionArea:
    """Swept area in newtons (strain is dimensionless) and its normalized form."""

    area: float
    normalized: float | None = None
    curve_labels: tuple[str, ...] = field(default=())

    def to_json(self) -> str:
        doc = {
            "area_n": self.area,
            "a_d_prime": self.normalized,
            "curve_labels": list(self.curve_labels),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def curve_family(
    base: Geometry,
    P: float,
    fr_values,
    policy: ModelKind | str = ModelKind.STAGED,
    n: int = 101,
    theta_min: float = DEFAULT_THETA_MIN,
) -> list[ForceStrainCurve]:
    """One sampled curve per fold ratio, ordered by fold ratio."""
    fr_values = sorted(float(fr) for fr in fr_values)
    if not fr_values:
        raise DomainError("empty fold-ratio family")
    for fr in fr_values:
        if not 0.0 <= fr <= MAX_FOLD_RATIO:
            raise DomainError(f"fold ratio {fr!r} outside [0, {MAX_FOLD_RATIO}]")
    curves = []
    for fr in fr_values:
        try:
            geom = base.with_fold_ratio(fr)
            curves.append(
                sample_curve(policy, geom, P, n=n, theta_min=theta_min, label=f"fr={fr:g}")
            )
        except FoldpamError as exc:
            raise FamilyMemberError(fr, exc) from exc
    return curves


def _canonical(curves) -> list[ForceStrainCurve]:
    return sorted(curves, key=ForceStrainCurve.sort_key)


def strip_rings(curves, n_resample: int = RESAMPLE_POINTS) -> list[np.ndarray]:
    """Closed strip polygons (as vertex arrays) between consecutive curves."""
    ordered = [c.resample(n_resample) for c in _canonical(curves)]
    rings = []
    for lower, upper in zip(ordered[:-1], ordered[1:]):
        a = np.column_stack([lower.strain, lower.force])
        b = np.column_stack([upper.strain, upper.force])[::-1]
        rings.append(np.vstack([a, b]))
    return rings


def _crossings_inside(ring: np.ndarray, x: float, y: float) -> bool:
    xs, ys = ring[:, 0], ring[:, 1]
    xn, yn = np.roll(xs, -1), np.roll(ys, -1)
    straddles = (ys > y) != (yn > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = xs + (y - ys) * (xn - xs) / (yn - ys)
    return bool(np.count_nonzero(straddles & (x < x_cross)) % 2)


def _even_odd_region(ring: np.ndarray):
    """Faces of a possibly self-intersecting ring that lie inside by even-odd."""
    closed = np.vstack([ring, ring[:1]])
    noded = shapely.node(shapely.LineString(closed))
    faces = shapely.get_parts(shapely.polygonize(shapely.get_parts(noded)))
    kept = []
    for face in faces:
        if face.area <= 0.0:
            continue
        p = face.representative_point()
        if _crossings_inside(ring, p.x, p.y):
            kept.append(face)
    return kept


def _ring_area(coords) -> float:
    xy = np.asarray(coords, dtype=float)
    x, y = xy[:, 0], xy[:, 1]
    terms = np.concatenate([x[:-1] * y[1:], -(y[:-1] * x[1:])])
    return 0.5 * abs(math.fsum(terms))


def _polygon_area(region) -> float:
    """Shoelace area of a (multi)polygon with compensated summation."""
    total = 0.0
    for poly in shapely.get_parts(region):
        if poly.is_empty:
            continue
        total += _ring_area(poly.exterior.coords)
        total -= sum(_ring_area(r.coords) for r in poly.interiors)
    return total


def design_space_area(
    curves,
    geom: Geometry | None = None,
    n_resample: int = RESAMPLE_POINTS,
    same_pressure: bool = True,
) -> RegionArea:
    """Area swept by a curve family; normalized when ``geom`` is given.

    ``same_pressure=False`` admits families that vary pressure instead of fold
    ratio (a pressure-control workspace); such families are not normalized.
    """
    curves = list(curves)
    if len(curves) < 2:
        raise DomainError("a design space needs at least two curves")
    pressures = {c.pressure for c in curves}
    if same_pressure and len(pressures) > 1:
        raise DomainError(f"mixed-pressure family: {sorted(pressures)}")
    faces = []
    for ring in strip_rings(curves, n_resample):
        faces.extend(_even_odd_region(ring))
    area = _polygon_area(shapely.union_all(faces)) if faces else 0.0
    labels = tuple(c.label for c in _canonical(curves))
    normalized = None
    if geom is not None and len(pressures) == 1:
        normalized = normalized_area(area, geom, pressures.pop())
    return RegionArea(area, normalized, labels)


def normalized_area(area: float, geom: Geometry, P: float) -> float:
    """Area divided by ``a_r * W0**2 * P``."""
    if not P > 0.0:
        raise DomainError(f"pressure must be positive, got {P!r}")
    if not area >= 0.0:
        raise DomainError(f"area must be nonnegative, got {area!r}")
    return area / (geom.aspect_ratio * geom.W0**2 * P)


def curve_extrema(curve: ForceStrainCurve) -> tuple[float, float]:
    """``(eps_max, F_max)``: largest zero-force strain and largest force."""
    if len(curve) < 2:
        raise DomainError("curve extrema need at least two points")
    f_max = float(curve.force.max())
    zero = curve.force <= ZERO_FORCE_FRACTION * f_max
    eps_max = float(curve.strain[zero].max()) if zero.any() else float(curve.strain[-1])
    if not math.isfinite(eps_max):
        raise DomainError("non-finite strain")
    return eps_max, f_max
