"""Analytic force-strain models of a folded pouch actuator.

Two limiting states are modelled:

* the ideal pouch motor, whose inflated section is a pair of circular arcs of
  film length ``l0``, parameterized by the half arc angle ``theta``;
* the highly constricted (fully folded) state, approximated by the
  serial/pleated PAM model whose shape parameters ``(m, phi)`` solve a pair of
  incomplete elliptic integral constraints.

Both forces are linear in pressure.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .curves import ForceStrainCurve
from .errors import DomainError, NoSolutionError, OutOfRangeError, RootFindingError
from .geometry import MAX_FOLD_RATIO, Geometry, OperatingPoint, wf_circ
from .special import ellip_e, ellip_f, ellip_f_minus_e, find_root_bracketed

__all__ = [
    "DEFAULT_THETA_MIN",
    "POUCH_MAX_STRAIN",
    "ModelKind",
    "pouch_width",
    "pouch_strain",
    "pouch_force",
    "pouch_point",
    "pouch_theta_at_strain",
    "pouch_force_at_strain",
    "pouch_volume",
    "ppam_constraint_residuals",
    "ppam_max_strain",
    "ppam_solve",
    "ppam_force_at_strain",
    "force_at_strain",
    "max_strain",
    "min_strain",
    "sample_curve",
]

_HALF_PI = 0.5 * math.pi

#: Smallest arc half-angle used by default; the pouch force diverges at zero.
DEFAULT_THETA_MIN = 1e-3

#: Strain of the ideal pouch motor at zero force, ``1 - 2/pi``.
POUCH_MAX_STRAIN = 1.0 - 2.0 / math.pi

# below this the power series of 1 - sin(t)/t is used
_SERIES_CUTOFF = 0.5
_PPAM_M_FLOOR = 1e-16


class ModelKind(str, Enum):
    """Force model selector.

    ``POUCH_NONIDEAL`` and ``STAGED`` are exploratory compositions, not
    published models: the first uses the folded width ``W0 - wf`` in the
    pouch formula, the second uses ``W0 - min(wf, wf_circ)`` below the folding
    limit and the constricted model at it.
    """

    POUCH = "pouch"
    POUCH_NONIDEAL = "pouch-nonideal"
    PPAM = "ppam"
    STAGED = "staged"
    SURROGATE = "surrogate"


def _check_pressure(P: float) -> float:
    P = float(P)
    if not math.isfinite(P) or P <= 0.0:
        raise DomainError(f"pressure must be positive, got {P!r}")
    return P


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not (0.0 < theta <= _HALF_PI):
        raise DomainError(f"theta={theta!r} outside (0, pi/2]")
    return theta


# ---------------------------------------------------------------- pouch motor


def pouch_width(geom: Geometry, ideal: bool = True) -> float:
    """Width entering the pouch formula.

    The ideal state always uses ``W0 - wf_circ(l0)``; ``ideal=False`` uses the
    geometry's own ``W0 - wf``.
    """
    width = geom.W0 - wf_circ(geom.l0) if ideal else geom.width
    if width <= 0.0:
        raise OutOfRangeError(
            f"effective pouch width {width:.4g} m is not positive "
            f"(W0={geom.W0}, l0={geom.l0}, wf={geom.wf})"
        )
    return width


def pouch_strain(theta: float) -> float:
    """``1 - sin(theta)/theta``, accurate down to tiny angles."""
    theta = _check_theta(theta)
    if theta >= _SERIES_CUTOFF:
        return 1.0 - math.sin(theta) / theta
    t2 = theta * theta
    total = 0.0
    term = 1.0
    k = 1
    # sum_{k>=1} (-1)^{k+1} t^{2k} / (2k+1)!
    while True:
        term *= t2 / ((2 * k) * (2 * k + 1))
        total += term if k % 2 else -term
        if term < 1e-18 * total:
            return total
        k += 1


def pouch_force(geom: Geometry, P: float, theta: float, ideal: bool = True) -> float:
    theta = _check_theta(theta)
    P = _check_pressure(P)
    if theta == _HALF_PI:
        return 0.0
    return pouch_width(geom, ideal) * geom.l0 * P * math.cos(theta) / theta


def pouch_point(geom: Geometry, P: float, theta: float, ideal: bool = True) -> OperatingPoint:
    """Strain and force of the pouch motor at arc half-angle ``theta``."""
    return OperatingPoint(pouch_strain(theta), pouch_force(geom, P, theta, ideal), float(P))


def pouch_theta_at_strain(eps: float, theta_min: float = DEFAULT_THETA_MIN) -> float:
    eps = float(eps)
    eps_min = pouch_strain(theta_min)
    if not math.isfinite(eps) or eps > POUCH_MAX_STRAIN:
        raise OutOfRangeError(
            f"strain {eps!r} exceeds the pouch maximum 1 - 2/pi = {POUCH_MAX_STRAIN:.6f}"
        )
    if eps < eps_min:
        raise OutOfRangeError(
            f"strain {eps!r} below the clipped minimum {eps_min:.3g} (theta_min={theta_min})"
        )
    if eps == POUCH_MAX_STRAIN:
        return _HALF_PI
    return find_root_bracketed(
        lambda t: pouch_strain(t) - eps, theta_min, _HALF_PI, tol=1e-15
    )


def pouch_force_at_strain(
    geom: Geometry,
    P: float,
    eps: float,
    theta_min: float = DEFAULT_THETA_MIN,
    ideal: bool = True,
) -> float:
    """Pouch force at a given strain, inverting the strain relation for theta."""
    return pouch_force(geom, P, pouch_theta_at_strain(eps, theta_min), ideal)


def pouch_volume(geom: Geometry, theta: float, ideal: bool = True) -> float:
    """Inflated volume: lens cross-section of two arcs times the pouch width."""
    theta = _check_theta(theta)
    lens = geom.l0**2 * (theta - math.sin(theta) * math.cos(theta)) / (2.0 * theta**2)
    return pouch_width(geom, ideal) * lens


# ------------------------------------------------------- constricted (sPAM)


def _check_slenderness(l0_over_h: float) -> float:
    l0_over_h = float(l0_over_h)
    if not math.isfinite(l0_over_h) or l0_over_h <= 1.0:
        raise DomainError(f"l0/h must exceed 1, got {l0_over_h!r}")
    return l0_over_h


def _ppam_phi(m: float, ratio: float) -> float:
    # F(phi|m) = ratio * sqrt(m) * cos(phi); negative at 0, K(m) > 0 at pi/2
    root_m = math.sqrt(m)
    return find_root_bracketed(
        lambda p: ellip_f(p, m) - ratio * root_m * math.cos(p), 0.0, _HALF_PI, tol=1e-15
    )


def _ppam_strain_at_m(m: float, ratio: float) -> tuple[float, float]:
    phi = _ppam_phi(m, ratio)
    return 2.0 * ellip_f_minus_e(phi, m) / ellip_f(phi, m), phi


def ppam_max_strain(l0_over_h: float) -> float:
    """Zero-force strain of the constricted model (``m = 1/2``)."""
    return _ppam_strain_at_m(0.5, _check_slenderness(l0_over_h))[0]


def ppam_constraint_residuals(
    l0_over_h: float, eps: float, m: float, phi: float
) -> tuple[float, float]:
    """Relative residuals of the two elliptic-integral shape constraints."""
    denom = math.sqrt(m) * math.cos(phi)
    r_e = ellip_e(phi, m) / denom / (l0_over_h * (1.0 - 0.5 * eps)) - 1.0
    r_f = ellip_f(phi, m) / denom / l0_over_h - 1.0
    return r_e, r_f


def ppam_solve(l0_over_h: float, eps: float) -> tuple[float, float]:
    """Shape parameters ``(m, phi)`` of the constricted model at strain ``eps``.

    For each ``m`` the length constraint fixes ``phi`` (a bracketed 1-D solve);
    the contraction constraint then fixes ``m`` on ``(0, 1/2]``.
    """
    ratio = _check_slenderness(l0_over_h)
    eps = float(eps)
    if not math.isfinite(eps) or eps <= 0.0:
        raise NoSolutionError(f"strain must be positive for the constricted model, got {eps!r}")
    eps_max, phi_max = _ppam_strain_at_m(0.5, ratio)
    if eps > eps_max:
        raise NoSolutionError(
            f"strain {eps!r} exceeds the zero-force strain {eps_max:.6f} at l0/h={ratio}"
        )
    if eps == eps_max:
        return 0.5, phi_max
    eps_floor = _ppam_strain_at_m(_PPAM_M_FLOOR, ratio)[0]
    if eps <= eps_floor:
        raise NoSolutionError(f"strain {eps!r} too small to bracket (floor {eps_floor:.3g})")
    try:
        m = find_root_bracketed(
            lambda mm: _ppam_strain_at_m(mm, ratio)[0] - eps, _PPAM_M_FLOOR, 0.5, tol=1e-16
        )
    except RootFindingError as exc:
        raise NoSolutionError(str(exc)) from exc
    return m, _ppam_phi(m, ratio)


def ppam_force_at_strain(geom: Geometry, P: float, eps: float) -> float:
    P = _check_pressure(P)
    m, phi = ppam_solve(geom.l0 / geom.h, eps)
    if m >= 0.5:
        return 0.0
    return math.pi * P * geom.h**2 * (1.0 - 2.0 * m) / (2.0 * m * math.cos(phi) ** 2)


# ------------------------------------------------------------ dispatch


def _resolve(model: ModelKind | str, geom: Geometry) -> tuple[ModelKind, bool]:
    """Concrete analytic model and pouch-width flag for a selector."""
    kind = ModelKind(model)
    if kind is ModelKind.STAGED:
        if geom.fold_ratio >= MAX_FOLD_RATIO - 1e-9:
            return ModelKind.PPAM, True
        # W0 - min(wf, wf_circ): the ideal width once the section can go circular
        return ModelKind.POUCH, geom.wf >= wf_circ(geom.l0)
    if kind is ModelKind.POUCH_NONIDEAL:
        return ModelKind.POUCH, False
    if kind is ModelKind.SURROGATE:
        raise DomainError("the surrogate model needs a fitted surrogate; use SurrogateModel")
    return kind, True


def max_strain(model: ModelKind | str, geom: Geometry) -> float:
    kind, _ = _resolve(model, geom)
    if kind is ModelKind.PPAM:
        return ppam_max_strain(geom.l0 / geom.h)
    return POUCH_MAX_STRAIN


def min_strain(theta_min: float = DEFAULT_THETA_MIN) -> float:
    """Smallest strain sampled, the pouch strain at ``theta_min``."""
    return pouch_strain(theta_min)


def force_at_strain(
    model: ModelKind | str,
    geom: Geometry,
    P: float,
    eps: float,
    theta_min: float = DEFAULT_THETA_MIN,
) -> float:
    """Force of an analytic model at one strain."""
    kind, ideal = _resolve(model, geom)
    if kind is ModelKind.PPAM:
        return ppam_force_at_strain(geom, P, eps)
    return pouch_force_at_strain(geom, P, eps, theta_min, ideal)


def sample_curve(
    model: ModelKind | str,
    geom: Geometry,
    P: float,
    n: int = 101,
    theta_min: float = DEFAULT_THETA_MIN,
    label: str | None = None,
    surrogate=None,
) -> ForceStrainCurve:
    """``n`` equally spaced strains from the clipped minimum to the zero-force strain."""
    if n < 2:
        raise DomainError(f"need at least 2 samples, got {n}")
    P = _check_pressure(P)
    if label is None:
        label = f"{ModelKind(model).value} fr={geom.fold_ratio:.4g}"
    if ModelKind(model) is ModelKind.SURROGATE:
        if surrogate is None:
            raise DomainError("sample_curve(surrogate) needs a fitted surrogate")
        return surrogate.curve(geom.fold_ratio, P, n=n, label=label)

    eps_lo = min_strain(theta_min)
    eps_hi = max_strain(model, geom)
    if eps_lo >= eps_hi:
        raise OutOfRangeError(f"clipped minimum strain {eps_lo:.3g} exceeds model maximum")
    strain = np.linspace(eps_lo, eps_hi, n)
    strain[-1] = eps_hi
    force = np.array([force_at_strain(model, geom, P, e, theta_min) for e in strain])
    return ForceStrainCurve(strain, force, P, label, geom.fold_ratio)
