"""Incomplete elliptic integrals and a bracketing scalar root finder.

The integrals use the parameter convention ``F(phi | m)`` with ``m = k**2`` and
are evaluated through Carlson's symmetric forms R_F and R_D (duplication
algorithm with a closing Taylor series).

References:
    B. C. Carlson, "Numerical computation of real or complex elliptic
    integrals", Numer. Algorithms 10 (1995).
"""

from __future__ import annotations

import math
from typing import Callable

from scipy import optimize

from .errors import DomainError, RootFindingError, SingularityError

__all__ = [
    "ellip_f",
    "ellip_e",
    "ellip_f_minus_e",
    "carlson_rf",
    "carlson_rd",
    "find_root_bracketed",
]

_EPS = 2.220446049250313e-16
_HALF_PI = 0.5 * math.pi


def carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson's symmetric integral R_F(x, y, z) for nonnegative arguments.

    At most one argument may be zero.
    """
    if min(x, y, z) < 0.0:
        raise DomainError("R_F requires nonnegative arguments")
    if (x == 0.0) + (y == 0.0) + (z == 0.0) > 1:
        raise SingularityError("R_F diverges when two arguments vanish")

    x0, y0 = x, y
    a0 = (x + y + z) / 3.0
    q = (3.0 * _EPS) ** (-1.0 / 8.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a = a0
    scale = 1.0
    while q >= abs(a):
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x = 0.25 * (x + lam)
        y = 0.25 * (y + lam)
        z = 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        q *= 0.25
        scale *= 4.0

    dx = (a0 - x0) / (a * scale)
    dy = (a0 - y0) / (a * scale)
    dz = -(dx + dy)
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    series = (
        1.0
        - e2 / 10.0
        + e3 / 14.0
        + e2 * e2 / 24.0
        - 3.0 * e2 * e3 / 44.0
        - 5.0 * e2**3 / 208.0
        + 3.0 * e3 * e3 / 104.0
        + e2 * e2 * e3 / 16.0
    )
    return series / math.sqrt(a)


def carlson_rd(x: float, y: float, z: float) -> float:
    """Carlson's degenerate integral R_D(x, y, z); needs z > 0 and x + y > 0."""
    if min(x, y) < 0.0 or z <= 0.0:
        raise DomainError("R_D requires x, y >= 0 and z > 0")
    if x + y == 0.0:
        raise SingularityError("R_D diverges when x = y = 0")

    x0, y0 = x, y
    a0 = (x + y + 3.0 * z) / 5.0
    q = (0.25 * _EPS) ** (-1.0 / 6.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a = a0
    scale = 1.0
    tail = 0.0
    while q >= abs(a):
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        tail += 1.0 / (scale * sz * (z + lam))
        x = 0.25 * (x + lam)
        y = 0.25 * (y + lam)
        z = 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        q *= 0.25
        scale *= 4.0

    dx = (a0 - x0) / (a * scale)
    dy = (a0 - y0) / (a * scale)
    dz = -(dx + dy) / 3.0
    xy = dx * dy
    z2 = dz * dz
    e2 = xy - 6.0 * z2
    e3 = (3.0 * xy - 8.0 * z2) * dz
    e4 = 3.0 * (xy - z2) * z2
    e5 = xy * z2 * dz
    series = (
        1.0
        - 3.0 * e2 / 14.0
        + e3 / 6.0
        + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0
    )
    return series / (scale * a * math.sqrt(a)) + 3.0 * tail


def _check_args(phi: float, m: float) -> None:
    if not (math.isfinite(phi) and math.isfinite(m)):
        raise DomainError(f"non-finite elliptic arguments phi={phi!r}, m={m!r}")
    if not 0.0 <= phi <= _HALF_PI:
        raise DomainError(f"phi={phi!r} outside [0, pi/2]")
    if not 0.0 <= m <= 1.0:
        raise DomainError(f"m={m!r} outside [0, 1]")


def _reduced_args(phi: float, m: float) -> tuple[float, float, float]:
    s = math.sin(phi)
    c = math.cos(phi)
    # 1 - m sin^2 written to keep relative accuracy as m -> 1, phi -> pi/2
    delta2 = c * c + (1.0 - m) * s * s
    return s, c * c, delta2


def ellip_f(phi: float, m: float) -> float:
    """Incomplete elliptic integral of the first kind, F(phi | m)."""
    _check_args(phi, m)
    if phi == 0.0:
        return 0.0
    if m == 1.0 and phi == _HALF_PI:
        raise SingularityError("F(pi/2 | 1) diverges")
    s, c2, delta2 = _reduced_args(phi, m)
    return s * carlson_rf(c2, delta2, 1.0)


def ellip_e(phi: float, m: float) -> float:
    """Incomplete elliptic integral of the second kind, E(phi | m)."""
    _check_args(phi, m)
    if phi == 0.0:
        return 0.0
    if m == 0.0:
        return phi
    s, c2, delta2 = _reduced_args(phi, m)
    if m == 1.0:
        return s
    return s * carlson_rf(c2, delta2, 1.0) - m * s**3 * carlson_rd(c2, delta2, 1.0) / 3.0


def ellip_f_minus_e(phi: float, m: float) -> float:
    """``F(phi | m) - E(phi | m)`` without cancellation for small ``m`` or ``phi``."""
    _check_args(phi, m)
    if phi == 0.0 or m == 0.0:
        return 0.0
    if m == 1.0 and phi == _HALF_PI:
        raise SingularityError("F(pi/2 | 1) diverges")
    s, c2, delta2 = _reduced_args(phi, m)
    return m * s**3 * carlson_rd(c2, delta2, 1.0) / 3.0


def find_root_bracketed(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    maxiter: int = 200,
) -> float:
    """Root of ``f`` inside ``[lo, hi]`` by Brent's method.

    ``f(lo)`` and ``f(hi)`` must differ in sign (a zero at either end is
    accepted). The result stays inside the bracket and is reproducible for
    identical inputs.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise RootFindingError(f"invalid bracket [{lo!r}, {hi!r}]")
    if not tol > 0.0:
        raise RootFindingError(f"tolerance must be positive, got {tol!r}")
    flo = f(lo)
    if flo == 0.0:
        return lo
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    if not (math.isfinite(flo) and math.isfinite(fhi)) or (flo > 0.0) == (fhi > 0.0):
        raise RootFindingError(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={flo!r}, f(hi)={fhi!r}"
        )
    try:
        root, info = optimize.brentq(
            f, lo, hi, xtol=tol, maxiter=maxiter, full_output=True, disp=False
        )
    except (ValueError, RuntimeError) as exc:
        raise RootFindingError(str(exc)) from exc
    if not info.converged:
        raise RootFindingError(
            f"no convergence after {info.iterations} iterations ({info.flag})"
        )
    return min(max(root, lo), hi)
