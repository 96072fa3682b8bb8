"""Quasi-static actuator plant with servo, valve and PI controller models.

At every control tick the actuator is assumed to settle instantly: the strain
is the one at which the force model balances the hanging load. Position is the
actuator length ``z = l0 * (1 - eps)``, so contraction lifts the load and a
heavier load lengthens the actuator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Protocol

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError
from .geometry import MAX_FOLD_RATIO, Geometry
from .models import DEFAULT_THETA_MIN, ModelKind, force_at_strain, max_strain, min_strain
from .special import find_root_bracketed

__all__ = [
    "ServoModel",
    "ValveModel",
    "PiController",
    "Equilibrium",
    "ForceModel",
    "AnalyticForceModel",
    "CallableForceModel",
    "servo_step",
    "valve_step",
    "pi_update",
    "leak_map",
    "plant_equilibrium",
]

SERVO_MAX_DEG = 160.0


# ---------------------------------------------------------------- actuators


@dataclass(frozen=True)
class ServoModel:
    """Fold servo with rate limit and tendon backlash.

    ``angle`` is the servo shaft angle. ``output_angle`` is the angle the fold
    actually follows. It stays put until the shaft has been moving for a
    cumulative ``backlash_dead_time`` seconds (tendon and pouch slack taken
    up), then tracks the shaft at the same rate limit. Pouch pressure keeps
    the tendons taut afterwards, so reversals do not reopen the slack.
    ``angle_to_wf`` holds ascending polynomial coefficients mapping degrees
    to folded width in meters.
    """

    angle: float = 0.0
    rate_limit: float = 160.0
    backlash_dead_time: float = 0.2
    angle_to_wf: tuple[float, ...] = (0.0, 0.067 / SERVO_MAX_DEG)
    output_angle: float = 0.0
    slack_time: float = 0.0
    clamped: bool = False

    def __post_init__(self):
        if not self.rate_limit > 0.0:
            raise DomainError("servo rate_limit must be positive")
        if self.backlash_dead_time < 0.0:
            raise DomainError("servo dead time must be nonnegative")
        grid = np.linspace(0.0, SERVO_MAX_DEG, 161)
        if np.any(np.diff(npoly.polyval(grid, self.angle_to_wf)) < -1e-15):
            raise DomainError("angle_to_wf must be nondecreasing on [0, 160] deg")

    @property
    def engaged(self) -> bool:
        return self.slack_time >= self.backlash_dead_time

    @property
    def wf(self) -> float:
        return float(npoly.polyval(self.output_angle, self.angle_to_wf))

    @property
    def wf_max(self) -> float:
        return float(npoly.polyval(SERVO_MAX_DEG, self.angle_to_wf))


def servo_step(s: ServoModel, cmd: float, dt: float) -> ServoModel:
    """Advance the servo one step toward ``cmd`` degrees."""
    if not dt > 0.0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    clamped = not 0.0 <= cmd <= SERVO_MAX_DEG
    cmd = min(max(cmd, 0.0), SERVO_MAX_DEG)
    max_move = s.rate_limit * dt
    delta = min(max(cmd - s.angle, -max_move), max_move)
    angle = s.angle + delta

    moving = abs(delta) / s.rate_limit
    slack = s.slack_time + moving
    if slack < s.backlash_dead_time:
        allowance = 0.0
    else:
        take_up = min(max(s.backlash_dead_time - s.slack_time, 0.0), moving)
        allowance = s.rate_limit * (dt - take_up)
    gap = angle - s.output_angle
    out_move = math.copysign(min(abs(gap), allowance), gap)
    return replace(
        s,
        angle=angle,
        output_angle=s.output_angle + out_move,
        slack_time=min(slack, max(s.backlash_dead_time, s.slack_time)),
        clamped=clamped,
    )


def leak_map(cmd_lo: float, act_lo: float, cmd_hi: float, act_hi: float) -> tuple[float, float]:
    """Affine ``actual = a * commanded + b`` through two endpoint pairs."""
    a = (act_hi - act_lo) / (cmd_hi - cmd_lo)
    return a, act_lo - a * cmd_lo


_LEAK_A, _LEAK_B = leak_map(6.9e3, 3.9e3, 27.6e3, 16.7e3)


@dataclass(frozen=True)
class ValveModel:
    """Supply-side pressure regulator feeding a leaky pouch.

    The supply command saturates to ``[sat_lo, sat_hi]``; the pouch pressure
    relaxes toward ``leak_gain * commanded + leak_offset`` with a first-order
    lag.
    """

    commanded: float = 6.9e3
    actual: float = 3.9e3
    leak_gain: float = _LEAK_A
    leak_offset: float = _LEAK_B
    sat_lo: float = 6.9e3
    sat_hi: float = 27.6e3
    time_constant: float = 0.25

    def __post_init__(self):
        if not self.sat_lo < self.sat_hi:
            raise DomainError("valve saturation needs sat_lo < sat_hi")
        if not 0.0 < self.leak_gain <= 1.0:
            raise DomainError("valve leak gain must lie in (0, 1]")
        if self.time_constant < 0.0:
            raise DomainError("valve time constant must be nonnegative")

    def steady_state(self, cmd: float) -> float:
        cmd = min(max(cmd, self.sat_lo), self.sat_hi)
        return self.leak_gain * cmd + self.leak_offset

    def command_for(self, actual: float) -> float:
        """Supply command whose steady state is ``actual``."""
        return (actual - self.leak_offset) / self.leak_gain

    @property
    def actual_range(self) -> tuple[float, float]:
        return self.steady_state(self.sat_lo), self.steady_state(self.sat_hi)


def valve_step(v: ValveModel, cmd: float, dt: float) -> ValveModel:
    if not dt > 0.0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    commanded = min(max(cmd, v.sat_lo), v.sat_hi)
    target = v.leak_gain * commanded + v.leak_offset
    if v.time_constant == 0.0:
        actual = target
    else:
        actual = v.actual + (target - v.actual) * -math.expm1(-dt / v.time_constant)
    return replace(v, commanded=commanded, actual=actual)


@dataclass(frozen=True)
class PiController:
    """Discrete PI law with output clamping.

    With ``anti_windup`` the integral is frozen on steps whose output would
    saturate.
    """

    kp: float
    ki: float
    out_lo: float
    out_hi: float
    integral: float = 0.0
    anti_windup: bool = True

    def __post_init__(self):
        if not self.out_lo < self.out_hi:
            raise DomainError("controller needs out_lo < out_hi")

    def bumpless(self, output: float) -> "PiController":
        """Controller whose zero-error output equals ``output``."""
        if self.ki == 0.0:
            return self
        return replace(self, integral=output / self.ki)


def pi_update(c: PiController, setpoint: float, measurement: float, dt: float):
    """Return ``(command, controller)`` after one control step."""
    if not dt > 0.0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    e = setpoint - measurement
    integral = c.integral + e * dt
    raw = c.kp * e + c.ki * integral
    if c.anti_windup and not c.out_lo <= raw <= c.out_hi:
        integral = c.integral
        raw = c.kp * e + c.ki * integral
    command = min(max(raw, c.out_lo), c.out_hi) + 0.0  # no negative zero
    return command, replace(c, integral=integral)


# ---------------------------------------------------------------- the plant


class ForceModel(Protocol):
    def force(self, fr: float, eps: float, P: float) -> float: ...

    def strain_range(self, fr: float) -> tuple[float, float]: ...


@dataclass(frozen=True)
class CallableForceModel:
    """Adapter for a plain ``f(fr, eps, P)`` with fixed strain bounds."""

    fn: Callable[[float, float, float], float]
    eps_lo: float
    eps_hi: float

    def force(self, fr, eps, P):
        return float(self.fn(fr, eps, P))

    def strain_range(self, fr):
        return self.eps_lo, self.eps_hi


@dataclass(frozen=True)
class AnalyticForceModel:
    """Analytic model evaluated at the geometry re-folded to ``fr``.

    A real pouch stretches past the geometric folding limit; the analytic
    models cannot, so fold ratios above ``MAX_FOLD_RATIO`` are evaluated at
    the limit.
    """

    geom: Geometry
    model: ModelKind = ModelKind.POUCH_NONIDEAL
    theta_min: float = DEFAULT_THETA_MIN

    def _geom(self, fr: float) -> Geometry:
        return self.geom.with_fold_ratio(min(fr, MAX_FOLD_RATIO))

    def force(self, fr, eps, P):
        return force_at_strain(self.model, self._geom(fr), P, eps, self.theta_min)

    def strain_range(self, fr):
        return min_strain(self.theta_min), max_strain(self.model, self._geom(fr))


@dataclass(frozen=True)
class Equilibrium:
    strain: float
    saturated: bool
    force: float

    def position(self, l0: float) -> float:
        return l0 * (1.0 - self.strain)


def plant_equilibrium(model: ForceModel, fr: float, P: float, load: float) -> Equilibrium:
    """Strain at which the actuator force balances ``load``.

    A load above the force available at the smallest modelled strain cannot
    be held; the result is pinned there and flagged ``saturated``.
    """
    if not load >= 0.0:
        raise DomainError(f"load must be nonnegative, got {load!r}")
    lo, hi = model.strain_range(fr)
    f_lo = model.force(fr, lo, P)
    if load >= f_lo:
        return Equilibrium(lo, load > f_lo, f_lo)
    eps = find_root_bracketed(lambda e: model.force(fr, e, P) - load, lo, hi, tol=1e-13)
    return Equilibrium(eps, False, model.force(fr, eps, P))
