"""Scenario configuration and the stepwise simulation loop.

Three scenarios are built in:

``open-loop-ramp``
    fold servo driven from 0 to 160 deg at 8.0 kPa with only the device's own
    weight (about 1 N) hanging from it;
``geometry-step-load``
    PI position control through the fold servo at a constant 3.9 kPa while a
    1.47 N load is added;
``pressure-step-load``
    PI position control through the supply pressure at zero fold under the
    same load step. The leaky pouch tops out at 16.7 kPa, below what the load
    requires, so an error remains.

The default plant is a surrogate over a family of linear force-strain curves
whose zero-force strain grows and whose peak force falls with fold ratio. The
device dimensions, curve family and PI gains are illustrative values.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .control import (
    SERVO_MAX_DEG,
    AnalyticForceModel,
    PiController,
    ServoModel,
    ValveModel,
    leak_map,
    pi_update,
    plant_equilibrium,
    servo_step,
    valve_step,
)
from .curves import ForceStrainCurve
from .errors import DomainError, InfeasibleScenarioError
from .geometry import make_geometry
from .measurements import default_seed
from .models import ModelKind
from .surrogate import SurrogateModel

__all__ = [
    "TRACE_CSV_HEADER",
    "GRAVITY",
    "Channel",
    "ScenarioConfig",
    "SimTrace",
    "builtin_scenario",
    "BUILTIN_SCENARIOS",
    "linear_family",
    "build_plant",
    "run_scenario",
    "position_span",
]

GRAVITY = 9.81
TRACE_CSV_HEADER = (
    "time_s",
    "command",
    "fold_ratio",
    "pressure_kpa",
    "position_mm",
    "load_n",
    "error_mm",
)


class Channel:
    GEOMETRY = "geometry"
    PRESSURE = "pressure"
    OPEN_LOOP = "open-loop-ramp"
    ALL = (GEOMETRY, PRESSURE, OPEN_LOOP)


def linear_family(
    fold_ratios=(0.0, 0.1875, 0.375, 0.5625, 0.75),
    f_max_n=(14.0, 9.8),
    eps_max=(0.15, 0.45),
    p_ref=8.0e3,
    n=64,
) -> list[ForceStrainCurve]:
    """Straight-line curves ``F = F_max (1 - eps / eps_max)``.

    ``F_max`` and ``eps_max`` vary linearly between the given end values
    across the fold-ratio range.
    """
    frs = np.asarray(fold_ratios, dtype=float)
    t = (frs - frs[0]) / (frs[-1] - frs[0])
    curves = []
    for fr, ti in zip(frs, t):
        fm = f_max_n[0] + ti * (f_max_n[1] - f_max_n[0])
        em = eps_max[0] + ti * (eps_max[1] - eps_max[0])
        strain = np.linspace(0.0, em, n)
        curves.append(ForceStrainCurve(strain, fm * (1.0 - strain / em), p_ref, f"fr={fr:g}", float(fr)))
    return curves


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a simulation run needs; SI units throughout.

    ``plant`` selects the force model: ``{"kind": "linear", ...}`` keyword
    arguments of :func:`linear_family` (pressure as ``p_ref_kpa``),
    ``{"kind": "analytic", "model": "pouch-nonideal"}``, or
    ``{"kind": "surrogate", "surrogate": <SurrogateModel.to_dict()>}``.
    ``schedule`` lists ``(time_s, added_load_n)`` steps on top of
    ``base_load``.
    """

    name: str = "custom"
    channel: str = Channel.GEOMETRY
    plant: dict = field(default_factory=lambda: {"kind": "linear"})
    W0: float = 0.090
    l0: float = 0.050
    h: float | None = None
    pressure: float = 3.9e3
    fold_ratio: float = 0.0
    initial_angle: float = 0.0
    ramp_target: float = SERVO_MAX_DEG
    kp: float = -5.0e3
    ki: float = -5.0e4
    anti_windup: bool = True
    loop_rate: float = 6.0
    duration: float = 10.0
    base_load: float = 0.100 * GRAVITY
    schedule: tuple[tuple[float, float], ...] = ((1.0, 0.150 * GRAVITY),)
    setpoint: float | None = None
    servo_rate_limit: float = 160.0
    servo_dead_time: float = 0.2
    angle_to_wf: tuple[float, ...] = (0.0, 0.067 / SERVO_MAX_DEG)
    valve_cmd_range: tuple[float, float] = (6.9e3, 27.6e3)
    valve_actual_range: tuple[float, float] = (3.9e3, 16.7e3)
    valve_time_constant: float = 0.25
    noise: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        if self.channel not in Channel.ALL:
            raise DomainError(f"unknown control channel {self.channel!r}")
        if not self.loop_rate > 0.0 or not self.duration > 0.0:
            raise DomainError("loop rate and duration must be positive")
        if self.base_load < 0.0 or any(t < 0.0 for t, _ in self.schedule):
            raise DomainError("loads and schedule times must be nonnegative")

    @property
    def dt(self) -> float:
        return 1.0 / self.loop_rate

    def load_at(self, t: float) -> float:
        load = self.base_load
        for t_step, added in self.schedule:
            if t >= t_step - 1e-12:
                load += added
        return load

    # JSON uses lab units: mm, kPa, N, s, deg
    _MM = ("W0", "l0", "h", "setpoint", "noise")
    _KPA = ("pressure",)

    def to_dict(self) -> dict:
        doc = {}
        for f in fields(self):
            value = getattr(self, f.name)
            key = f.name
            if f.name in self._MM:
                key, value = f"{f.name.lower()}_mm", None if value is None else value * 1e3
            elif f.name in self._KPA:
                key, value = f"{f.name}_kpa", value / 1e3
            elif f.name == "angle_to_wf":
                key, value = "angle_to_wf_mm", [c * 1e3 for c in value]
            elif f.name in ("valve_cmd_range", "valve_actual_range"):
                key, value = f"{f.name}_kpa", [v / 1e3 for v in value]
            elif f.name == "schedule":
                value = [list(step) for step in value]
            doc[key] = value
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioConfig":
        base = BUILTIN_SCENARIOS.get(doc.get("base", ""), None)
        kwargs = {} if base is None else asdict(base)
        known = {f.name for f in fields(cls)}
        for key, value in doc.items():
            if key == "base":
                continue
            name = key
            if key.endswith("_mm") and key != "angle_to_wf_mm":
                name = {"w0_mm": "W0", "l0_mm": "l0"}.get(key, key[:-3])
                value = None if value is None else float(value) * 1e-3
            elif key == "angle_to_wf_mm":
                name, value = "angle_to_wf", tuple(float(c) * 1e-3 for c in value)
            elif key in ("valve_cmd_range_kpa", "valve_actual_range_kpa"):
                name, value = key[:-4], tuple(float(v) * 1e3 for v in value)
            elif key.endswith("_kpa"):
                name, value = key[:-4], float(value) * 1e3
            elif key == "schedule":
                value = tuple((float(t), float(load)) for t, load in value)
            if name not in known:
                raise DomainError(f"unknown scenario key {key!r}")
            kwargs[name] = value
        for name in ("schedule", "angle_to_wf", "valve_cmd_range", "valve_actual_range"):
            if name in kwargs and isinstance(kwargs[name], list):
                kwargs[name] = tuple(tuple(v) if isinstance(v, list) else v for v in kwargs[name])
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"scenario config is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise DomainError("scenario config must be a JSON object")
        return cls.from_dict(doc)


BUILTIN_SCENARIOS = {
    "open-loop-ramp": ScenarioConfig(
        name="open-loop-ramp",
        channel=Channel.OPEN_LOOP,
        pressure=8.0e3,
        duration=2.0,
        schedule=(),
    ),
    "geometry-step-load": ScenarioConfig(
        name="geometry-step-load",
        channel=Channel.GEOMETRY,
        pressure=3.9e3,
    ),
    "pressure-step-load": ScenarioConfig(
        name="pressure-step-load",
        channel=Channel.PRESSURE,
        pressure=8.0e3,
        fold_ratio=0.0,
        kp=-1.0e6,
        ki=-6.0e6,
    ),
}


def builtin_scenario(name: str, **overrides) -> ScenarioConfig:
    try:
        cfg = BUILTIN_SCENARIOS[name]
    except KeyError:
        raise DomainError(
            f"unknown scenario {name!r}; choose from {', '.join(BUILTIN_SCENARIOS)}"
        ) from None
    return replace(cfg, **overrides)


def build_plant(cfg: ScenarioConfig):
    spec = dict(cfg.plant)
    kind = spec.pop("kind", "linear")
    if kind == "linear":
        if "p_ref_kpa" in spec:
            spec["p_ref"] = float(spec.pop("p_ref_kpa")) * 1e3
        return SurrogateModel.from_curves(linear_family(**spec))
    if kind == "analytic":
        geom = make_geometry(cfg.W0, cfg.l0, 0.0, cfg.h)
        return AnalyticForceModel(geom, ModelKind(spec.get("model", ModelKind.POUCH_NONIDEAL)))
    if kind == "surrogate":
        return SurrogateModel.from_dict(spec["surrogate"])
    raise DomainError(f"unknown plant kind {kind!r}")


@dataclass(frozen=True, eq=False)
class SimTrace:
    """Per-tick record of a run. Positions and errors in meters, pressure in Pa."""

    name: str
    time: np.ndarray
    command: np.ndarray
    fold_ratio: np.ndarray
    pressure: np.ndarray
    position: np.ndarray
    load: np.ndarray
    error: np.ndarray
    strain: np.ndarray
    saturated: np.ndarray
    setpoint: float | None

    def __len__(self):
        return self.time.size

    def rows(self):
        for i in range(self.time.size):
            yield (
                float(self.time[i]),
                float(self.command[i]),
                float(self.fold_ratio[i]),
                float(self.pressure[i]) / 1e3,
                float(self.position[i]) * 1e3,
                float(self.load[i]),
                float(self.error[i]) * 1e3,
            )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_CSV_HEADER)
        for row in self.rows():
            writer.writerow([repr(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "name": self.name,
            "setpoint_mm": None if self.setpoint is None else self.setpoint * 1e3,
            "columns": list(TRACE_CSV_HEADER),
            "rows": [[None if math.isnan(v) else v for v in row] for row in self.rows()],
        }
        return json.dumps(doc, indent=2) + "\n"


def _servo(cfg: ScenarioConfig) -> ServoModel:
    s = ServoModel(
        angle=cfg.initial_angle,
        output_angle=cfg.initial_angle,
        rate_limit=cfg.servo_rate_limit,
        backlash_dead_time=cfg.servo_dead_time,
        angle_to_wf=tuple(cfg.angle_to_wf),
    )
    return s


def _valve(cfg: ScenarioConfig) -> ValveModel:
    (c_lo, c_hi), (a_lo, a_hi) = cfg.valve_cmd_range, cfg.valve_actual_range
    a, b = leak_map(c_lo, a_lo, c_hi, a_hi)
    v = ValveModel(
        leak_gain=a,
        leak_offset=b,
        sat_lo=c_lo,
        sat_hi=c_hi,
        time_constant=cfg.valve_time_constant,
    )
    cmd = v.command_for(cfg.pressure)
    if not c_lo - 1e-9 <= cmd <= c_hi + 1e-9:
        raise InfeasibleScenarioError(
            f"initial pressure {cfg.pressure / 1e3:g} kPa outside the valve range "
            f"{a_lo / 1e3:g}-{a_hi / 1e3:g} kPa"
        )
    return replace(v, commanded=cmd, actual=cfg.pressure)


def _check_authority(cfg: ScenarioConfig, plant, servo: ServoModel, valve: ValveModel | None):
    """Reject loads that no achievable command can hold."""
    if cfg.channel == Channel.PRESSURE:
        options = [(cfg.fold_ratio, valve.actual_range[1])]
    else:
        fr_max = servo.wf_max / cfg.W0
        options = [(fr, cfg.pressure) for fr in np.linspace(0.0, fr_max, 33)]
    best = max(plant.force(fr, plant.strain_range(fr)[0], P) for fr, P in options)
    loads = [cfg.load_at(0.0)] + [cfg.load_at(t) for t, _ in cfg.schedule]
    worst = max(loads)
    if worst > best:
        raise InfeasibleScenarioError(
            f"load {worst:.4g} N exceeds the largest force {best:.4g} N available "
            f"over the {cfg.channel} command range"
        )


def position_span(cfg: ScenarioConfig, load: float | None = None) -> float:
    """Spread of equilibrium positions over the control channel's range.

    Used as the actuation range when judging steady-state error.
    """
    plant = build_plant(cfg)
    load = cfg.load_at(cfg.duration) if load is None else load
    if cfg.channel == Channel.PRESSURE:
        valve = _valve(cfg)
        options = [(cfg.fold_ratio, p) for p in valve.actual_range]
    else:
        fr_max = _servo(cfg).wf_max / cfg.W0
        options = [(0.0, cfg.pressure), (fr_max, cfg.pressure)]
    positions = [plant_equilibrium(plant, fr, P, load).position(cfg.l0) for fr, P in options]
    return abs(positions[1] - positions[0])


def run_scenario(cfg: ScenarioConfig) -> SimTrace:
    """Simulate ``cfg``; identical configs give identical traces."""
    plant = build_plant(cfg)
    servo = _servo(cfg)
    dt = cfg.dt
    valve = _valve(cfg) if cfg.channel == Channel.PRESSURE else None
    if valve is not None and servo.wf_max / cfg.W0 < cfg.fold_ratio:
        raise DomainError("fold ratio beyond the servo range")
    _check_authority(cfg, plant, servo, valve)

    seed = default_seed() if cfg.seed is None else cfg.seed
    rng = np.random.default_rng(seed)

    def state():
        if cfg.channel == Channel.PRESSURE:
            return cfg.fold_ratio, valve.actual
        return servo.wf / cfg.W0, cfg.pressure

    fr0, p0 = state()
    z0 = plant_equilibrium(plant, fr0, p0, cfg.load_at(0.0)).position(cfg.l0)
    setpoint = None if cfg.channel == Channel.OPEN_LOOP else (
        z0 if cfg.setpoint is None else cfg.setpoint
    )
    controller = None
    if cfg.channel == Channel.GEOMETRY:
        controller = PiController(
            cfg.kp, cfg.ki, 0.0, SERVO_MAX_DEG, anti_windup=cfg.anti_windup
        ).bumpless(servo.angle)
    elif cfg.channel == Channel.PRESSURE:
        controller = PiController(
            cfg.kp, cfg.ki, valve.sat_lo, valve.sat_hi, anti_windup=cfg.anti_windup
        ).bumpless(valve.commanded)

    n_ticks = int(round(cfg.duration * cfg.loop_rate)) + 1
    cols = {k: np.empty(n_ticks) for k in ("command", "fr", "p", "z", "load", "err", "eps")}
    saturated = np.zeros(n_ticks, dtype=bool)
    time = np.arange(n_ticks) * dt
    for k in range(n_ticks):
        t = time[k]
        load = cfg.load_at(t)
        fr, P = state()
        eq = plant_equilibrium(plant, fr, P, load)
        z = eq.position(cfg.l0)
        z_meas = z + (rng.normal(0.0, cfg.noise) if cfg.noise > 0.0 else 0.0)
        if controller is None:
            command = cfg.ramp_target
            err = math.nan
        else:
            err = setpoint - z_meas
            command, controller = pi_update(controller, setpoint, z_meas, dt)
        cols["command"][k] = command
        cols["fr"][k] = fr
        cols["p"][k] = P
        cols["z"][k] = z
        cols["load"][k] = load
        cols["err"][k] = err
        cols["eps"][k] = eq.strain
        saturated[k] = eq.saturated
        if cfg.channel == Channel.PRESSURE:
            valve = valve_step(valve, command, dt)
        else:
            servo = servo_step(servo, command, dt)

    return SimTrace(
        name=cfg.name,
        time=time,
        command=cols["command"],
        fold_ratio=cols["fr"],
        pressure=cols["p"],
        position=cols["z"],
        load=cols["load"],
        error=cols["err"],
        strain=cols["eps"],
        saturated=saturated,
        setpoint=setpoint,
    )
