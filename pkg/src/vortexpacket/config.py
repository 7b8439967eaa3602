"""Flat ``section.key = value`` run configuration.

Example::

    # comments and blank lines are ignored
    seed = 7
    units.hbar = 1.0
    field.type = "uniform_e"
    field.vector = [0, 0.02, 0]
    packet.l = 2
    packet.p0 = [0, 0, 1]
    integrator.t_final = 400

Values are Python/JSON-style literals: numbers, double-quoted strings,
``true``/``false`` and bracketed lists.  Unknown keys are errors; missing
keys take the defaults below.
"""
from __future__ import annotations

import ast
import json
import math
import re
from dataclasses import dataclass, fields, replace
from dataclasses import field as _field
from typing import Optional

import numpy as np

from .berry import P_MIN, ZeemanParams
from .dynamics import IntegratorConfig, PacketState
from .modes import ModeSpec
from .units import FieldConfig, UnitSystem, make_free, make_uniform_B, make_uniform_E

__all__ = [
    "ConfigError",
    "RunConfig",
    "UnitsBlock",
    "FieldBlock",
    "PacketBlock",
    "IntegratorBlock",
    "ScenarioBlock",
    "SCENARIO_KINDS",
    "parse_config",
    "serialize_config",
]

SCENARIO_KINDS = ("fig1_density", "fig2_hall_fan", "magnetic_drift", "helicity_watch", "berry_loop")


class ConfigError(ValueError):
    def __init__(self, message, line=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None and key not in message:
            where.append(key)
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.key = key


@dataclass(frozen=True)
class UnitsBlock:
    hbar: float = 1.0
    mass: float = 1.0
    charge: float = -1.0


@dataclass(frozen=True)
class FieldBlock:
    type: str = "free"
    vector: tuple = (0.0, 0.0, 0.0)
    g_factor: float = 1.0


@dataclass(frozen=True)
class PacketBlock:
    l: int = 0
    m_radial: int = 0
    n_long: int = 0
    waist: Optional[float] = None
    long_length: Optional[float] = None
    p0: tuple = (0.0, 0.0, 1.0)
    r0: tuple = (0.0, 0.0, 0.0)
    oam_model: str = "slaved"


@dataclass(frozen=True)
class IntegratorBlock:
    method: str = "rk45"
    step: Optional[float] = None
    rtol: float = 1e-10
    atol: float = 1e-12
    t_final: float = 10.0
    output_stride: int = 1
    solve: str = "exact"
    warn_angle: float = 1e-3


@dataclass(frozen=True)
class ScenarioBlock:
    kind: str = "fig2_hall_fan"
    l_values: tuple = (-3, -2, -1, 0, 1, 2, 3)
    g_values: tuple = (0.0, 1.0, 2.0)
    m_radial: int = 0
    grid_n: int = 128
    E0: float = 0.02
    B0: float = 1.0
    p0: float = 1.0
    t_final: float = 400.0
    periods: float = 20.0
    l: int = 1
    tilt: float = 0.3


# key -> kind: int, float, ofloat (optional float), str, vec3, ilist, flist
_SCHEMA = {
    "units": (UnitsBlock, {"hbar": "float", "mass": "float", "charge": "float"}),
    "field": (FieldBlock, {"type": ("str", ("free", "uniform_e", "uniform_b")), "vector": "vec3", "g_factor": "float"}),
    "packet": (PacketBlock, {
        "l": "int", "m_radial": "int", "n_long": "int", "waist": "ofloat", "long_length": "ofloat",
        "p0": "vec3", "r0": "vec3", "oam_model": ("str", ("slaved", "precessing")),
    }),
    "integrator": (IntegratorBlock, {
        "method": ("str", ("rk4", "rk45", "dop853")), "step": "ofloat", "rtol": "float", "atol": "float",
        "t_final": "float", "output_stride": "int", "solve": ("str", ("exact", "first_order")),
        "warn_angle": "float",
    }),
    "scenario": (ScenarioBlock, {
        "kind": ("str", SCENARIO_KINDS), "l_values": "ilist", "g_values": "flist", "m_radial": "int",
        "grid_n": "int", "E0": "float", "B0": "float", "p0": "float", "t_final": "float",
        "periods": "float", "l": "int", "tilt": "float",
    }),
}


@dataclass(frozen=True)
class RunConfig:
    units: UnitsBlock = _field(default_factory=UnitsBlock)
    field: FieldBlock = _field(default_factory=FieldBlock)
    packet: PacketBlock = _field(default_factory=PacketBlock)
    integrator: IntegratorBlock = _field(default_factory=IntegratorBlock)
    scenario: ScenarioBlock = _field(default_factory=ScenarioBlock)
    seed: int = 0

    def unit_system(self) -> UnitSystem:
        return UnitSystem(self.units.hbar, self.units.mass, self.units.charge)

    def field_config(self) -> FieldConfig:
        u = self.unit_system()
        f = self.field
        if f.type == "uniform_e":
            return make_uniform_E(f.vector, f.g_factor, u)
        if f.type == "uniform_b":
            return make_uniform_B(f.vector, f.g_factor, u)
        return make_free(f.g_factor, u)

    def mode_spec(self) -> ModeSpec:
        pk = self.packet
        return ModeSpec(pk.l, pk.m_radial, pk.n_long, pk.waist, pk.long_length,
                        float(np.linalg.norm(pk.p0)), self.unit_system())

    def initial_state(self) -> PacketState:
        return PacketState.initial(self.packet.r0, self.packet.p0, self.packet.l)

    def zeeman(self) -> ZeemanParams:
        return ZeemanParams(self.packet.l, self.field.g_factor, self.unit_system())

    def integrator_config(self) -> IntegratorConfig:
        ig = self.integrator
        return IntegratorConfig(
            method=ig.method, step=ig.step, rtol=ig.rtol, atol=ig.atol,
            oam_model=self.packet.oam_model, t_final=ig.t_final,
            output_stride=ig.output_stride, solve=ig.solve, warn_angle=ig.warn_angle,
        )


def _coerce(kind, value, key):
    choices = None
    if isinstance(kind, tuple):
        kind, choices = kind
    is_num = isinstance(value, (int, float)) and not isinstance(value, bool)
    if kind == "int":
        if not (isinstance(value, int) and not isinstance(value, bool)):
            raise ConfigError(f"integer required at {key}", key=key)
        return value
    if kind in ("float", "ofloat"):
        if kind == "ofloat" and value is None:
            return None
        if not is_num or not math.isfinite(value):
            raise ConfigError(f"finite number required at {key}", key=key)
        return float(value)
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigError(f"quoted string required at {key}", key=key)
        if choices and value not in choices:
            raise ConfigError(f"{value!r} is not one of {', '.join(choices)} at {key}", key=key)
        return value
    if kind == "vec3":
        if not (isinstance(value, (list, tuple)) and len(value) == 3
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in value)):
            raise ConfigError(f"list of three numbers required at {key}", key=key)
        return tuple(float(v) for v in value)
    if kind == "ilist":
        if not (isinstance(value, (list, tuple)) and value
                and all(isinstance(v, int) and not isinstance(v, bool) for v in value)):
            raise ConfigError(f"non-empty list of integers required at {key}", key=key)
        return tuple(value)
    if kind == "flist":
        if not (isinstance(value, (list, tuple)) and value
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in value)):
            raise ConfigError(f"non-empty list of numbers required at {key}", key=key)
        return tuple(float(v) for v in value)
    raise AssertionError(kind)


_WORDS = {"true": True, "false": False, "null": None}
_LINE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)?)\s*=\s*(.+?)\s*$")


def _literal(text):
    if text in _WORDS:
        return _WORDS[text]
    return ast.literal_eval(text)


def _strip_comment(line):
    out, quoted = [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out)


def parse_config(text) -> RunConfig:
    """Parse and validate a flat configuration.

    Raises :class:`ConfigError` naming the line for syntax problems and the
    key path for validation problems.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"config is not UTF-8: {exc}") from exc
    raw: dict[str, dict] = {name: {} for name in _SCHEMA}
    seed = 0
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = _strip_comment(line).strip()
        if not body:
            continue
        m = _LINE.match(body)
        if not m:
            raise ConfigError(f"expected 'section.key = value', got {body!r}", line=lineno)
        key, value_text = m.groups()
        if key in seen:
            raise ConfigError(f"duplicate key {key}", line=lineno, key=key)
        seen.add(key)
        try:
            value = _literal(value_text)
        except (ValueError, SyntaxError) as exc:
            raise ConfigError(f"cannot parse value {value_text!r} for {key}", line=lineno, key=key) from exc
        if key == "seed":
            if not (isinstance(value, int) and not isinstance(value, bool)):
                raise ConfigError("integer required at seed", line=lineno, key=key)
            seed = value
            continue
        if "." not in key:
            raise ConfigError(f"unknown key {key}", line=lineno, key=key)
        section, name = key.split(".", 1)
        if section not in _SCHEMA or name not in _SCHEMA[section][1]:
            raise ConfigError(f"unknown key {key}", line=lineno, key=key)
        try:
            raw[section][name] = _coerce(_SCHEMA[section][1][name], value, key)
        except ConfigError as exc:
            raise ConfigError(str(exc), line=lineno, key=key) from None
    blocks = {section: cls(**raw[section]) for section, (cls, _) in _SCHEMA.items()}
    cfg = RunConfig(seed=seed, **blocks)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    def bad(key, msg):
        raise ConfigError(f"{msg} at {key}", key=key)

    if not cfg.units.hbar > 0:
        bad("units.hbar", "positive value required")
    if not cfg.units.mass > 0:
        bad("units.mass", "positive value required")
    if cfg.units.charge == 0:
        bad("units.charge", "nonzero value required")
    pk = cfg.packet
    if pk.m_radial < 0:
        bad("packet.m_radial", "non-negative integer required")
    if pk.n_long < 0:
        bad("packet.n_long", "non-negative integer required")
    for name in ("waist", "long_length"):
        val = getattr(pk, name)
        if val is not None and not val > 0:
            bad(f"packet.{name}", "positive value required")
    if not np.linalg.norm(pk.p0) > P_MIN:
        bad("packet.p0", f"momentum magnitude above {P_MIN:g} required")
    ig = cfg.integrator
    if not 1e-12 <= ig.rtol <= 1e-3:
        bad("integrator.rtol", "value in [1e-12, 1e-3] required")
    if not ig.atol > 0:
        bad("integrator.atol", "positive value required")
    if ig.step is not None and not ig.step > 0:
        bad("integrator.step", "positive value required")
    if not ig.t_final >= 0:
        bad("integrator.t_final", "non-negative value required")
    if ig.output_stride < 1:
        bad("integrator.output_stride", "integer >= 1 required")
    sc = cfg.scenario
    n = sc.grid_n
    if n < 32 or n & (n - 1):
        bad("scenario.grid_n", "power of two >= 32 required")
    for name in ("p0", "B0", "E0", "t_final", "periods"):
        if not getattr(sc, name) > 0:
            bad(f"scenario.{name}", "positive value required")
    if sc.m_radial < 0:
        bad("scenario.m_radial", "non-negative integer required")


def _format(value):
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(_format(v) for v in value) + "]"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    """Write every key, so that ``parse_config(serialize_config(c)) == c``."""
    lines = [f"seed = {cfg.seed}"]
    for section in _SCHEMA:
        block = getattr(cfg, section)
        for f in fields(block):
            lines.append(f"{section}.{f.name} = {_format(getattr(block, f.name))}")
    return "\n".join(lines) + "\n"


def with_block(cfg: RunConfig, section: str, **changes) -> RunConfig:
    return replace(cfg, **{section: replace(getattr(cfg, section), **changes)})
