"""Run configuration: flat dotted keys, INI files and ``key=value`` overrides.

A config file is a plain INI file whose section names form the first half
of each key::

    [beam]
    v0 = 2.0        ; -> beam.v0

    [electric]
    lambda = 0.5    ; -> electric.lambda

Keys not given keep their defaults (see ``DEFAULTS``).
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path

from .core import (
    BeamParams,
    Constants,
    DomainError,
    ElectricDipoleLine,
    SolenoidLine,
)
from .dynamics import ForceSource, OdeConfig
from .forces import ForceModel
from .oracle import QuadratureConfig
from .phase import Expansion, PotentialModel, WkbConfig

__all__ = ["ConfigError", "DEFAULTS", "RunConfig", "read_config_file", "parse_overrides", "load_config"]


class ConfigError(DomainError):
    """Bad configuration key or value."""


DEFAULTS: dict[str, str] = {
    "beam.charge": "1.0",
    "beam.mass": "1.0",
    "beam.v0": "1.0",
    "beam.d": "1.0",
    "electric.lambda": "1.0",
    "electric.epsilon": "0.5",
    "solenoid.b0": repr(4.0 * math.pi),
    "solenoid.area": "1.0",
    "constants.c": "137.036",
    "constants.hbar": "1.0",
    "quad.abs_tol": "1e-10",
    "quad.rel_tol": "1e-8",
    "quad.max_subdivisions": "1000000",
    "ode.y_start": "auto",
    "ode.y_end": "auto",
    "ode.local_error_tol": "1e-10",
    "ode.max_steps": "10000000",
    "ode.tail_correction": "true",
    "ode.force_source": "ClosedFormY",
    "wkb.y_max": "auto",
    "wkb.expansion": "FirstOrder",
    "wkb.potential": "dipole",
    "model.force_model": "newton3",
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def read_config_file(path) -> dict[str, str]:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    flat = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            flat[f"{section}.{key}"] = value
    return flat


def parse_overrides(items) -> dict[str, str]:
    flat = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override {item!r} is not of the form key=value")
        flat[key.strip()] = value.strip()
    return flat


def _float(flat, key):
    try:
        value = float(flat[key])
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {flat[key]!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite")
    return value


def _optional_float(flat, key):
    return None if flat[key].strip().lower() in {"auto", "none", ""} else _float(flat, key)


def _int(flat, key):
    try:
        return int(float(flat[key]))
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {flat[key]!r}") from None


def _bool(flat, key):
    v = flat[key].strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise ConfigError(f"{key}: expected a boolean, got {flat[key]!r}")


def _choice(enum_cls, flat, key):
    try:
        return enum_cls(flat[key].strip())
    except ValueError:
        allowed = ", ".join(m.value for m in enum_cls)
        raise ConfigError(f"{key}: expected one of {allowed}, got {flat[key]!r}") from None


@dataclass(frozen=True)
class RunConfig:
    beam: BeamParams
    line: ElectricDipoleLine
    solenoid: SolenoidLine
    constants: Constants
    quad: QuadratureConfig
    ode: OdeConfig
    wkb: WkbConfig
    force_model: ForceModel
    force_source: ForceSource
    flat: dict

    @classmethod
    def from_flat(cls, values: dict[str, str] | None = None) -> "RunConfig":
        flat = dict(DEFAULTS)
        for key, value in (values or {}).items():
            if key not in DEFAULTS:
                raise ConfigError(f"unknown config key {key!r}")
            flat[key] = str(value)
        try:
            constants = Constants(_float(flat, "constants.c"), _float(flat, "constants.hbar"))
            beam = BeamParams(_float(flat, "beam.charge"), _float(flat, "beam.mass"),
                              _float(flat, "beam.v0"), _float(flat, "beam.d"))
            line = ElectricDipoleLine(_float(flat, "electric.lambda"), _float(flat, "electric.epsilon"))
            solenoid = SolenoidLine(_float(flat, "solenoid.b0"), _float(flat, "solenoid.area"), constants.c)
            quad = QuadratureConfig(_float(flat, "quad.abs_tol"), _float(flat, "quad.rel_tol"),
                                    _int(flat, "quad.max_subdivisions"))
            ode = OdeConfig(_optional_float(flat, "ode.y_start"), _optional_float(flat, "ode.y_end"),
                            _float(flat, "ode.local_error_tol"), _int(flat, "ode.max_steps"),
                            _bool(flat, "ode.tail_correction"))
            wkb = WkbConfig(_optional_float(flat, "wkb.y_max"), quad,
                            _choice(Expansion, flat, "wkb.expansion"),
                            _choice(PotentialModel, flat, "wkb.potential"))
        except ConfigError:
            raise
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        return cls(beam, line, solenoid, constants, quad, ode, wkb,
                   _choice(ForceModel, flat, "model.force_model"),
                   _choice(ForceSource, flat, "ode.force_source"), flat)

    def with_overrides(self, values: dict[str, str]) -> "RunConfig":
        merged = dict(self.flat)
        merged.update(values)
        return RunConfig.from_flat(merged)


def load_config(path=None, overrides=None) -> RunConfig:
    flat = read_config_file(Path(path)) if path else {}
    flat.update(parse_overrides(overrides))
    return RunConfig.from_flat(flat)
