"""Run configuration: ``key = value`` files typed against per-command
schemas.

Lines starting with ``#`` are comments; duplicate keys keep the last value
with a warning; unknown keys, type mismatches and missing required keys
raise :class:`~rabiflux.errors.ConfigError` carrying the line number.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

from .errors import ConfigError

__all__ = ["RunConfig", "parse_config", "COMMANDS", "SCHEMAS"]

COMMANDS = ("simulate-jcm", "simulate-chain", "simulate-fluxon",
            "synth-esr", "analyze-spectrum", "reproduce")


@dataclass(frozen=True)
class _Key:
    kind: str                    # float | int | str | bool | floats
    default: object = None
    required: bool = False
    choices: tuple | None = None


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


_CONVERTERS = {
    "float": float,
    "int": int,
    "str": str,
    "bool": _parse_bool,
    "floats": _parse_floats,
}

_COMMON = {
    "seed": _Key("int", 0),
    "output_dir": _Key("str", None),
}

SCHEMAS: dict[str, dict[str, _Key]] = {
    "simulate-jcm": {
        **_COMMON,
        "nbar": _Key("float", required=True),
        "g": _Key("float", 1.0),
        "delta": _Key("float", 0.0),
        "t_max": _Key("float", required=True),
        "n_points": _Key("int", 2001),
        "c1": _Key("float", 1.0),
        "c2": _Key("float", 0.0),
        "sum_from_one": _Key("bool", False),
    },
    "simulate-chain": {
        **_COMMON,
        "sites": _Key("int", 64),
        "spacing": _Key("float", 1.0),
        "omega0": _Key("float", required=True),
        "omega": _Key("float", required=True),
        "k": _Key("float", required=True),
        "xi1": _Key("float", required=True),
        "xi2": _Key("float", required=True),
        "g": _Key("float", required=True),
        "d_omega": _Key("float", 0.0),
        "relaxation": _Key("float", 0.0),
        "variant": _Key("str", "space-chain",
                        choices=("space-chain", "time-lattice")),
        "t1": _Key("float", 1.0),
        "n_min": _Key("int", 0),
        "n_max": _Key("int", 0),
        "weights": _Key("str", "vacuum", choices=("vacuum", "poisson")),
        "nbar": _Key("float", 0.0),
        "beam_center": _Key("float", required=True),
        "beam_sigma": _Key("float", required=True),
        "beam_target": _Key("str", "excited", choices=("excited", "ground")),
        "beam2_center": _Key("float", None),
        "beam2_sigma": _Key("float", None),
        "beam2_target": _Key("str", "ground", choices=("excited", "ground")),
        "t_max": _Key("float", required=True),
        "step": _Key("float", 0.01),
        "snapshots": _Key("int", 5),
    },
    "simulate-fluxon": {
        **_COMMON,
        "alpha": _Key("float", 0.05),
        "beta": _Key("float", 0.0),
        "gamma": _Key("float", 0.0),
        "length": _Key("float", 40.0),
        "grid_points": _Key("int", 2000),
        "dt": _Key("float", 0.01),
        "u0": _Key("float", 0.0),
        "n_fluxons": _Key("int", 1),
        "t_max": _Key("float", 100.0),
        "snapshots": _Key("int", 5),
        "mode": _Key("str", "evolve", choices=("evolve", "iv")),
        "gamma_grid": _Key("floats", ()),
    },
    "synth-esr": {
        **_COMMON,
        "field_start": _Key("float", required=True),
        "field_end": _Key("float", required=True),
        "sweep_rate": _Key("float", required=True),
        "direction": _Key("str", "up", choices=("up", "down")),
        "modulation_freq": _Key("float", 1.0e5),
        "h_m": _Key("float", 0.0),
        "tau": _Key("float", 0.0),
        "n_points": _Key("int", 2001),
        "detect": _Key("bool", False),
        "noise": _Key("float", 0.0),
        "packet_g": _Key("float", None),
        "packet_nbar": _Key("float", 50.0),
        "packet_center": _Key("float", None),
        "packet_amplitude": _Key("float", 1.0),
        "packet_gfactor": _Key("float", 2.00278),
        "packet_hysteresis": _Key("float", 0.0),
        "packet_chirp": _Key("float", 0.0),
        "rg_offsets": _Key("floats", ()),
        "rg_amplitude": _Key("float", 0.5),
        "line_center": _Key("float", None),
        "line_width_pp": _Key("float", 0.2),
        "line_psi": _Key("float", 0.0),
        "line_amplitude": _Key("float", 1.0),
        "line_sharpening": _Key("float", 2.0),
    },
    "analyze-spectrum": {
        **_COMMON,
        "input": _Key("str", required=True),
        "min_prominence": _Key("float", None),
        "microwave_freq_mhz": _Key("float", None),
        "n_oscillations": _Key("float", None),
        "window_start": _Key("float", None),
        "window_end": _Key("float", None),
    },
    "reproduce": {
        **_COMMON,
    },
}


@dataclass
class RunConfig:
    """Typed run description: command, parameters, inputs, output dir, seed."""

    command: str
    parameters: dict
    input_paths: list[str] = dc_field(default_factory=list)
    output_dir: str | None = None
    seed: int = 0


def parse_config(text: str, command: str | None = None) -> RunConfig:
    """Parse ``key = value`` configuration text for the given command.

    The command may instead be supplied by a ``command =`` line in the text;
    an explicit argument wins. The first error is reported with its line
    number; duplicate keys warn and keep the last value.
    """
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", lineno)
        key, _, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError("empty key", lineno)
        if key in raw:
            warnings.warn(f"duplicate key {key!r} at line {lineno}: "
                          "last value wins")
        raw[key] = (value, lineno)

    if "command" in raw:
        file_command, lineno = raw.pop("command")
        if command is None:
            command = file_command
        if file_command not in COMMANDS:
            raise ConfigError(f"unknown command {file_command!r}", lineno)
    if command is None:
        raise ConfigError("no command given (flag or 'command =' line)")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")

    schema = SCHEMAS[command]
    parameters: dict = {key: spec.default for key, spec in schema.items()}
    for key, (value, lineno) in raw.items():
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} for command {command}", lineno)
        spec = schema[key]
        try:
            typed = _CONVERTERS[spec.kind](value)
        except ValueError:
            raise ConfigError(
                f"key {key!r} expects {spec.kind}, got {value!r}", lineno) from None
        if spec.choices is not None and typed not in spec.choices:
            raise ConfigError(
                f"key {key!r} must be one of {spec.choices}, got {typed!r}", lineno)
        parameters[key] = typed
    missing = [key for key, spec in schema.items()
               if spec.required and parameters[key] is None]
    if missing:
        raise ConfigError(f"missing required key(s) for {command}: "
                          + ", ".join(sorted(missing)))
    input_paths = [parameters["input"]] if parameters.get("input") else []
    return RunConfig(
        command=command,
        parameters=parameters,
        input_paths=input_paths,
        output_dir=parameters.get("output_dir"),
        seed=int(parameters.get("seed", 0)),
    )
