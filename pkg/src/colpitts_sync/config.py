"""Sectioned ``key = value`` configuration with embedded defaults.

Files are read with :mod:`configparser`. A JSON run manifest is accepted in
place of a config file; its ``config`` block is the fully resolved settings
of the run that produced it.
"""
from __future__ import annotations

import configparser
import copy
import json
from pathlib import Path
from typing import Any

from .backstepping import ControlVariant, Gains
from .model import OscillatorParams
from .optimize import PsoConfig, SsoConfig
from .sim import PAPER_MASTER_IC, PAPER_SLAVE_IC, GainObjective, SimConfig


class ConfigError(ValueError):
    pass


DEFAULTS: dict[str, dict[str, Any]] = {
    "oscillator": {"a": 30.0, "b": 0.8, "c": 20.0, "d": 0.08, "e": 10.0},
    "simulate": {"ic": [8.0, 2.0, 3.0], "dt": 1e-3, "t_final": 500.0, "record_stride": 10},
    "sync": {
        "dt": 1e-3,
        "t_final": 70.0,
        "t_activate": 20.0,
        "master_ic": list(PAPER_MASTER_IC),
        "slave_ic": list(PAPER_SLAVE_IC),
        "record_stride": 10,
        "variant": "printed",
    },
    "gains": {"k1": 0.0, "k3": 2.4982},
    # The tuning objective runs the controller over the whole horizon.
    "objective": {
        "dt": 1e-3,
        "t_final": 70.0,
        "t_activate": 0.0,
        "master_ic": list(PAPER_MASTER_IC),
        "slave_ic": list(PAPER_SLAVE_IC),
        "variant": "printed",
    },
    "sso": {
        "population": 50,
        "stages": 30,
        "local_points": 4,
        "mu": 0.9,
        "alpha": 0.1,
        "gamma": 4.0,
        "dt_stage": 1.0,
        "fd_step": 1e-3,
        "init_velocity": 0.1,
        "lower": [0.0, 0.0],
        "upper": [0.79, 10.0],
    },
    "pso": {
        "swarm": 50,
        "iters": 30,
        "inertia": 0.729,
        "c1": 1.49445,
        "c2": 1.49445,
        "vmax_frac": 0.2,
        "lower": [0.0, 0.0],
        "upper": [0.79, 10.0],
    },
    "optimize": {"algo": "sso", "seed": 0, "repeats": 10, "workers": 1},
}


def _coerce(raw: Any, like: Any, where: str) -> Any:
    try:
        if isinstance(like, list):
            if isinstance(raw, str):
                raw = [v for v in raw.replace(",", " ").split() if v]
            return [float(v) for v in raw]
        if isinstance(like, bool):
            return raw if isinstance(raw, bool) else str(raw).strip().lower() in ("1", "true", "yes", "on")
        if isinstance(like, int):
            f = float(raw)
            if f != int(f):
                raise ValueError
            return int(f)
        if isinstance(like, float):
            return float(raw)
        return str(raw).strip()
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: cannot read {raw!r} as {type(like).__name__}") from None


def merge(base: dict, updates: dict, strict: bool = True) -> dict:
    out = copy.deepcopy(base)
    for section, values in updates.items():
        if section not in out:
            if strict:
                raise ConfigError(f"unknown config section [{section}]")
            continue
        for key, raw in values.items():
            if key not in out[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            out[section][key] = _coerce(raw, DEFAULTS[section][key], f"[{section}] {key}")
    return out


def load_config(path: str | Path | None) -> dict:
    if path is None:
        return copy.deepcopy(DEFAULTS)
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        return merge(DEFAULTS, data.get("config", data))
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    return merge(DEFAULTS, {s: dict(parser[s]) for s in parser.sections()})


def dump_ini(cfg: dict) -> str:
    lines = []
    for section, values in cfg.items():
        lines.append(f"[{section}]")
        for key, v in values.items():
            if isinstance(v, list):
                v = ", ".join(repr(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{key} = {v}")
        lines.append("")
    return "\n".join(lines)


# Builders turning resolved sections into domain objects.


def guarded(fn, *args, **kwargs):
    """Call ``fn``, re-raising validation errors as :class:`ConfigError`."""
    try:
        return fn(*args, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def oscillator(cfg) -> OscillatorParams:
    return guarded(OscillatorParams, **cfg["oscillator"])


def gains(cfg) -> Gains:
    g = cfg["gains"]
    return guarded(Gains.checked, g["k1"], g["k3"], oscillator(cfg))


def variant(section: dict) -> ControlVariant:
    return guarded(ControlVariant, section["variant"])


def sync_sim(cfg) -> SimConfig:
    s = cfg["sync"]
    return guarded(
        SimConfig,
        dt=s["dt"], t_final=s["t_final"], t_activate=s["t_activate"],
        master_ic=s["master_ic"], slave_ic=s["slave_ic"], record_stride=s["record_stride"],
    )


def objective(cfg) -> GainObjective:
    s = cfg["objective"]
    sim = guarded(
        SimConfig,
        dt=s["dt"], t_final=s["t_final"], t_activate=s["t_activate"],
        master_ic=s["master_ic"], slave_ic=s["slave_ic"],
    )
    return GainObjective(oscillator(cfg), sim, variant(s))


def sso_config(cfg, seed: int) -> SsoConfig:
    return guarded(SsoConfig, seed=seed, **cfg["sso"])


def pso_config(cfg, seed: int) -> PsoConfig:
    return guarded(PsoConfig, seed=seed, **cfg["pso"])
