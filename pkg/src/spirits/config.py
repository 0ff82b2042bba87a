"""Run configuration: defaults < config file < command-line overrides.

The file format is INI-like::

    # comment
    [map]
    theta = 5
    c_0 = 0.75

Every key has a default, unknown sections or keys are errors, and
validation reports every violation at once.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .dynamics import SimConfig
from .errors import ConfigError
from .feedback import MapParams
from .micro import FirmParams, Preferences
from .shocks import ShockParams

__all__ = ["RunConfig", "SCHEMA", "parse_config", "defaults_text"]


def _pos(v):
    return v > 0


def _nonneg(v):
    return v >= 0


def _initial(v):
    if v in ("high", "low"):
        return v
    x = float(v)
    if not x > 0:
        raise ValueError("must be > 0")
    return x


def _sigmas(v):
    if isinstance(v, str) and v.strip().lower() == "auto":
        return "auto"
    vals = [float(s) for s in str(v).replace(",", " ").split()]
    if not vals:
        raise ValueError("empty list")
    return vals


def _seed(v):
    n = int(v)
    if not 0 <= n < 2**64:
        raise ValueError("must be a 64-bit unsigned integer")
    return n


def _threads(v):
    if str(v).strip().lower() == "auto":
        return "auto"
    n = int(v)
    if n < 1:
        raise ValueError("must be >= 1 or 'auto'")
    return n


def _choice(*options):
    def conv(v):
        v = str(v).strip()
        if v not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return v
    return conv


# section -> key -> (converter, default, check, constraint text)
SCHEMA = {
    "run": {
        "seed": (_seed, 12345, None, ""),
        "threads": (_threads, 1, None, ""),
    },
    "map": {
        "c_min": (float, 0.4, _pos, "> 0"),
        "c_max": (float, 1.4, _pos, "> 0"),
        "c_0": (float, 0.75, math.isfinite, "finite"),
        "theta": (float, 5.0, _pos, "> 0"),
    },
    "shocks": {
        "sigma": (float, 0.6, _nonneg, ">= 0"),
        "eta": (float, 0.5, lambda v: 0 <= v < 1, "in [0, 1)"),
    },
    "micro": {
        "gamma": (float, 1.0, _pos, "> 0"),
        "varsigma": (float, 1.0, lambda v: 0 < v <= 1, "in (0, 1]"),
        "phi": (float, 1.0, _pos, "> 0"),
        "beta": (float, 0.99, lambda v: 0 < v < 1, "in (0, 1)"),
        "alpha": (float, 1.0 / 3.0, lambda v: 0 < v < 1, "in (0, 1)"),
        "zbar": (float, 1.0, _pos, "> 0"),
        "f": (float, 1.0, _pos, "> 0"),
        "z": (float, 1.0, _pos, "> 0"),
    },
    "policy": {
        "phi_taylor": (float, 1.5, lambda v: v > 1, "> 1"),
        "crisis_prob": (float, 0.0, lambda v: 0 <= v < 1, "in [0, 1)"),
    },
    "sim": {
        "steps": (int, 100_000, _pos, "> 0"),
        "burn_in": (int, 10_000, _nonneg, ">= 0"),
        "initial_c": (_initial, "high", None, ""),
        "ema_epsilon": (float, 1.0, lambda v: 0 < v <= 1, "in (0, 1]"),
        "dump_shocks": (_choice("yes", "no"), "no", None, ""),
    },
    "scan": {
        "c0_min": (float, 0.0, math.isfinite, "finite"),
        "c0_max": (float, 1.6, math.isfinite, "finite"),
        "n_c0": (int, 200, lambda v: v >= 2, ">= 2"),
        "theta_min": (float, 1.0, _pos, "> 0"),
        "theta_max": (float, 10.0, _pos, "> 0"),
        "n_theta": (int, 200, lambda v: v >= 2, ">= 2"),
    },
    "rates": {
        "sigmas": (_sigmas, "auto", None, ""),
        "n_sigma": (int, 6, lambda v: v >= 4, ">= 4"),
        "t_min": (float, 1e2, _pos, "> 0"),
        "t_max": (float, 1e6, _pos, "> 0"),
        "n_min": (int, 50, _pos, "> 0"),
        "max_steps": (int, 10**9, _pos, "> 0"),
        "members": (int, 8, _pos, "> 0"),
        "direction": (_choice("both", "high_to_low", "low_to_high"), "both", None, ""),
        "prefactor": (_choice("slopes", "textbook"), "slopes", None, ""),
    },
}


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)

    def __getitem__(self, section):
        return self.values[section]

    @property
    def seed(self) -> int:
        return self.values["run"]["seed"]

    @property
    def threads(self) -> int:
        t = self.values["run"]["threads"]
        if t == "auto":
            import os
            return max(1, os.cpu_count() or 1)
        return t

    def map_params(self) -> MapParams:
        return MapParams(**self.values["map"])

    def shock_params(self) -> ShockParams:
        s = self.values["shocks"]
        return ShockParams(s["sigma"], s["eta"], self.seed)

    def sim_config(self) -> SimConfig:
        s = self.values["sim"]
        return SimConfig(map=self.map_params(), shocks=self.shock_params(), steps=s["steps"],
                         burn_in=s["burn_in"], initial_c=s["initial_c"],
                         ema_epsilon=s["ema_epsilon"])

    def preferences(self) -> Preferences:
        m = self.values["micro"]
        return Preferences(m["gamma"], m["varsigma"], m["phi"], m["beta"])

    def firm(self) -> FirmParams:
        m = self.values["micro"]
        return FirmParams(m["alpha"], m["zbar"])

    def as_dict(self) -> dict:
        """Effective configuration without the scheduling-only ``threads`` key."""
        out = {}
        for sec, vals in self.values.items():
            out[sec] = {k: v for k, v in vals.items() if not (sec == "run" and k == "threads")}
        return out


def _key_lines(path: Path) -> dict:
    """(section, key) -> line number, for error messages."""
    where = {}
    section = None
    for no, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            where[(section, None)] = no
        elif "=" in line and section is not None:
            where[(section, line.split("=", 1)[0].strip())] = no
    return where


def _unique_key_section(key: str):
    hits = [sec for sec, keys in SCHEMA.items() if key in keys]
    return hits[0] if len(hits) == 1 else None


def parse_config(path=None, overrides=None, base: dict | None = None) -> RunConfig:
    """Layer defaults, an optional file (or ``base`` mapping) and overrides.

    ``overrides`` maps ``"section.key"`` (or a key that is unique across
    sections) to a raw value. Raises ConfigError listing every violation.
    """
    raw = {sec: {} for sec in SCHEMA}
    origin = {}
    errors = []
    if base:
        for sec, vals in base.items():
            for key, val in vals.items():
                raw.setdefault(sec, {})[key] = val
                origin[(sec, key)] = "manifest"
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError([f"config file not found: {path}"])
        lines = _key_lines(path)
        cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#",))
        cp.optionxform = str
        try:
            cp.read(path)
        except configparser.Error as exc:
            raise ConfigError([f"{path}: {exc}"]) from exc
        for sec in cp.sections():
            if sec not in SCHEMA:
                errors.append(f"{path}:{lines.get((sec, None), '?')}: unknown section [{sec}]")
                continue
            for key, val in cp.items(sec):
                where = f"{path}:{lines.get((sec, key), '?')}"
                raw[sec][key] = val
                origin[(sec, key)] = where
    for name, val in (overrides or {}).items():
        if "." in name:
            sec, key = name.split(".", 1)
        else:
            sec, key = _unique_key_section(name), name
            if sec is None:
                errors.append(f"flag --{name}: unknown or ambiguous key (use --section.key)")
                continue
        raw.setdefault(sec, {})[key] = val
        origin[(sec, key)] = f"flag --{name}"

    values = {}
    for sec, vals in raw.items():
        if sec not in SCHEMA:
            errors.append(f"{origin.get((sec, next(iter(vals), None)), 'input')}: unknown section [{sec}]")
            continue
        values[sec] = {}
        for key in vals:
            if key not in SCHEMA[sec]:
                errors.append(f"{origin.get((sec, key), 'input')}: unknown key '{key}' in [{sec}]")
        for key, (conv, default, check, text) in SCHEMA[sec].items():
            if key not in vals:
                values[sec][key] = default
                continue
            where = origin.get((sec, key), "input")
            try:
                v = conv(vals[key]) if not isinstance(vals[key], list) else conv(" ".join(map(str, vals[key])))
            except (TypeError, ValueError) as exc:
                errors.append(f"{where}: {sec}.{key}={vals[key]!r} is invalid ({exc})")
                continue
            if check is not None and not check(v):
                errors.append(f"{where}: {sec}.{key}={v!r} violates constraint {key} {text}")
                continue
            values[sec][key] = v
    if not errors:
        m, s, sc = values["map"], values["sim"], values["scan"]
        if not m["c_max"] > m["c_min"]:
            errors.append(f"map.c_max={m['c_max']} must exceed map.c_min={m['c_min']}")
        if not s["burn_in"] < s["steps"]:
            errors.append(f"sim.burn_in={s['burn_in']} must be < sim.steps={s['steps']}")
        if not sc["c0_max"] > sc["c0_min"]:
            errors.append("scan.c0_max must exceed scan.c0_min")
        if not sc["theta_max"] > sc["theta_min"]:
            errors.append("scan.theta_max must exceed scan.theta_min")
        r = values["rates"]
        if not r["t_max"] > r["t_min"]:
            errors.append("rates.t_max must exceed rates.t_min")
    if errors:
        raise ConfigError(errors)
    return RunConfig(values)


def _fmt(v):
    if isinstance(v, list):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def defaults_text() -> str:
    """The full default configuration as a config file."""
    out = ["# default configuration; every key may be overridden with --section.key=value"]
    for sec, keys in SCHEMA.items():
        out.append(f"\n[{sec}]")
        for key, (_, default, _, text) in keys.items():
            note = f"  # {text}" if text else ""
            out.append(f"{key} = {_fmt(default)}{note}")
    return "\n".join(out) + "\n"
