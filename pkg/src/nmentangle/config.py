"""Flat ``key = value`` run configuration.

Example::

    # figure-mode run
    Q = 0, 1, 5
    R = 1
    theta = 1.5707963267948966
    mode = figure
    time_axis = tau
    t_max = 5
    samples = 500

Either Q and R (lists allowed, comma separated) or all of J, lambda and
gamma_M (single values) must be given. Numbers use a decimal point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .regimes import MODES, TIME_AXES, RegimeThresholds, SweepSpec


class ConfigError(ValueError):
    pass


_DEFAULTS = {
    "theta": math.pi / 2,
    "mode": "figure",
    "time_axis": "tau",
    "t_max": 5.0,
    "samples": 500,
    "output": None,
    "workers": 1,
}

_THRESHOLD_KEYS = ("markovian_min_R", "markovian_max_Q", "nonmarkovian_max_R", "nonmarkovian_min_Q")
_LIST_KEYS = ("Q", "R")
_FLOAT_KEYS = ("theta", "J", "lambda", "gamma_M", "t_max") + _THRESHOLD_KEYS
_KNOWN = set(_LIST_KEYS) | set(_FLOAT_KEYS) | {"mode", "time_axis", "samples", "output", "workers"}


@dataclass(frozen=True)
class RunConfig:
    Q: tuple[float, ...]
    R: tuple[float, ...]
    theta: float
    mode: str
    time_axis: str
    t_max: float
    samples: int
    gamma_M: float = 1.0
    output: str | None = None
    workers: int = 1
    thresholds: RegimeThresholds = field(default_factory=RegimeThresholds)
    defaults_used: tuple[str, ...] = ()

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.samples)

    def sweep_spec(self) -> SweepSpec:
        return SweepSpec(
            Q_values=self.Q,
            R_values=self.R,
            times=tuple(self.times.tolist()),
            theta=self.theta,
            mode=self.mode,
            time_axis=self.time_axis,
            gamma_M=self.gamma_M,
            thresholds=self.thresholds,
            workers=self.workers,
        )


def _number(text: str, key: str, where: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise ConfigError(f"{where}: {key}: not a number: {text!r}") from None
    if not math.isfinite(val):
        raise ConfigError(f"{where}: {key}: value must be finite")
    return val


def parse_config(text: str) -> RunConfig:
    raw: dict[str, tuple[str, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KNOWN:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first on {raw[key][1]})")
        if not value:
            raise ConfigError(f"line {lineno}: {key}: empty value")
        raw[key] = (value, f"line {lineno}")
    return _resolve(raw)


def parse_options(options: dict[str, str | None]) -> RunConfig:
    """Resolve command-line values (``key -> text``, None meaning absent).

    Same rules as parse_config; error messages name the option instead of
    a line number.
    """
    raw = {}
    for key, value in options.items():
        if value is None:
            continue
        key = key.replace("-", "_")
        if key not in _KNOWN:
            raise ConfigError(f"unknown option {key!r}")
        flag = "--" + key.replace("_", "-")
        if not str(value).strip():
            raise ConfigError(f"{flag}: empty value")
        raw[key] = (str(value).strip(), flag)
    return _resolve(raw)


def _resolve(raw: dict[str, tuple[str, str]]) -> RunConfig:
    vals: dict = {}
    for key, (text, where) in raw.items():
        if key in _LIST_KEYS:
            vals[key] = tuple(_number(part.strip(), key, where) for part in text.split(","))
        elif key in _FLOAT_KEYS:
            vals[key] = _number(text, key, where)
        elif key in ("samples", "workers"):
            try:
                vals[key] = int(text)
            except ValueError:
                raise ConfigError(f"{where}: {key}: not an integer: {text!r}") from None
        else:
            vals[key] = text

    def where_of(key):
        return raw[key][1] if key in raw else "default"

    dimless = [k for k in ("Q", "R") if k in vals]
    dimful = [k for k in ("J", "lambda", "gamma_M") if k in vals]
    if dimless and dimful:
        raise ConfigError("overdetermined parameters: give either Q, R or J, lambda, gamma_M")
    if dimful:
        if len(dimful) != 3:
            raise ConfigError("J, lambda and gamma_M must all be given")
        J, lam, gM = vals["J"], vals["lambda"], vals["gamma_M"]
        if J < 0:
            raise ConfigError(f"{where_of('J')}: J must be >= 0")
        if lam <= 0:
            raise ConfigError(f"{where_of('lambda')}: lambda must be > 0")
        if gM <= 0:
            raise ConfigError(f"{where_of('gamma_M')}: gamma_M must be > 0")
        Qs, Rs, gamma_M = (J / lam,), (lam / gM,), gM
    elif len(dimless) == 2:
        Qs, Rs, gamma_M = vals["Q"], vals["R"], 1.0
        if any(q < 0 for q in Qs):
            raise ConfigError(f"{where_of('Q')}: Q must be >= 0")
        if any(r <= 0 for r in Rs):
            raise ConfigError(f"{where_of('R')}: R must be > 0")
    else:
        raise ConfigError("underdetermined parameters: give Q and R, or J, lambda and gamma_M")

    defaults_used = tuple(k for k in _DEFAULTS if k not in vals)
    merged = {**_DEFAULTS, **{k: v for k, v in vals.items() if k in _DEFAULTS}}

    if merged["samples"] < 2:
        raise ConfigError(f"{where_of('samples')}: samples ≥ 2 required")
    if merged["t_max"] <= 0:
        raise ConfigError(f"{where_of('t_max')}: t_max must be > 0")
    if not 0 <= merged["theta"] <= 2 * math.pi:
        raise ConfigError(f"{where_of('theta')}: theta must lie in [0, 2*pi] (radians)")
    if merged["mode"] not in MODES:
        raise ConfigError(f"{where_of('mode')}: mode must be one of {', '.join(MODES)}")
    if merged["time_axis"] not in TIME_AXES:
        raise ConfigError(f"{where_of('time_axis')}: time_axis must be one of {', '.join(TIME_AXES)}")
    if merged["time_axis"] == "tau-prime" and any(q <= 0 for q in Qs):
        raise ConfigError("tau-prime time axis requires every Q > 0")
    if merged["workers"] < 1:
        raise ConfigError(f"{where_of('workers')}: workers must be >= 1")

    thresholds = RegimeThresholds(**{k: vals[k] for k in _THRESHOLD_KEYS if k in vals})
    return RunConfig(
        Q=tuple(Qs),
        R=tuple(Rs),
        theta=merged["theta"],
        mode=merged["mode"],
        time_axis=merged["time_axis"],
        t_max=merged["t_max"],
        samples=merged["samples"],
        gamma_M=gamma_M,
        output=merged["output"],
        workers=merged["workers"],
        thresholds=thresholds,
        defaults_used=defaults_used,
    )
