"""Flat `key = value` config files.

Recognized keys: the six prior/loss hyperparameters (sigma_ab, w, sigma_s,
b, phibar, tau), coverage_floor, match_threshold, and the simplex settings
under a `simplex.` prefix (reflection, expansion, contraction, shrink,
max_iters, f_tol, x_tol, init_steps as a comma list). `#` starts a
comment; unknown keys are an error.
"""

from __future__ import annotations

from dataclasses import dataclass

from .objective import DEFAULT_COVERAGE_FLOOR
from .optimize import SimplexConfig
from .priors import Hyperparams

_HYPER_KEYS = {"sigma_ab": "sigma_ab", "w": "w_num", "sigma_s": "sigma_s",
               "b": "b", "phibar": "phibar", "tau": "tau"}
_SIMPLEX_FLOAT_KEYS = ("reflection", "expansion", "contraction", "shrink", "f_tol", "x_tol")


@dataclass(frozen=True)
class Settings:
    hyper: Hyperparams
    simplex: SimplexConfig
    coverage_floor: float = DEFAULT_COVERAGE_FLOOR
    match_threshold: float = 0.5


def parse_config(text: str) -> dict:
    """Parse config text into a {key: raw string} mapping."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ValueError(f"line {lineno}: empty key or value in {raw!r}")
        if key in out:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def settings_from_mapping(raw: dict) -> Settings:
    hyper_kwargs = {}
    simplex_kwargs = {}
    extras = {}
    for key, value in raw.items():
        if key in _HYPER_KEYS:
            hyper_kwargs[_HYPER_KEYS[key]] = float(value)
        elif key in ("coverage_floor", "match_threshold"):
            extras[key] = float(value)
        elif key.startswith("simplex."):
            sub = key[len("simplex.") :]
            if sub in _SIMPLEX_FLOAT_KEYS:
                simplex_kwargs[sub] = float(value)
            elif sub in ("max_iters", "restarts"):
                simplex_kwargs[sub] = int(value)
            elif sub == "init_steps":
                simplex_kwargs[sub] = tuple(float(t) for t in value.split(","))
            else:
                raise ValueError(f"unknown config key {key!r}")
        else:
            raise ValueError(f"unknown config key {key!r}")
    return Settings(
        hyper=Hyperparams(**hyper_kwargs),
        simplex=SimplexConfig(**simplex_kwargs),
        **extras,
    )


def load_settings(path=None) -> Settings:
    """Read a config file, or return the defaults when path is None."""
    if path is None:
        return Settings(hyper=Hyperparams(), simplex=SimplexConfig())
    with open(path) as fh:
        return settings_from_mapping(parse_config(fh.read()))
