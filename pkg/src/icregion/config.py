"""Experiment configuration: ``key = value`` files, flag overrides, output headers.

Every output file starts with ``# icregion <command>`` followed by one
``# key = value`` line per field, so :func:`read_header` turns any output
back into the configuration that produced it.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

from .rng import check_seed

SEED_ENV = "ICREGION_SEED"


class ConfigError(ValueError):
    """Malformed or inconsistent configuration value."""


class MissingSeedError(ConfigError):
    """No seed given by file, environment or flag."""


def _floats(text) -> tuple[float, ...]:
    if isinstance(text, (tuple, list)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).split(",") if v.strip())


def _ints(text) -> tuple[int, ...]:
    if isinstance(text, (tuple, list)):
        return tuple(int(v) for v in text)
    return tuple(int(v) for v in str(text).split(",") if v.strip())


def _seed(text):
    if text is None or text == "":
        return None
    return check_seed(int(text))


_PARSERS = {
    "p1_db": float, "p2_db": float, "a": float,
    "scheme1": str, "scheme2": str,
    "n_sections": int, "blocks": int, "seed": _seed,
    "lab_n": int, "codebook_sizes": _ints, "gammas": _floats, "trials": int,
    "codes": int, "flip": float, "cross": float, "ic_file": str,
}


@dataclass(frozen=True)
class ExperimentConfig:
    p1_db: float = 7.0
    p2_db: float = 7.0
    a: float = 0.5
    scheme1: str = "conv:7,5"
    scheme2: str = "iud:1"
    n_sections: int = 10_000
    blocks: int = 10
    seed: int | None = None
    # coding lab (lemma1 / lemma2)
    lab_n: int = 6
    codebook_sizes: tuple[int, ...] = (2, 4)
    gammas: tuple[float, ...] = (0.05, 0.1, 0.2)
    trials: int = 200
    codes: int = 50
    flip: float = 0.1
    cross: float = 0.1
    ic_file: str = ""

    def validate(self) -> "ExperimentConfig":
        if self.seed is None:
            raise MissingSeedError(f"a seed is required (config 'seed', --seed or ${SEED_ENV})")
        for name in ("n_sections", "blocks", "lab_n", "trials", "codes"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not self.codebook_sizes or min(self.codebook_sizes) <= 0:
            raise ConfigError("codebook_sizes must be positive")
        if not self.gammas or min(self.gammas) <= 0:
            raise ConfigError("gammas must be positive")
        if self.a < 0:
            raise ConfigError("cross gain must be nonnegative")
        if not (0 <= self.flip <= 1 and 0 <= self.cross <= 1):
            raise ConfigError("flip and cross must be probabilities")
        return self

    def updated(self, values: Mapping[str, Any]) -> "ExperimentConfig":
        changes = {}
        for key, raw in values.items():
            if raw is None:
                continue
            if key not in _PARSERS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                changes[key] = _PARSERS[key](raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None
        return replace(self, **changes)

    def header_lines(self, command: str) -> list[str]:
        lines = [f"# icregion {command}"]
        for f in fields(self):
            lines.append(f"# {f.name} = {format_value(getattr(self, f.name))}".rstrip())
        return lines


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, tuple):
        return ",".join(format_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_pairs(text: str, strip_hash: bool = False) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if strip_hash:
            if not line.startswith("#"):
                continue
            line = line[1:].strip()
        elif line.startswith("#") or not line:
            continue
        if "=" not in line:
            if strip_hash:
                continue
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def load_config(path=None, overrides: Mapping[str, Any] | None = None,
                environ: Mapping[str, str] | None = None) -> ExperimentConfig:
    """File values, then the seed environment variable, then flag overrides."""
    cfg = ExperimentConfig()
    if path:
        cfg = cfg.updated(parse_pairs(Path(path).read_text()))
    env = os.environ if environ is None else environ
    if env.get(SEED_ENV):
        cfg = cfg.updated({"seed": env[SEED_ENV]})
    if overrides:
        cfg = cfg.updated(overrides)
    return cfg


def read_header(text: str) -> ExperimentConfig:
    """Reconstruct the configuration recorded in an output file header."""
    return ExperimentConfig().updated(parse_pairs(text, strip_hash=True))
