"""Run configuration: one INI-style file, explicit seed, pinned tolerances.

Only the output directory may come from the environment (HYPFLOW_OUT);
everything else lives in the file or on the command line so runs are
reproducible from the config alone.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    preset: str = "genus2-octagon"
    k: int = 1
    seed: int | None = None
    out_dir: str = "out"

    # budgets
    census_covers: tuple[int, ...] = (1, 2, 3, 4)
    census_word_len: int = 4
    probe_word_len: int = 6

    # sample counts
    n_busemann: int = 10000
    n_rn: int = 1000
    holonomy_word_len: int = 3
    n_first_return: int = 6
    n_lemma42: int = 1000
    n_asymptotic: int = 200
    n_separation_pairs: int = 250  # per gap rung
    separation_gaps: tuple[float, ...] = (0.04, 0.02, 0.01, 0.005)
    n_cone: int = 1000
    n_leaves: int = 100

    # field parameters
    mollifier_k: int = 16
    perturbation_amp: float = 0.015
    cone_T: float = 2.5
    quasigeodesic_T: float = 20.0

    # tolerances (acceptance values)
    tol_busemann: float = 1e-9
    tol_rn: float = 1e-5
    tol_holonomy: float = 1e-6
    tol_bound_slack: float = 1e-6
    tol_period: float = 1e-7
    exponent_window: float = 0.05
    min_decay: float = 0.9
    min_c2: float = 0.5
    separation_eps: float = 0.5

    # trace subcommand
    trace_mode: str = "orbit"  # orbit | flow
    trace_word: str = "a1"
    trace_height: str = "attracting"
    trace_time: float = 0.0
    trace_x: float = 0.0
    trace_y: float = 0.0

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("a seed is mandatory for stochastic sweeps")
        return int(self.seed)

    def validate(self) -> "RunConfig":
        if self.k < 1 or self.k > 8:
            raise ConfigError("cover index k must be in 1..8")
        if self.census_word_len > 6:
            raise ConfigError("census word length capped at 6")
        if any(c < 1 or c > 8 for c in self.census_covers):
            raise ConfigError("census covers must be in 1..8")
        if self.probe_word_len > 8:
            raise ConfigError("minimality probe word length capped at 8")
        if self.mollifier_k < 1:
            raise ConfigError("mollifier scale must be >= 1")
        return self


_SECTIONS = {
    "run": ("preset", "k", "seed", "out_dir"),
    "census": ("census_covers", "census_word_len", "probe_word_len"),
    "samples": (
        "n_busemann",
        "n_rn",
        "holonomy_word_len",
        "n_first_return",
        "n_lemma42",
        "n_asymptotic",
        "n_separation_pairs",
        "separation_gaps",
        "n_cone",
        "n_leaves",
    ),
    "field": ("mollifier_k", "perturbation_amp", "cone_T", "quasigeodesic_T"),
    "tolerances": (
        "tol_busemann",
        "tol_rn",
        "tol_holonomy",
        "tol_bound_slack",
        "tol_period",
        "exponent_window",
        "min_decay",
        "min_c2",
        "separation_eps",
    ),
    "trace": ("trace_mode", "trace_word", "trace_height", "trace_time", "trace_x", "trace_y"),
}

_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_value(name: str, raw: str):
    ftype = _FIELD_TYPES[name]
    raw = raw.strip()
    try:
        if "tuple[int" in ftype:
            return tuple(int(x) for x in raw.replace(",", " ").split())
        if "tuple[float" in ftype:
            return tuple(float(x) for x in raw.replace(",", " ").split())
        if ftype.startswith("int"):
            return int(raw)
        if ftype.startswith("float"):
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def load_config(path: str | Path | None, overrides: dict | None = None) -> RunConfig:
    """Read the INI config, apply command-line overrides, validate."""
    cfg = RunConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        parser.optionxform = str  # keep key case (field names carry it)
        read = parser.read(path)
        if not read:
            raise ConfigError(f"config file {path} not found")
        for section, names in _SECTIONS.items():
            if not parser.has_section(section):
                continue
            for key, raw in parser.items(section):
                if key not in names:
                    raise ConfigError(f"unknown key [{section}] {key} (line in {path})")
                setattr(cfg, key, _parse_value(key, raw))
    env_out = os.environ.get("HYPFLOW_OUT")
    if env_out:
        cfg.out_dir = env_out
    for key, val in (overrides or {}).items():
        if val is not None:
            setattr(cfg, key, val)
    return cfg.validate()
