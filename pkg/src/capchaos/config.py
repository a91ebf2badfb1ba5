"""key=value experiment configuration files.

One ``key = value`` per line, ``#`` starts a comment, blank lines are
ignored. Angles are in radians.

Required: ell_list, z, cap_r, k, n_replicates, master_seed, and either eps
or both M and alpha. Optional: grid (``auto`` or ``n_theta,n_phi``;
default auto), output_dir (default ``$CAPCHAOS_OUTPUT_DIR`` or
``capchaos-out``), w1_bootstrap (default 200). ``eps = 0`` selects the hard
cap indicator for the analytic columns.
"""
from __future__ import annotations

import os
from pathlib import Path

from .exceptions import ConfigFileError
from .harness import ExperimentConfig

OUTPUT_ENV = "CAPCHAOS_OUTPUT_DIR"
DEFAULT_OUTPUT = "capchaos-out"

REQUIRED = ("ell_list", "z", "cap_r", "k", "n_replicates", "master_seed")


def _ints(text):
    return tuple(int(t) for t in text.replace(" ", "").split(",") if t)


def _grid(text):
    if text.strip().lower() == "auto":
        return "auto"
    g = _ints(text)
    if len(g) != 2:
        raise ValueError("grid must be 'auto' or 'n_theta,n_phi'")
    return g


PARSERS = {
    "ell_list": _ints,
    "z": float,
    "cap_r": float,
    "eps": float,
    "k": int,
    "M": int,
    "alpha": float,
    "n_replicates": int,
    "master_seed": int,
    "grid": _grid,
    "output_dir": str,
    "w1_bootstrap": int,
}


def parse_config_text(text: str) -> ExperimentConfig:
    values, seen = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigFileError(f"expected key = value, got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in PARSERS:
            raise ConfigFileError(f"unknown key {key!r}", lineno)
        if key in seen:
            raise ConfigFileError(f"duplicate key {key!r} (first set on line {seen[key]})", lineno)
        try:
            values[key] = PARSERS[key](value)
        except ValueError as exc:
            raise ConfigFileError(f"bad value for {key}: {exc}", lineno) from None
        seen[key] = lineno
    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigFileError(f"missing required key(s): {', '.join(missing)}")
    if "eps" not in values and not ("M" in values and "alpha" in values):
        raise ConfigFileError("give either eps or both M and alpha")
    values.setdefault("output_dir", os.environ.get(OUTPUT_ENV, DEFAULT_OUTPUT))
    return ExperimentConfig(**values)


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config_text(text)
