"""Experiment configuration: defaults, config files, flag overrides.

Config files are plain UTF-8 key/value text mirroring the CLI flags
(`n-at = 6`, hyphens and underscores interchangeable, `#` comments).
Angles accept `pi` expressions: `pi/4`, `2pi`, `0.5`.  Flags override
file values, which override defaults.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, asdict
from typing import Dict, Optional

import numpy as np

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "parse_angle",
    "parse_grid",
    "load_config_file",
    "resolve_config",
    "initial_state_vector",
]


class ConfigError(ValueError):
    """Malformed or out-of-range configuration; maps to exit code 2."""


def parse_angle(text) -> float:
    """Parse a float or a pi expression like 'pi/4', '2pi', '-pi'."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().lower().replace(" ", "")
    if "pi" not in s:
        try:
            return float(s)
        except ValueError:
            raise ConfigError(f"cannot parse angle {text!r}") from None
    head, _, tail = s.partition("pi")
    try:
        if head in ("", "+"):
            value = math.pi
        elif head == "-":
            value = -math.pi
        else:
            value = float(head) * math.pi
        if tail.startswith("/"):
            value /= float(tail[1:])
        elif tail:
            raise ValueError
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r}") from None
    return value


def parse_grid(text) -> np.ndarray:
    """Parse 'lo:hi:n' (inclusive linspace) or a comma list of angles."""
    s = str(text).strip()
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid spec {text!r} must be 'lo:hi:n'")
        lo, hi = parse_angle(parts[0]), parse_angle(parts[1])
        try:
            n = int(parts[2])
        except ValueError:
            raise ConfigError(f"grid point count {parts[2]!r} is not an integer") from None
        if n < 1:
            raise ConfigError(f"grid needs at least 1 point, got {n}")
        return np.linspace(lo, hi, n)
    return np.array([parse_angle(tok) for tok in s.split(",") if tok.strip()])


@dataclass
class ExperimentConfig:
    n_at: int = 4
    n_ph: float = 0.88
    phi: float = 0.0
    k0a: float = math.pi / 4
    k0zc: float = 0.0
    gamma: float = 1.0
    dt: float = 0.005
    t_max: float = 2.0e4
    tol: float = 1e-9
    record_stride: int = 200
    initial: str = "ground"
    grid_zc: str = "0:pi:65"
    grid_a: str = "0:pi:65"
    workers: int = 1
    out: Optional[str] = None

    def to_dict(self) -> Dict:
        return asdict(self)


_FIELD_PARSERS = {
    "n_at": int,
    "n_ph": float,
    "phi": parse_angle,
    "k0a": parse_angle,
    "k0zc": parse_angle,
    "gamma": float,
    "dt": float,
    "t_max": float,
    "tol": float,
    "record_stride": int,
    "initial": str,
    "grid_zc": str,
    "grid_a": str,
    "workers": int,
    "out": str,
}


def load_config_file(path: str) -> Dict[str, str]:
    """Read a key/value config file into a raw string dict."""
    values: Dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(
                        f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}"
                    )
                key, _, value = line.partition("=")
                key = key.strip().replace("-", "_")
                if key not in _FIELD_PARSERS:
                    raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
                values[key] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return values


def resolve_config(
    file_values: Optional[Dict[str, str]] = None,
    flag_values: Optional[Dict[str, object]] = None,
) -> ExperimentConfig:
    """Merge defaults < file < flags, convert types, validate ranges."""
    merged: Dict[str, object] = {}
    for source in (file_values or {}, flag_values or {}):
        for key, value in source.items():
            if value is None:
                continue
            key = key.replace("-", "_")
            if key not in _FIELD_PARSERS:
                raise ConfigError(f"unknown config key {key!r}")
            merged[key] = value
    cfg = ExperimentConfig()
    for key, value in merged.items():
        parser = _FIELD_PARSERS[key]
        try:
            setattr(cfg, key, parser(value))
        except ConfigError:
            raise
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {value!r}") from None
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig):
    if not 1 <= cfg.n_at <= 8:
        raise ConfigError(f"n_at must be in 1..8, got {cfg.n_at}")
    if cfg.n_ph < 0:
        raise ConfigError(f"n_ph must be >= 0, got {cfg.n_ph}")
    if cfg.gamma <= 0:
        raise ConfigError(f"gamma must be > 0, got {cfg.gamma}")
    if not 0 < cfg.dt < 0.1:
        raise ConfigError(f"dt must be in (0, 0.1), got {cfg.dt}")
    if cfg.t_max <= 0:
        raise ConfigError(f"t_max must be > 0, got {cfg.t_max}")
    if cfg.tol <= 0:
        raise ConfigError(f"tol must be > 0, got {cfg.tol}")
    if cfg.record_stride < 1:
        raise ConfigError(f"record_stride must be >= 1, got {cfg.record_stride}")
    if cfg.workers < 1:
        raise ConfigError(f"workers must be >= 1, got {cfg.workers}")
    if cfg.initial not in ("ground", "plus-pi-4") and not os.path.exists(cfg.initial):
        raise ConfigError(
            f"initial must be 'ground', 'plus-pi-4', or an existing state "
            f"file; got {cfg.initial!r}"
        )
    parse_grid(cfg.grid_zc)
    parse_grid(cfg.grid_a)


def initial_state_vector(cfg: ExperimentConfig) -> np.ndarray:
    """Initial pure state from the config selector."""
    dim = 2**cfg.n_at
    if cfg.initial == "ground":
        psi = np.zeros(dim, dtype=complex)
        psi[0] = 1.0
        return psi
    if cfg.initial == "plus-pi-4":
        single = np.array([1.0, np.exp(1j * math.pi / 4)]) / math.sqrt(2.0)
        psi = np.array([1.0 + 0.0j])
        for _ in range(cfg.n_at):
            psi = np.kron(psi, single)
        return psi
    try:
        with open(cfg.initial, encoding="utf-8") as fh:
            amps = [complex(line.strip()) for line in fh if line.strip()]
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read state file {cfg.initial}: {exc}") from exc
    if len(amps) != dim:
        raise ConfigError(
            f"state file {cfg.initial} has {len(amps)} amplitudes, "
            f"expected {dim} for n_at = {cfg.n_at}"
        )
    psi = np.array(amps, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm < 1e-12:
        raise ConfigError(f"state file {cfg.initial} holds a zero vector")
    return psi / norm
