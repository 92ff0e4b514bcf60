from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Optional

from esdsim.errors import ConfigError


THREADS_ENV = "ESD_SIM_THREADS"
CONFIG_DIR_ENV = "ESD_SIM_CONFIG_DIR"

_FORMATS = ("csv", "json")
_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass(frozen=True)
class Settings:
    theta_start: float = 0.0
    theta_stop: float = math.pi
    theta_steps: int = 101
    p_steps: int = 101
    threads: int = 0
    tol: float = 1e-10
    eig_tol: float = 1e-9
    output_format: str = "csv"
    log_level: str = "WARNING"

    def __post_init__(self) -> None:
        if self.theta_steps < 2:
            raise ConfigError(f"scan.theta_steps must be >= 2, got {self.theta_steps}")
        if self.p_steps < 2:
            raise ConfigError(f"scan.p_steps must be >= 2, got {self.p_steps}")
        if not (math.isfinite(self.theta_start) and math.isfinite(self.theta_stop)):
            raise ConfigError("scan.theta_start and scan.theta_stop must be finite")
        if self.threads < 0:
            raise ConfigError(f"scan.threads must be >= 0, got {self.threads}")
        if not (self.tol > 0.0):
            raise ConfigError(f"numerics.tol must be positive, got {self.tol}")
        if not (self.eig_tol > 0.0):
            raise ConfigError(f"numerics.eig_tol must be positive, got {self.eig_tol}")
        if self.output_format not in _FORMATS:
            raise ConfigError(f"output.format must be 'csv' or 'json', got {self.output_format!r}")
        if self.log_level.upper() not in _LEVELS:
            raise ConfigError(f"logging.level must be one of {', '.join(_LEVELS)}, got {self.log_level!r}")

    @property
    def worker_count(self) -> int:
        """Thread count for grid scans; 0 means one per CPU."""
        return self.threads or (os.cpu_count() or 1)

    @property
    def logging_level(self) -> int:
        return getattr(logging, self.log_level.upper())


def _default_dir() -> Path:
    env_dir = os.environ.get(CONFIG_DIR_ENV)
    if env_dir:
        return Path(env_dir)
    # Repository root, next to main.py.
    return Path(__file__).resolve().parent.parent


def load_raw_config(base_dir: Optional[Path] = None) -> Dict[str, Any]:
    """Load configuration, preferring a local, untracked file if present.

    Order:
      1. config.local.json (ignored by git, machine specific)
      2. config.json (project-level config, may be committed)
      3. nothing found: empty dict, so built-in defaults apply
    """
    base_dir = base_dir if base_dir is not None else _default_dir()

    for name in ("config.local.json", "config.json"):
        path = base_dir / name
        if path.exists():
            with path.open("r", encoding="utf-8") as f:
                try:
                    data = json.load(f)
                except json.JSONDecodeError as exc:
                    raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
            if not isinstance(data, dict):
                raise ConfigError(f"{path}: top level must be an object")
            return data
    return {}


def _section(cfg: Dict[str, Any], name: str) -> Dict[str, Any]:
    section = cfg.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"{name} must be an object")
    return section


def _typed(section: Dict[str, Any], key: str, kind: type, default: Any, prefix: str) -> Any:
    if key not in section:
        return default
    try:
        return kind(section[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{prefix}.{key}: cannot read {section[key]!r} as {kind.__name__}") from exc


def threads_from_env(default: int) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if value < 0:
        raise ConfigError(f"{THREADS_ENV} must be >= 0, got {value}")
    return value


def load_config(base_dir: Optional[Path] = None) -> Settings:
    cfg = load_raw_config(base_dir)
    scan_cfg = _section(cfg, "scan")
    numerics_cfg = _section(cfg, "numerics")
    output_cfg = _section(cfg, "output")
    logging_cfg = _section(cfg, "logging")

    defaults = Settings()
    settings = Settings(
        theta_start=_typed(scan_cfg, "theta_start", float, defaults.theta_start, "scan"),
        theta_stop=_typed(scan_cfg, "theta_stop", float, defaults.theta_stop, "scan"),
        theta_steps=_typed(scan_cfg, "theta_steps", int, defaults.theta_steps, "scan"),
        p_steps=_typed(scan_cfg, "p_steps", int, defaults.p_steps, "scan"),
        threads=_typed(scan_cfg, "threads", int, defaults.threads, "scan"),
        tol=_typed(numerics_cfg, "tol", float, defaults.tol, "numerics"),
        eig_tol=_typed(numerics_cfg, "eig_tol", float, defaults.eig_tol, "numerics"),
        output_format=str(output_cfg.get("format", defaults.output_format)).lower(),
        log_level=str(logging_cfg.get("level", defaults.log_level)).upper(),
    )
    return replace(settings, threads=threads_from_env(settings.threads))
