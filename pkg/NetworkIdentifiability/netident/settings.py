"""
Configuration loading for the identifiability toolkit
Reads config.yaml from the repository root, then applies NETIDENT_* environment
overrides (a root .env file is loaded first).
"""

import logging
import os
from pathlib import Path
from typing import Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from netident.errors import ConfigError

logger = logging.getLogger(__name__)

ROOT_DIR = Path(__file__).resolve().parents[2]
DEFAULT_CONFIG_PATH = ROOT_DIR / "config.yaml"

try:
    load_dotenv(dotenv_path=str(ROOT_DIR / ".env"))
except Exception:
    pass


class AnalysisSettings(BaseModel):
    max_exact_n: int = Field(16, ge=1)
    enumeration_cap: int = Field(1_000_000, ge=1)


class OracleSettings(BaseModel):
    default_seed: int = 0
    samples: int = Field(0, ge=0)
    coefficient_bound: int = Field(9, ge=1)
    probabilistic_points: int = Field(3, ge=1)
    evaluation_bound: int = Field(1_000_000, ge=100)
    p3_sampled_minors: int = Field(256, ge=1)


class LoggingSettings(BaseModel):
    level: str = "INFO"
    file: Optional[str] = None


class Settings(BaseModel):
    analysis: AnalysisSettings = AnalysisSettings()
    oracle: OracleSettings = OracleSettings()
    logging: LoggingSettings = LoggingSettings()


# env var -> (section, key, parser)
ENV_OVERRIDES = {
    "NETIDENT_SEED": ("oracle", "default_seed", int),
    "NETIDENT_MAX_EXACT_N": ("analysis", "max_exact_n", int),
    "NETIDENT_ENUMERATION_CAP": ("analysis", "enumeration_cap", int),
    "NETIDENT_LOG_LEVEL": ("logging", "level", str),
    "NETIDENT_LOG_FILE": ("logging", "file", str),
}


def _read_yaml(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        logger.warning("Config file not found: %s; using defaults", path)
        return {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping at top level")
    return data


def _apply_env(raw: dict) -> dict:
    for env_name, (section, key, parse) in ENV_OVERRIDES.items():
        value = os.getenv(env_name)
        if value is None or value == "":
            continue
        try:
            parsed = parse(value)
        except ValueError:
            logger.warning("Ignoring %s=%r: not a valid %s", env_name, value, parse.__name__)
            continue
        block = raw.get(section) or {}
        block[key] = parsed
        raw[section] = block
    return raw


def load_settings(path: Optional[Path] = None) -> Settings:
    """
    Load settings from YAML plus environment

    Args:
        path: Explicit config path; defaults to NETIDENT_CONFIG or <repo>/config.yaml

    Returns:
        Validated Settings
    """
    if path is None:
        env_path = os.getenv("NETIDENT_CONFIG")
        path = Path(env_path) if env_path else DEFAULT_CONFIG_PATH
    raw = _apply_env(_read_yaml(Path(path)))
    # unknown top-level sections are ignored
    known = {k: raw[k] for k in ("analysis", "oracle", "logging") if k in raw}
    try:
        return Settings.model_validate(known)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration in {path}: {e}") from e


_current: Optional[Settings] = None


def get_settings() -> Settings:
    """Process-wide settings, loaded on first use"""
    global _current
    if _current is None:
        _current = load_settings()
    return _current


def use_settings(settings: Optional[Settings]) -> None:
    """Install settings for this process; None reloads from disk on next access"""
    global _current
    _current = settings
