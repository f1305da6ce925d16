"""
config.py
Settings for horolab experiments

All tolerances and defaults used by the estimators live in LabSettings.
Values can be overridden from a TOML file (config.toml at the repository
root, or the path in HOROLAB_CONFIG).
"""

import logging
import math
import os
from dataclasses import dataclass, field, asdict, fields
from typing import Any, Dict, List, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from horolab.errors import ScenarioError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "config.toml")


def _default_r_schedule() -> List[float]:
    return [math.exp(k / 2.0) for k in range(-8, 9)]


@dataclass
class LabSettings:
    """Tolerances and defaults shared by every horolab module"""

    # approach sequences
    approach_ratio: float = 0.5
    approach_floor: float = 1e-12

    # horofunction tails
    stabilization_window: int = 8
    oscillation_tolerance: float = 1e-4
    n_max: int = 60

    # membership
    membership_margin: float = 1e-6
    persistence_depth: int = 10
    trace_exclusion_radius: float = 0.25
    r_schedule: List[float] = field(default_factory=_default_r_schedule)

    # metric backends
    exact_tolerance: float = 1e-12
    pullback_tolerance: float = 1e-10
    grid_comparability: float = 4.0
    grid_resolution: float = 0.02

    # geodesics
    refinement_cap: int = 10_000
    refinement_tolerance: float = 1e-6
    geodesic_tolerance: float = 1e-6
    quasi_geodesic_beta_cap: float = 1.0
    quasi_geodesic_alpha_max: float = 100.0

    # visibility
    divergence_slope: float = 0.05
    divergence_window: int = 10
    quadruple_cap: int = 200

    # extension
    cluster_tolerance: float = 1e-3
    injectivity_separation: float = 0.05

    # domains
    takagi_depth: int = 52

    # output
    float_digits: int = 12

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def update(self, overrides: Dict[str, Any]) -> "LabSettings":
        """
        Apply flat or table-structured overrides

        Args:
            overrides: mapping of setting name to value; nested TOML tables are flattened

        Returns:
            self, for chaining
        """
        known = {f.name for f in fields(self)}
        for key, value in _flatten(overrides).items():
            if key not in known:
                logger.warning(f"Ignoring unknown setting '{key}'")
                continue
            setattr(self, key, value)
        return self


def _flatten(table: Dict[str, Any]) -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in table.items():
        if isinstance(value, dict):
            flat.update(_flatten(value))
        else:
            flat[key] = value
    return flat


def load_settings(path: Optional[str] = None) -> LabSettings:
    """
    Build settings from defaults plus an optional TOML file

    Args:
        path: explicit TOML path; falls back to HOROLAB_CONFIG, then config.toml

    Returns:
        LabSettings instance

    Raises:
        ScenarioError: the settings file is not valid TOML
    """
    settings = LabSettings()
    candidate = path or os.getenv("HOROLAB_CONFIG") or DEFAULT_CONFIG_PATH
    if candidate and os.path.exists(candidate):
        try:
            with open(candidate, "rb") as f:
                settings.update(tomllib.load(f))
        except tomllib.TOMLDecodeError as e:
            raise ScenarioError(f"Settings file {candidate} is not valid TOML: {e}", issues=[str(e)])
        logger.debug(f"Loaded settings from {candidate}")
    elif path:
        logger.warning(f"Settings file {path} not found, using defaults")
    return settings


_settings_instance: Optional[LabSettings] = None


def get_settings() -> LabSettings:
    """Get or create the global settings instance"""
    global _settings_instance
    if _settings_instance is None:
        _settings_instance = load_settings()
    return _settings_instance


def use_settings(settings: LabSettings) -> LabSettings:
    """Install a settings instance as the global one"""
    global _settings_instance
    _settings_instance = settings
    return settings


def reset_settings() -> None:
    """Drop the global settings so the next get_settings() reloads them"""
    global _settings_instance
    _settings_instance = None
