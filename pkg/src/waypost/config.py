"""Service configuration with file overrides for the tunable constants."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from .engagement import DEFAULT_BIRD_SPEED_KMH
from .errors import ValidationError
from .geo import CommunityConfig, DEFAULT_DIVISOR, DEFAULT_MAX_RADIUS_M, DEFAULT_MIN_RADIUS_M


@dataclass
class ServiceConfig:
    community_divisor: float = DEFAULT_DIVISOR
    community_min_radius_m: float = DEFAULT_MIN_RADIUS_M
    community_max_radius_m: float = DEFAULT_MAX_RADIUS_M
    dedup_epsilon_m: float = 10.0
    bird_speed_kmh: float = DEFAULT_BIRD_SPEED_KMH
    units: str = "km"  # "km" or "mi" for displayed distances
    data_path: str | None = None  # journal file; None = in-memory store
    admin_token: str | None = None  # unset disables the admin endpoints
    rate_limit_per_minute: int = 600  # per api token; 0 disables
    host: str = "127.0.0.1"
    port: int = 8000
    ui_dir: str | None = None  # static web client to serve at /ui, if built

    @property
    def community(self) -> CommunityConfig:
        return CommunityConfig(
            divisor=self.community_divisor,
            min_radius_m=self.community_min_radius_m,
            max_radius_m=self.community_max_radius_m,
        )

    @property
    def bird_speed_mps(self) -> float:
        return self.bird_speed_kmh / 3.6


def load_config(path: str | Path | None) -> ServiceConfig:
    """Defaults, overridden by keys from a JSON config file when given."""
    config = ServiceConfig()
    if path is None:
        return config
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file {path} is not valid JSON: {exc}") from None
    known = {f.name for f in fields(ServiceConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    for key, value in raw.items():
        setattr(config, key, value)
    if config.units not in ("km", "mi"):
        raise ValidationError(f"units must be 'km' or 'mi', not {config.units!r}")
    config.community  # validates the radius constants
    return config
