"""Waypost: check in to journeys between places, meet the travellers around you, leave notes behind."""

__version__ = "0.1.0"

from .errors import (
    AuthError,
    CapacityError,
    NotFoundError,
    PersistenceError,
    RateLimitError,
    StateError,
    ValidationError,
    WaypostError,
)
from .geo import CommunityConfig, GeoPoint, community_radius, haversine_distance

__all__ = [
    "AuthError",
    "CapacityError",
    "CommunityConfig",
    "GeoPoint",
    "NotFoundError",
    "PersistenceError",
    "RateLimitError",
    "StateError",
    "ValidationError",
    "WaypostError",
    "community_radius",
    "haversine_distance",
]
