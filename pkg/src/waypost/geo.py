"""Great-circle geometry, community bundling, and a grid index over journey origins.

Everything here is a pure function over immutable values. The index is the
one mutable structure; callers serialize writes themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Protocol

from .errors import ValidationError

# Mean spherical earth radius, meters.
EARTH_RADIUS_M = 6371008.8

# Bundling defaults: radius = length / 10, clamped to 100 yards .. 30 miles.
DEFAULT_DIVISOR = 10.0
DEFAULT_MIN_RADIUS_M = 91.44
DEFAULT_MAX_RADIUS_M = 48280.32


@dataclass(frozen=True)
class GeoPoint:
    """A point on the map. Longitude is normalized to the half-open [-180, 180)."""

    latitude: float
    longitude: float

    def __post_init__(self) -> None:
        lat, lon = self.latitude, self.longitude
        if not (isinstance(lat, (int, float)) and isinstance(lon, (int, float))):
            raise ValidationError("coordinates must be numbers")
        if not (math.isfinite(lat) and math.isfinite(lon)):
            raise ValidationError("coordinates must be finite")
        if not -90.0 <= lat <= 90.0:
            raise ValidationError(f"latitude {lat} out of range [-90, 90]")
        if not -180.0 <= lon <= 180.0:
            raise ValidationError(f"longitude {lon} out of range [-180, 180]")
        if lon == 180.0:
            object.__setattr__(self, "longitude", -180.0)


@dataclass(frozen=True)
class CommunityConfig:
    """Constants governing how wide a journey's community reaches."""

    divisor: float = DEFAULT_DIVISOR
    min_radius_m: float = DEFAULT_MIN_RADIUS_M
    max_radius_m: float = DEFAULT_MAX_RADIUS_M

    def __post_init__(self) -> None:
        if not self.divisor > 1.0:
            raise ValidationError("divisor must be > 1")
        if not self.min_radius_m > 0.0:
            raise ValidationError("min radius must be positive")
        if self.max_radius_m < self.min_radius_m:
            raise ValidationError("max radius must be >= min radius")


class Leg(Protocol):
    """Anything with two geographic endpoints (a journey, or a test stand-in)."""

    origin: GeoPoint
    destination: GeoPoint


def haversine_distance(p: GeoPoint, q: GeoPoint) -> float:
    """Great-circle distance in meters on the spherical earth model."""
    phi1 = math.radians(p.latitude)
    phi2 = math.radians(q.latitude)
    dphi = math.radians(q.latitude - p.latitude)
    dlam = math.radians(q.longitude - p.longitude)
    a = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(a)))


def leg_length_m(leg: Leg) -> float:
    return haversine_distance(leg.origin, leg.destination)


def community_radius(distance_m: float, cfg: CommunityConfig | None = None) -> float:
    """Bundling radius for a journey of the given crow-flies length.

    One tenth of the length by default, never below 91.44 m and never above
    48280.32 m, so short hops still get a block-sized community and
    transcontinental flights don't swallow the globe.
    """
    cfg = cfg or CommunityConfig()
    if distance_m < 0:
        raise ValidationError("distance must be non-negative")
    return min(max(distance_m / cfg.divisor, cfg.min_radius_m), cfg.max_radius_m)


def is_bundled(viewer: Leg, other: Leg, cfg: CommunityConfig | None = None) -> bool:
    """True iff `other` starts and ends within the viewer's community radius.

    The relation is viewer-centric: the radius comes from the viewer's own
    length, so a long journey may bundle a short one that does not bundle it
    back.
    """
    cfg = cfg or CommunityConfig()
    r = community_radius(leg_length_m(viewer), cfg)
    return (
        haversine_distance(viewer.origin, other.origin) <= r
        and haversine_distance(viewer.destination, other.destination) <= r
    )


@dataclass(frozen=True)
class IndexEntry:
    journey_id: str
    origin: GeoPoint
    destination: GeoPoint


class JourneyIndex:
    """Spatial index over journey origins, bucketed on a fixed lat/lon grid.

    Candidate generation over-approximates; `community_query` (and any other
    caller) applies the exact predicate afterwards, so results are always
    identical to a linear scan.
    """

    def __init__(self, cell_deg: float = 0.25):
        if cell_deg <= 0:
            raise ValidationError("cell size must be positive")
        self._cell_deg = cell_deg
        self._n_lon = max(1, int(round(360.0 / cell_deg)))
        self._entries: dict[str, IndexEntry] = {}
        self._grid: dict[tuple[int, int], list[IndexEntry]] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, journey_id: str) -> bool:
        return journey_id in self._entries

    def entries(self) -> Iterator[IndexEntry]:
        return iter(self._entries.values())

    def add(self, journey_id: str, origin: GeoPoint, destination: GeoPoint) -> None:
        if journey_id in self._entries:
            raise ValidationError(f"journey {journey_id!r} already indexed")
        entry = IndexEntry(journey_id, origin, destination)
        self._entries[journey_id] = entry
        self._grid.setdefault(self._cell_of(origin), []).append(entry)

    def _cell_of(self, p: GeoPoint) -> tuple[int, int]:
        lat_c = int((p.latitude + 90.0) / self._cell_deg)
        lat_c = min(lat_c, int(180.0 / self._cell_deg))  # lat == 90 shares the top row
        lon_c = int((p.longitude + 180.0) / self._cell_deg) % self._n_lon
        return lat_c, lon_c

    def candidates_near_origin(self, center: GeoPoint, radius_m: float) -> Iterator[IndexEntry]:
        """Every entry whose origin might lie within radius_m of center.

        May yield entries farther away (grid granularity, bounding-box slack);
        never misses one within the radius.
        """
        if radius_m < 0:
            raise ValidationError("radius must be non-negative")
        sigma = radius_m / EARTH_RADIUS_M  # angular radius, radians
        pad = 1.0 + 1e-9
        dlat_deg = math.degrees(sigma) * pad
        lat_lo = center.latitude - dlat_deg
        lat_hi = center.latitude + dlat_deg

        # Longitude excursion of the cap: sin(dlon) = sin(sigma)/cos(lat). If the
        # cap reaches a pole, all longitudes are in play.
        full_wrap = False
        if lat_lo <= -90.0 or lat_hi >= 90.0 or sigma >= math.pi / 2:
            full_wrap = True
        else:
            ratio = math.sin(sigma) / math.cos(math.radians(center.latitude))
            if ratio >= 1.0:
                full_wrap = True
            else:
                dlon_deg = math.degrees(math.asin(ratio)) * pad

        lat_cell_lo = int((max(lat_lo, -90.0) + 90.0) / self._cell_deg)
        lat_cell_hi = int((min(lat_hi, 90.0) + 90.0) / self._cell_deg)

        seen: set[str] = set()
        if full_wrap:
            for (lat_c, _), bucket in self._grid.items():
                if lat_cell_lo <= lat_c <= lat_cell_hi:
                    for entry in bucket:
                        if entry.journey_id not in seen:
                            seen.add(entry.journey_id)
                            yield entry
            return

        lon_cell_lo = math.floor((center.longitude - dlon_deg + 180.0) / self._cell_deg)
        lon_cell_hi = math.floor((center.longitude + dlon_deg + 180.0) / self._cell_deg)
        if lon_cell_hi - lon_cell_lo + 1 >= self._n_lon:
            lon_cells = range(self._n_lon)
        else:
            lon_cells = range(lon_cell_lo, lon_cell_hi + 1)
        for lat_c in range(lat_cell_lo, lat_cell_hi + 1):
            for lon_c_raw in lon_cells:
                bucket = self._grid.get((lat_c, lon_c_raw % self._n_lon))
                if not bucket:
                    continue
                for entry in bucket:
                    if entry.journey_id not in seen:
                        seen.add(entry.journey_id)
                        yield entry


def community_query(viewer: Leg, index: JourneyIndex, cfg: CommunityConfig | None = None) -> set[str]:
    """Ids of every indexed journey bundled with the viewer's journey.

    Exactly what a linear scan with `is_bundled` would return; the viewer's
    own id is included whenever it is indexed.
    """
    cfg = cfg or CommunityConfig()
    r = community_radius(leg_length_m(viewer), cfg)
    out: set[str] = set()
    for entry in index.candidates_near_origin(viewer.origin, r):
        if (
            haversine_distance(viewer.origin, entry.origin) <= r
            and haversine_distance(viewer.destination, entry.destination) <= r
        ):
            out.add(entry.journey_id)
    return out
