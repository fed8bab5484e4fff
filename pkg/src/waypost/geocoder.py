"""Endpoint geocoding behind a pluggable adapter.

Live venue/address backends are swappable; the shipped implementation is a
deterministic fixture set so every test and offline install behaves the same.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Protocol

from .errors import AdapterError
from .geo import GeoPoint, haversine_distance
from .models import EndpointSuggestion

# Distance at which a suggestion's text score is halved.
DISTANCE_HALVING_M = 5000.0


class GeocoderAdapter(Protocol):
    """Venue and address lookup. Implementations raise AdapterError on failure."""

    def venue_search(self, query: str, near: GeoPoint) -> list[EndpointSuggestion]:
        ...

    def address_search(self, query: str, near: GeoPoint) -> list[EndpointSuggestion]:
        ...


def _text_score(query: str, label: str) -> float:
    """Simple typeahead match: exact > prefix > word-prefix > substring > none."""
    q = query.strip().lower()
    hay = label.lower()
    if not q:
        return 0.0
    if hay == q:
        return 1.0
    if hay.startswith(q):
        return 0.9
    if any(word.startswith(q) for word in hay.split()):
        return 0.75
    if q in hay:
        return 0.5
    return 0.0


@dataclass(frozen=True)
class FixtureEntry:
    label: str
    location: GeoPoint


class FixtureGeocoder:
    """Offline adapter over a fixed list of venues and addresses."""

    def __init__(self, venues: list[FixtureEntry], addresses: list[FixtureEntry]):
        self._venues = venues
        self._addresses = addresses

    @classmethod
    def from_file(cls, path: str | Path) -> "FixtureGeocoder":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls._from_raw(raw)

    @classmethod
    def from_packaged(cls) -> "FixtureGeocoder":
        raw = json.loads(
            resources.files("waypost")
            .joinpath("data/geocoder_fixture.json")
            .read_text(encoding="utf-8")
        )
        return cls._from_raw(raw)

    @classmethod
    def _from_raw(cls, raw: dict) -> "FixtureGeocoder":
        def entries(items):
            return [
                FixtureEntry(item["label"], GeoPoint(item["lat"], item["lng"]))
                for item in items
            ]

        return cls(entries(raw.get("venues", ())), entries(raw.get("addresses", ())))

    def _search(self, entries: list[FixtureEntry], query: str, kind: str):
        out = []
        for entry in entries:
            score = _text_score(query, entry.label)
            if score > 0.0:
                out.append(
                    EndpointSuggestion(
                        label=entry.label, kind=kind, location=entry.location, rank_score=score
                    )
                )
        return out

    def venue_search(self, query: str, near: GeoPoint) -> list[EndpointSuggestion]:
        return self._search(self._venues, query, "venue")

    def address_search(self, query: str, near: GeoPoint) -> list[EndpointSuggestion]:
        return self._search(self._addresses, query, "address")


@dataclass(frozen=True)
class SuggestResult:
    suggestions: list[EndpointSuggestion]
    degraded: tuple[str, ...] = ()  # which halves failed: "venues", "addresses"


def suggest_endpoints(
    query: str,
    device_location: GeoPoint,
    adapter: GeocoderAdapter,
    *,
    limit: int = 10,
) -> SuggestResult:
    """Merged, ranked typeahead suggestions near the device.

    Rank is the adapter's text-match score shrunk by distance from the device,
    so of two equally good matches the nearer one wins. A failing backend
    degrades its half to empty rather than failing the request.
    """
    if not query.strip():
        return SuggestResult([])

    degraded: list[str] = []
    halves: list[EndpointSuggestion] = []
    for name, search in (("venues", adapter.venue_search), ("addresses", adapter.address_search)):
        try:
            halves.extend(search(query, device_location))
        except AdapterError:
            degraded.append(name)

    ranked = [
        EndpointSuggestion(
            label=s.label,
            kind=s.kind,
            location=s.location,
            rank_score=s.rank_score
            / (1.0 + haversine_distance(device_location, s.location) / DISTANCE_HALVING_M),
        )
        for s in halves
    ]
    ranked.sort(key=lambda s: (-s.rank_score, s.label))
    return SuggestResult(ranked[:limit], tuple(degraded))
