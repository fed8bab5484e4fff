"""Journey canonicalization, the check-in flow, trailblazer detection, and history."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import notes
from .engagement import (
    DEFAULT_BIRD_SPEED_KMH,
    HaikuCorpus,
    WelcomeContext,
    select_welcome,
)
from .errors import ValidationError
from .geo import CommunityConfig, GeoPoint, community_query, haversine_distance
from .models import (
    Checkin,
    Journey,
    JourneyCard,
    NoteView,
    TransitMode,
    WelcomeMessage,
)
from .store import Store

# Two check-ins whose endpoints both fall within this distance land on the
# same journey; roughly address-level geocoding precision.
DEDUP_EPSILON_M = 10.0

_EMPTY_CORPUS = HaikuCorpus(())


@dataclass(frozen=True)
class _Leg:
    origin: GeoPoint
    destination: GeoPoint


@dataclass(frozen=True)
class CheckinResult:
    checkin: Checkin
    journey: Journey
    trailblazer: bool
    welcome: WelcomeMessage
    feed: list[NoteView]


def find_canonical_journey(
    store: Store,
    origin: GeoPoint,
    destination: GeoPoint,
    epsilon_m: float = DEDUP_EPSILON_M,
) -> Journey | None:
    """The existing journey both of whose endpoints sit within epsilon of the
    given ones, preferring the closest match and then the oldest."""
    best_key = None
    best: Journey | None = None
    for entry in store.index.candidates_near_origin(origin, epsilon_m):
        d_origin = haversine_distance(origin, entry.origin)
        if d_origin > epsilon_m:
            continue
        d_dest = haversine_distance(destination, entry.destination)
        if d_dest > epsilon_m:
            continue
        journey = store.journeys[entry.journey_id]
        key = (d_origin + d_dest, journey.created_at, journey.journey_id)
        if best_key is None or key < best_key:
            best_key, best = key, journey
    return best


def canonicalize_journey(
    store: Store,
    origin: GeoPoint,
    destination: GeoPoint,
    *,
    origin_label: str,
    destination_label: str,
    created_by: str,
    epsilon_m: float = DEDUP_EPSILON_M,
) -> Journey:
    """Reuse the matching journey if one exists, otherwise persist a new one."""
    with store.lock:
        existing = find_canonical_journey(store, origin, destination, epsilon_m)
        if existing is not None:
            return existing
        with store.write() as txn:
            return txn.new_journey(
                origin=origin,
                destination=destination,
                origin_label=origin_label,
                destination_label=destination_label,
                created_by=created_by,
            )


def is_trailblazer(
    journey: Journey | _Leg,
    user_id: str,
    store: Store,
    cfg: CommunityConfig | None = None,
) -> bool:
    """First tracks in fresh snow: nobody else has checked in anywhere in this
    journey's community, and this user has never checked in to the journey."""
    cfg = cfg or CommunityConfig()
    with store.lock:
        community = community_query(journey, store.index, cfg)
        for journey_id in community:
            for checkin in store.checkins_on_journey(journey_id):
                if checkin.user_id != user_id:
                    return False
        own_id = getattr(journey, "journey_id", None)
        if own_id is not None and any(
            ci.journey_id == own_id for ci in store.user_checkins(user_id)
        ):
            return False
        return True


def check_in(
    store: Store,
    user_id: str,
    *,
    mode: TransitMode | str,
    origin: GeoPoint | None = None,
    destination: GeoPoint | None = None,
    origin_label: str | None = None,
    destination_label: str | None = None,
    previous_journey_id: str | None = None,
    cfg: CommunityConfig | None = None,
    epsilon_m: float = DEDUP_EPSILON_M,
    corpus: HaikuCorpus = _EMPTY_CORPUS,
    rng: random.Random | None = None,
    bird_speed_mps: float = DEFAULT_BIRD_SPEED_KMH / 3.6,
) -> CheckinResult:
    """Express presence on a journey; replaces any current check-in.

    Either both endpoints (a new or looked-up journey) or a previous journey
    id (a repeat, mode only) must be given. Returns the journey, the welcome
    message, the trailblazer flag, and the community feed.
    """
    cfg = cfg or CommunityConfig()
    rng = rng or random
    if isinstance(mode, str):
        mode = TransitMode.parse(mode)
    user = store.get_user(user_id)

    has_endpoints = origin is not None or destination is not None
    if previous_journey_id is not None and has_endpoints:
        raise ValidationError("give either endpoints or a previous journey id, not both")
    if previous_journey_id is None:
        if origin is None or destination is None:
            raise ValidationError("a check-in needs both endpoints or a previous journey id")

    with store.lock:
        if previous_journey_id is not None:
            journey = store.get_journey(previous_journey_id)
            create = False
        else:
            found = find_canonical_journey(store, origin, destination, epsilon_m)
            journey = found
            create = found is None

        if create:
            viewer: Journey | _Leg = _Leg(origin, destination)
        else:
            viewer = journey
        trailblazer = is_trailblazer(viewer, user_id, store, cfg)

        with store.write() as txn:
            if create:
                journey = txn.new_journey(
                    origin=origin,
                    destination=destination,
                    origin_label=origin_label or _coordinate_label(origin),
                    destination_label=destination_label or _coordinate_label(destination),
                    created_by=user.user_id,
                )
            checkin = txn.new_checkin(
                user_id=user.user_id,
                journey_id=journey.journey_id,
                mode=mode,
                trailblazer=trailblazer,
            )

        stats = store.get_stats(user.user_id)
        user_visits = stats.journeys[journey.journey_id].trips
        other_travellers = len(
            {ci.user_id for ci in store.checkins_on_journey(journey.journey_id)}
            - {user.user_id}
        )
        welcome = select_welcome(
            WelcomeContext(
                journey=journey,
                stats=stats,
                user_visits=user_visits,
                other_travellers=other_travellers,
                mode=mode,
                bird_speed_mps=bird_speed_mps,
            ),
            corpus,
            rng,
        )
        feed = notes.journey_feed(checkin, store, cfg)

    return CheckinResult(
        checkin=checkin,
        journey=journey,
        trailblazer=trailblazer,
        welcome=welcome,
        feed=feed,
    )


def journey_history(user_id: str, store: Store) -> list[JourneyCard]:
    """One card per journey the user has checked in to, most recent first."""
    last_seen: dict[str, object] = {}
    for checkin in store.user_checkins(user_id):
        last_seen[checkin.journey_id] = checkin.created_at  # log order: last wins
    stats = store.get_stats(user_id)
    cards = []
    for journey_id, last_at in last_seen.items():
        journey = store.get_journey(journey_id)
        per_journey = stats.journeys.get(journey_id)
        cards.append(
            JourneyCard(
                journey_id=journey_id,
                origin_label=journey.origin_label,
                destination_label=journey.destination_label,
                mode_counts=dict(per_journey.mode_counts) if per_journey else {},
                last_checkin_at=last_at,
            )
        )
    cards.sort(key=lambda c: c.last_checkin_at, reverse=True)
    return cards


def _coordinate_label(point: GeoPoint) -> str:
    return f"{point.latitude:.4f}, {point.longitude:.4f}"
