import math

import pytest

from waypost.errors import NotFoundError, ValidationError
from waypost.geo import EARTH_RADIUS_M, GeoPoint
from waypost.journeys import (
    CheckinResult,
    canonicalize_journey,
    check_in,
    is_trailblazer,
    journey_history,
)
from waypost.models import TransitMode

from conftest import register


def north_of(p: GeoPoint, meters: float) -> GeoPoint:
    return GeoPoint(p.latitude + math.degrees(meters / EARTH_RADIUS_M), p.longitude)


ORIGIN = GeoPoint(47.6062, -122.3321)
DEST = GeoPoint(47.6205, -122.3493)  # ~2 km away
FAR_ORIGIN = GeoPoint(48.7, -122.5)  # ~120 km north
FAR_DEST = GeoPoint(48.72, -122.52)


def make_journey(store, user, origin=ORIGIN, destination=DEST):
    return canonicalize_journey(
        store,
        origin,
        destination,
        origin_label="origin",
        destination_label="destination",
        created_by=user.user_id,
    )


class TestCanonicalize:
    def test_identical_coordinates_reuse_the_journey(self, store):
        user = register(store)
        j1 = make_journey(store, user)
        j2 = make_journey(store, user)
        assert j1.journey_id == j2.journey_id

    def test_within_epsilon_reuses_the_journey(self, store):
        user = register(store)
        j1 = make_journey(store, user)
        j2 = make_journey(store, user, north_of(ORIGIN, 5), north_of(DEST, 5))
        assert j2.journey_id == j1.journey_id

    def test_beyond_epsilon_creates_a_new_journey(self, store):
        user = register(store)
        j1 = make_journey(store, user)
        j2 = make_journey(store, user, north_of(ORIGIN, 15), DEST)
        assert j2.journey_id != j1.journey_id

    def test_direction_matters(self, store):
        user = register(store)
        j1 = make_journey(store, user, ORIGIN, DEST)
        j2 = make_journey(store, user, DEST, ORIGIN)
        assert j1.journey_id != j2.journey_id

    def test_nearest_match_wins(self, store):
        # Both candidates sit within epsilon of the probe endpoints but more
        # than epsilon from each other, so they stay distinct journeys.
        user = register(store)
        near = make_journey(store, user, north_of(ORIGIN, 3), north_of(DEST, 3))
        far = make_journey(store, user, north_of(ORIGIN, -8), north_of(DEST, -8))
        assert near.journey_id != far.journey_id
        match = make_journey(store, user, ORIGIN, DEST)
        assert match.journey_id == near.journey_id

    def test_cached_length_matches_haversine(self, store):
        from waypost.geo import haversine_distance

        user = register(store)
        j = make_journey(store, user)
        assert j.length_m == haversine_distance(j.origin, j.destination)


class TestCheckIn:
    def test_first_checkin_on_empty_store_is_trailblazer(self, store):
        user = register(store)
        result = check_in(store, user.user_id, mode="car", origin=ORIGIN, destination=DEST)
        assert isinstance(result, CheckinResult)
        assert result.trailblazer is True
        assert store.current_checkin(user.user_id) == result.checkin

    def test_recheck_increments_mode_count_and_is_not_trailblazer(self, store):
        user = register(store)
        first = check_in(store, user.user_id, mode="car", origin=ORIGIN, destination=DEST)
        again = check_in(
            store, user.user_id, mode="bus", previous_journey_id=first.journey.journey_id
        )
        assert again.trailblazer is False
        per_journey = store.get_stats(user.user_id).journeys[first.journey.journey_id]
        assert per_journey.mode_counts == {"car": 1, "bus": 1}

    def test_bundled_checkin_by_second_user_is_not_trailblazer(self, store):
        # 10 km journey gives a 1 km community radius; 900 m offsets bundle.
        a, b = register(store), register(store)
        origin = GeoPoint(0.0, 0.0)
        dest = GeoPoint(0.0, math.degrees(10_000 / EARTH_RADIUS_M))
        check_in(store, a.user_id, mode="bus", origin=origin, destination=dest)
        result = check_in(
            store,
            b.user_id,
            mode="bus",
            origin=north_of(origin, 900),
            destination=north_of(dest, 900),
        )
        assert result.trailblazer is False

    def test_distant_checkin_stays_trailblazer(self, store):
        a, b = register(store), register(store)
        check_in(store, a.user_id, mode="car", origin=FAR_ORIGIN, destination=FAR_DEST)
        result = check_in(store, b.user_id, mode="car", origin=ORIGIN, destination=DEST)
        assert result.trailblazer is True

    def test_requires_endpoints_or_previous_id(self, store):
        user = register(store)
        with pytest.raises(ValidationError):
            check_in(store, user.user_id, mode="car")
        with pytest.raises(ValidationError):
            check_in(store, user.user_id, mode="car", origin=ORIGIN)

    def test_rejects_both_endpoints_and_previous_id(self, store):
        user = register(store)
        first = check_in(store, user.user_id, mode="car", origin=ORIGIN, destination=DEST)
        with pytest.raises(ValidationError):
            check_in(
                store,
                user.user_id,
                mode="car",
                origin=ORIGIN,
                destination=DEST,
                previous_journey_id=first.journey.journey_id,
            )

    def test_unknown_previous_id(self, store):
        user = register(store)
        with pytest.raises(NotFoundError):
            check_in(store, user.user_id, mode="car", previous_journey_id="j999")

    def test_unknown_mode(self, store):
        user = register(store)
        with pytest.raises(ValidationError):
            check_in(store, user.user_id, mode="zeppelin", origin=ORIGIN, destination=DEST)

    def test_new_checkin_replaces_current(self, store):
        user = register(store)
        first = check_in(store, user.user_id, mode="car", origin=ORIGIN, destination=DEST)
        second = check_in(
            store, user.user_id, mode="walk", origin=FAR_ORIGIN, destination=FAR_DEST
        )
        current = store.current_checkin(user.user_id)
        assert current == second.checkin
        assert current != first.checkin

    def test_timestamps_are_monotone_per_user(self, store):
        user = register(store)
        times = []
        for _ in range(5):
            result = check_in(store, user.user_id, mode="car", origin=ORIGIN, destination=DEST)
            times.append(result.checkin.created_at)
        assert times == sorted(times)
        assert len(set(times)) == len(times)


class TestTrailblazer:
    def test_empty_store(self, store):
        user = register(store)
        journey = make_journey(store, user)
        assert is_trailblazer(journey, user.user_id, store) is True

    def test_own_earlier_checkin_disqualifies(self, store):
        user = register(store)
        result = check_in(store, user.user_id, mode="car", origin=ORIGIN, destination=DEST)
        assert is_trailblazer(result.journey, user.user_id, store) is False

    def test_other_user_far_away_does_not_disqualify(self, store):
        a, b = register(store), register(store)
        check_in(store, a.user_id, mode="car", origin=FAR_ORIGIN, destination=FAR_DEST)
        journey = make_journey(store, b.user_id and b, ORIGIN, DEST)
        assert is_trailblazer(journey, b.user_id, store) is True


class TestJourneyHistory:
    def test_empty(self, store):
        user = register(store)
        assert journey_history(user.user_id, store) == []

    def test_counts_on_one_card(self, store):
        user = register(store)
        first = check_in(store, user.user_id, mode="car", origin=ORIGIN, destination=DEST)
        jid = first.journey.journey_id
        check_in(store, user.user_id, mode="car", previous_journey_id=jid)
        check_in(store, user.user_id, mode="bus", previous_journey_id=jid)
        cards = journey_history(user.user_id, store)
        assert len(cards) == 1
        assert cards[0].mode_counts == {"car": 2, "bus": 1}

    def test_recency_ordering(self, store):
        user = register(store)
        x = check_in(store, user.user_id, mode="car", origin=ORIGIN, destination=DEST)
        y = check_in(store, user.user_id, mode="car", origin=FAR_ORIGIN, destination=FAR_DEST)
        check_in(store, user.user_id, mode="bus", previous_journey_id=x.journey.journey_id)
        cards = journey_history(user.user_id, store)
        assert [c.journey_id for c in cards] == [x.journey.journey_id, y.journey.journey_id]

    def test_card_counts_sum_to_total_checkins(self, store):
        user = register(store)
        check_in(store, user.user_id, mode="car", origin=ORIGIN, destination=DEST)
        check_in(store, user.user_id, mode="walk", origin=FAR_ORIGIN, destination=FAR_DEST)
        check_in(store, user.user_id, mode="car", origin=ORIGIN, destination=DEST)
        cards = journey_history(user.user_id, store)
        total = sum(sum(c.mode_counts.values()) for c in cards)
        assert total == len(store.user_checkins(user.user_id)) == 3


class TestModes:
    def test_mode_set_is_closed(self):
        assert len(TransitMode) == 12
        with pytest.raises(ValidationError):
            TransitMode.parse("submarine")

    def test_each_mode_has_a_stable_avatar(self):
        avatars = {mode.avatar for mode in TransitMode}
        assert len(avatars) == 12
        assert TransitMode.CAR.avatar == "avatar-car"
