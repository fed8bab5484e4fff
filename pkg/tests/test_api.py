import json
import random

import pytest
from fastapi.testclient import TestClient

from waypost.api import create_app
from waypost.config import ServiceConfig
from waypost.errors import PersistenceError
from waypost.store import Store

from conftest import TickingClock
from test_service import seed_line

ADMIN_TOKEN = "admin-secret"


@pytest.fixture
def app_store():
    return Store(clock=TickingClock())


@pytest.fixture
def client(app_store):
    config = ServiceConfig(admin_token=ADMIN_TOKEN)
    app = create_app(config, store=app_store, rng=random.Random(7))
    return TestClient(app)


def register(client):
    response = client.post("/users")
    assert response.status_code == 200
    body = response.json()
    return body, {"Authorization": f"Bearer {body['token']}"}


def checkin_body(lat1, lng1, lat2, lng2, mode="car", label1="Start", label2="End"):
    return {
        "origin": {"lat": lat1, "lng": lng1, "label": label1},
        "destination": {"lat": lat2, "lng": lng2, "label": label2},
        "mode": mode,
    }


class TestAuth:
    def test_register_returns_identity(self, client):
        body, _ = register(client)
        assert set(body) == {"user_id", "pseudonym", "token", "created_at"}
        assert len(body["pseudonym"].split(" ")) in (2, 3)

    def test_missing_token_is_401(self, client):
        response = client.post("/checkins", json=checkin_body(47.6, -122.3, 47.7, -122.4))
        assert response.status_code == 401
        assert response.json()["error"]["code"] == "auth"

    def test_bad_token_is_401(self, client):
        response = client.get("/me/journeys", headers={"Authorization": "Bearer nope"})
        assert response.status_code == 401

    def test_admin_requires_admin_token(self, client):
        _, headers = register(client)
        response = client.get("/admin/reports/mode-share", headers=headers)
        assert response.status_code == 401


class TestCheckins:
    def test_checkin_and_current(self, client):
        _, headers = register(client)
        response = client.post(
            "/checkins", json=checkin_body(47.6062, -122.3321, 47.6205, -122.3493),
            headers=headers,
        )
        assert response.status_code == 200
        body = response.json()
        assert body["trailblazer"] is True
        assert body["welcome"]["kind"] in ("stats", "haiku", "fun-fact")
        assert body["journey"]["origin_label"] == "Start"

        current = client.get("/me/current", headers=headers)
        assert current.status_code == 200
        assert current.json()["checkin_id"] == body["checkin_id"]

    def test_no_current_checkin_is_404(self, client):
        _, headers = register(client)
        response = client.get("/me/current", headers=headers)
        assert response.status_code == 404

    def test_unknown_mode_is_400(self, client):
        _, headers = register(client)
        response = client.post(
            "/checkins",
            json=checkin_body(47.6, -122.3, 47.7, -122.4, mode="zeppelin"),
            headers=headers,
        )
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "validation"

    def test_missing_endpoints_is_400(self, client):
        _, headers = register(client)
        response = client.post("/checkins", json={"mode": "car"}, headers=headers)
        assert response.status_code == 400

    def test_repeat_checkin_by_previous_id(self, client):
        _, headers = register(client)
        first = client.post(
            "/checkins", json=checkin_body(47.6, -122.3, 47.7, -122.4), headers=headers
        ).json()
        again = client.post(
            "/checkins",
            json={"previous_journey_id": first["journey"]["journey_id"], "mode": "bus"},
            headers=headers,
        )
        assert again.status_code == 200
        assert again.json()["journey"]["journey_id"] == first["journey"]["journey_id"]

    def test_out_of_range_coordinates_rejected(self, client):
        _, headers = register(client)
        response = client.post(
            "/checkins", json=checkin_body(95.0, -122.3, 47.7, -122.4), headers=headers
        )
        assert response.status_code == 400

    def test_default_label_falls_back_to_coordinates(self, client):
        _, headers = register(client)
        response = client.post(
            "/checkins",
            json={
                "origin": {"lat": 47.6, "lng": -122.3},
                "destination": {"lat": 47.7, "lng": -122.4},
                "mode": "car",
            },
            headers=headers,
        )
        assert response.status_code == 200
        assert "47.6" in response.json()["journey"]["origin_label"]


class TestStatsAndHistory:
    def test_journey_cards_and_stats(self, client):
        _, headers = register(client)
        first = client.post(
            "/checkins", json=checkin_body(47.6, -122.3, 47.7, -122.4), headers=headers
        ).json()
        client.post(
            "/checkins",
            json={"previous_journey_id": first["journey"]["journey_id"], "mode": "bus"},
            headers=headers,
        )
        cards = client.get("/me/journeys", headers=headers).json()["journeys"]
        assert len(cards) == 1
        assert cards[0]["mode_counts"] == {"car": 1, "bus": 1}

        stats = client.get("/me/stats", headers=headers).json()
        assert stats["total_checkins"] == 2
        assert stats["modes"]["car"]["count"] == 1
        assert "km" in stats["modes"]["car"]["distance_display"]

        miles = client.get("/me/stats", params={"units": "mi"}, headers=headers).json()
        assert "mi" in miles["modes"]["car"]["distance_display"]


class TestNotesFlow:
    def test_full_session(self, client):
        # register -> suggest -> check in -> compose -> second user sees it
        _, headers_a = register(client)
        suggestions = client.get(
            "/suggest",
            params={"q": "pike", "lat": 47.6062, "lng": -122.3321},
            headers=headers_a,
        ).json()["suggestions"]
        assert suggestions, "fixture geocoder should match 'pike'"
        origin = suggestions[0]

        response = client.post(
            "/checkins",
            json={
                "origin": {"lat": origin["lat"], "lng": origin["lng"], "label": origin["label"]},
                "destination": {"lat": 47.4436, "lng": -122.3016, "label": "Sea-Tac Airport"},
                "mode": "train",
            },
            headers=headers_a,
        ).json()
        assert response["trailblazer"] is True

        note = client.post(
            "/notes",
            json={"text": "left platform smells of cedar", "anonymous": False},
            headers=headers_a,
        )
        assert note.status_code == 200

        _, headers_b = register(client)
        bundled = client.post(
            "/checkins",
            json={
                "origin": {"lat": origin["lat"] + 0.001, "lng": origin["lng"], "label": "near"},
                "destination": {"lat": 47.4436, "lng": -122.3026, "label": "also near"},
                "mode": "bus",
            },
            headers=headers_b,
        ).json()
        assert bundled["trailblazer"] is False
        texts = [n["text"] for n in bundled["feed"]]
        assert "left platform smells of cedar" in texts

        feed = client.get("/journey/feed", headers=headers_b).json()
        assert [n["text"] for n in feed["notes"]] == texts

    def test_note_requires_checkin(self, client):
        _, headers = register(client)
        response = client.post("/notes", json={"text": "hi"}, headers=headers)
        assert response.status_code == 409
        assert response.json()["error"]["code"] == "no_current_checkin"

    def test_note_validation_over_wire(self, client):
        _, headers = register(client)
        client.post("/checkins", json=checkin_body(47.6, -122.3, 47.7, -122.4), headers=headers)
        ok = client.post("/notes", json={"text": "x" * 250}, headers=headers)
        assert ok.status_code == 200
        too_long = client.post("/notes", json={"text": "x" * 251}, headers=headers)
        assert too_long.status_code == 400
        assert ok.json()["category"] == "notes-and-visitors"

    def test_detail_and_comments(self, client):
        _, headers = register(client)
        client.post("/checkins", json=checkin_body(47.6, -122.3, 47.7, -122.4), headers=headers)
        note = client.post("/notes", json={"text": "root"}, headers=headers).json()
        comment = client.post(
            f"/notes/{note['note_id']}/comments",
            json={"text": "reply", "anonymous": True},
            headers=headers,
        )
        assert comment.status_code == 200
        assert comment.json()["display_author"] == "anonymous"
        detail = client.get(f"/notes/{note['note_id']}", headers=headers).json()
        assert detail["note"]["comment_count"] == 1
        assert [c["text"] for c in detail["comments"]] == ["reply"]

    def test_invisible_note_is_404(self, client):
        _, headers_a = register(client)
        client.post("/checkins", json=checkin_body(47.6, -122.3, 47.7, -122.4), headers=headers_a)
        note = client.post("/notes", json={"text": "city note"}, headers=headers_a).json()

        _, headers_b = register(client)
        client.post("/checkins", json=checkin_body(34.05, -118.24, 34.15, -118.34), headers=headers_b)
        response = client.get(f"/notes/{note['note_id']}", headers=headers_b)
        assert response.status_code == 404

    def test_anonymous_note_leaks_nothing_over_the_wire(self, client):
        author, headers = register(client)
        client.post("/checkins", json=checkin_body(47.6, -122.3, 47.7, -122.4), headers=headers)
        client.post("/notes", json={"text": "quiet", "anonymous": True}, headers=headers)
        feed = client.get("/journey/feed", headers=headers)
        assert author["pseudonym"] not in feed.text
        assert f'"{author["user_id"]}"' not in feed.text


class TestAdmin:
    def admin_headers(self):
        return {"Authorization": f"Bearer {ADMIN_TOKEN}"}

    def test_seed_and_mode_share(self, client):
        lines = "\n".join([seed_line("one"), seed_line("two", author="dusky arctic finch")])
        response = client.post("/admin/seed", content=lines, headers=self.admin_headers())
        assert response.status_code == 200
        assert response.json()["ingested"] == 2
        again = client.post("/admin/seed", content=lines, headers=self.admin_headers())
        assert again.json() == {"ingested": 0, "duplicates": 2, "failures": []}

        _, headers = register(client)
        client.post("/checkins", json=checkin_body(47.6, -122.3, 47.7, -122.4), headers=headers)
        report = client.get("/admin/reports/mode-share", headers=self.admin_headers()).json()
        assert report["total"] == 1
        assert report["report"][0] == {"mode": "car", "count": 1, "percent": 100}

    def test_admin_disabled_without_config(self, app_store):
        app = create_app(ServiceConfig(), store=app_store, rng=random.Random(7))
        client = TestClient(app)
        response = client.get(
            "/admin/reports/mode-share", headers={"Authorization": "Bearer anything"}
        )
        assert response.status_code == 401


class TestRateLimit:
    def test_limit_trips_429(self, app_store):
        config = ServiceConfig(rate_limit_per_minute=3)
        app = create_app(config, store=app_store, rng=random.Random(7))
        client = TestClient(app)
        _, headers = register(client)
        for _ in range(3):
            assert client.get("/me/journeys", headers=headers).status_code == 200
        blocked = client.get("/me/journeys", headers=headers)
        assert blocked.status_code == 429
        assert blocked.json()["error"]["code"] == "rate_limited"


class TestAtomicityOverWire:
    def test_failed_store_write_returns_500_and_no_rows(self, app_store, monkeypatch):
        config = ServiceConfig()
        app = create_app(config, store=app_store, rng=random.Random(7))
        client = TestClient(app, raise_server_exceptions=False)
        _, headers = register(client)

        def explode(events):
            raise PersistenceError("disk full")

        monkeypatch.setattr(app_store, "_commit", explode)
        response = client.post(
            "/checkins", json=checkin_body(47.6, -122.3, 47.7, -122.4), headers=headers
        )
        assert response.status_code == 500
        assert app_store.journeys == {}
        assert app_store.checkins == {}
