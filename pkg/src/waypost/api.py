"""REST surface over the domain modules. JSON in, JSON out, bearer-token auth.

Field names here are the wire contract; they are documented in the README
API reference and consumed by the web client.
"""

from __future__ import annotations

import random
import time
from datetime import datetime
from pathlib import Path

from fastapi import Depends, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import engagement, identity, journeys, notes, reports, seeds
from .config import ServiceConfig
from .engagement import HaikuCorpus, load_haiku_corpus, mode_summary
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
from .geo import GeoPoint
from .geocoder import FixtureGeocoder, GeocoderAdapter, suggest_endpoints
from .identity import Lexicon, load_default_lexicon
from .models import Checkin, CommentView, Journey, NoteView, UserRecord
from .store import Store

_STATUS_BY_ERROR = {
    ValidationError: 400,
    AuthError: 401,
    NotFoundError: 404,
    StateError: 409,
    RateLimitError: 429,
    CapacityError: 503,
    PersistenceError: 500,
}


def _status_for(exc: WaypostError) -> int:
    for klass, status in _STATUS_BY_ERROR.items():
        if isinstance(exc, klass):
            return status
    return 500


def rfc3339(dt: datetime) -> str:
    return dt.isoformat().replace("+00:00", "Z")


class CoordIn(BaseModel):
    lat: float
    lng: float
    label: str | None = None


class CheckinIn(BaseModel):
    origin: CoordIn | None = None
    destination: CoordIn | None = None
    previous_journey_id: str | None = None
    mode: str


class NoteIn(BaseModel):
    text: str
    category: str | None = None
    anonymous: bool = False


class CommentIn(BaseModel):
    text: str
    anonymous: bool = False


class _RateLimiter:
    """Fixed one-minute window per api token."""

    def __init__(self, per_minute: int):
        self.per_minute = per_minute
        self._windows: dict[str, tuple[float, int]] = {}

    def check(self, token: str) -> None:
        if self.per_minute <= 0:
            return
        now = time.monotonic()
        start, count = self._windows.get(token, (now, 0))
        if now - start >= 60.0:
            start, count = now, 0
        count += 1
        self._windows[token] = (start, count)
        if count > self.per_minute:
            raise RateLimitError("too many requests for this token")


def _point_json(p: GeoPoint) -> dict:
    return {"lat": p.latitude, "lng": p.longitude}


def _journey_json(j: Journey) -> dict:
    return {
        "journey_id": j.journey_id,
        "origin": _point_json(j.origin),
        "destination": _point_json(j.destination),
        "origin_label": j.origin_label,
        "destination_label": j.destination_label,
        "length_m": j.length_m,
        "created_at": rfc3339(j.created_at),
    }


def _checkin_json(c: Checkin, j: Journey) -> dict:
    return {
        "checkin_id": c.checkin_id,
        "journey_id": c.journey_id,
        "mode": c.mode.value,
        "trailblazer": c.trailblazer,
        "created_at": rfc3339(c.created_at),
        "journey": _journey_json(j),
    }


def _note_view_json(v: NoteView) -> dict:
    return {
        "note_id": v.note_id,
        "display_author": v.display_author,
        "mode_avatar": v.mode_avatar,
        "category": v.category.value,
        "color_tag": v.color_tag,
        "text": v.text,
        "created_at": rfc3339(v.created_at),
        "comment_count": v.comment_count,
    }


def _comment_view_json(v: CommentView) -> dict:
    return {
        "comment_id": v.comment_id,
        "display_author": v.display_author,
        "text": v.text,
        "created_at": rfc3339(v.created_at),
    }


def create_app(
    config: ServiceConfig | None = None,
    *,
    store: Store | None = None,
    lexicon: Lexicon | None = None,
    corpus: HaikuCorpus | None = None,
    geocoder: GeocoderAdapter | None = None,
    rng: random.Random | None = None,
) -> FastAPI:
    config = config or ServiceConfig()
    store = store or Store(config.data_path)
    lexicon = lexicon or load_default_lexicon()
    corpus = corpus if corpus is not None else load_haiku_corpus()
    geocoder = geocoder or FixtureGeocoder.from_packaged()
    rng = rng or random.SystemRandom()
    limiter = _RateLimiter(config.rate_limit_per_minute)

    app = FastAPI(title="waypost", version="0.1.0", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.config = config

    @app.exception_handler(WaypostError)
    async def _domain_error(request: Request, exc: WaypostError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.exception_handler(RequestValidationError)
    async def _request_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "validation", "message": str(exc.errors()[:1])}},
        )

    def _bearer_token(request: Request) -> str:
        header = request.headers.get("authorization", "")
        scheme, _, token = header.partition(" ")
        if scheme.lower() != "bearer" or not token.strip():
            raise AuthError("missing bearer token")
        return token.strip()

    def current_user(request: Request) -> UserRecord:
        token = _bearer_token(request)
        user = store.user_by_token(token)
        if user is None or user.synthetic:
            raise AuthError("invalid api token")
        limiter.check(token)
        return user

    def admin_guard(request: Request) -> None:
        if not config.admin_token:
            raise AuthError("admin endpoints are disabled (no admin_token configured)")
        if _bearer_token(request) != config.admin_token:
            raise AuthError("invalid admin token")

    def _current_checkin_or_409(user: UserRecord) -> Checkin:
        current = store.current_checkin(user.user_id)
        if current is None:
            raise StateError("check in to a journey first", code="no_current_checkin")
        return current

    @app.post("/users")
    def register():
        record = identity.register_user(store, lexicon, rng)
        return {
            "user_id": record.user_id,
            "pseudonym": record.pseudonym,
            "token": record.token,
            "created_at": rfc3339(record.created_at),
        }

    @app.get("/suggest")
    def suggest(q: str, lat: float, lng: float, user: UserRecord = Depends(current_user)):
        result = suggest_endpoints(q, GeoPoint(lat, lng), geocoder)
        return {
            "suggestions": [
                {
                    "label": s.label,
                    "kind": s.kind,
                    "lat": s.location.latitude,
                    "lng": s.location.longitude,
                    "rank_score": s.rank_score,
                }
                for s in result.suggestions
            ],
            "degraded": list(result.degraded),
        }

    @app.post("/checkins")
    def checkin(body: CheckinIn, user: UserRecord = Depends(current_user)):
        origin = GeoPoint(body.origin.lat, body.origin.lng) if body.origin else None
        destination = (
            GeoPoint(body.destination.lat, body.destination.lng) if body.destination else None
        )
        result = journeys.check_in(
            store,
            user.user_id,
            mode=body.mode,
            origin=origin,
            destination=destination,
            origin_label=body.origin.label if body.origin else None,
            destination_label=body.destination.label if body.destination else None,
            previous_journey_id=body.previous_journey_id,
            cfg=config.community,
            epsilon_m=config.dedup_epsilon_m,
            corpus=corpus,
            rng=rng,
            bird_speed_mps=config.bird_speed_mps,
        )
        return {
            "checkin_id": result.checkin.checkin_id,
            "trailblazer": result.trailblazer,
            "welcome": {"kind": result.welcome.kind, "text": result.welcome.text},
            "journey": _journey_json(result.journey),
            "feed": [_note_view_json(v) for v in result.feed],
        }

    @app.get("/me/current")
    def me_current(user: UserRecord = Depends(current_user)):
        current = store.current_checkin(user.user_id)
        if current is None:
            raise NotFoundError("no current check-in")
        return _checkin_json(current, store.get_journey(current.journey_id))

    @app.get("/me/journeys")
    def me_journeys(user: UserRecord = Depends(current_user)):
        cards = journeys.journey_history(user.user_id, store)
        return {
            "journeys": [
                {
                    "journey_id": card.journey_id,
                    "origin_label": card.origin_label,
                    "destination_label": card.destination_label,
                    "mode_counts": card.mode_counts,
                    "last_checkin_at": rfc3339(card.last_checkin_at),
                }
                for card in cards
            ]
        }

    @app.get("/me/stats")
    def me_stats(units: str | None = None, user: UserRecord = Depends(current_user)):
        units = units or config.units
        if units not in ("km", "mi"):
            raise ValidationError("units must be 'km' or 'mi'")
        stats = store.get_stats(user.user_id)
        summary = mode_summary(stats)
        return {
            "total_checkins": stats.total_checkins,
            "modes": {
                mode: {
                    "count": totals.count,
                    "distance_m": totals.distance_m,
                    "distance_display": engagement.format_distance(totals.distance_m, units),
                }
                for mode, totals in summary.items()
            },
        }

    @app.get("/journey/feed")
    def journey_feed(user: UserRecord = Depends(current_user)):
        current = _current_checkin_or_409(user)
        feed = notes.journey_feed(current, store, config.community)
        return {
            "journey_id": current.journey_id,
            "notes": [_note_view_json(v) for v in feed],
        }

    @app.post("/notes")
    def post_note(body: NoteIn, user: UserRecord = Depends(current_user)):
        note = notes.compose_note(
            store,
            user.user_id,
            body.text,
            category=body.category,
            anonymous=body.anonymous,
        )
        return _note_view_json(notes.note_view(store, note))

    @app.get("/notes/{note_id}")
    def get_note(note_id: str, user: UserRecord = Depends(current_user)):
        current = _current_checkin_or_409(user)
        view, comments = notes.note_detail(current, note_id, store, config.community)
        return {
            "note": _note_view_json(view),
            "comments": [_comment_view_json(c) for c in comments],
        }

    @app.post("/notes/{note_id}/comments")
    def post_comment(note_id: str, body: CommentIn, user: UserRecord = Depends(current_user)):
        comment = notes.add_comment(
            store,
            user.user_id,
            note_id,
            body.text,
            anonymous=body.anonymous,
            cfg=config.community,
        )
        return _comment_view_json(notes.comment_view(store, comment))

    @app.post("/admin/seed")
    async def admin_seed(request: Request, _: None = Depends(admin_guard)):
        body = (await request.body()).decode("utf-8")
        report = seeds.ingest_seed_notes(
            body.splitlines(), store, epsilon_m=config.dedup_epsilon_m
        )
        return {
            "ingested": report.ingested,
            "duplicates": report.duplicates,
            "failures": [{"line": f.line, "reason": f.reason} for f in report.failures],
        }

    @app.get("/admin/reports/mode-share")
    def admin_mode_share(_: None = Depends(admin_guard)):
        rows = reports.mode_share_report(store)
        return {
            "total": sum(r.count for r in rows),
            "report": [
                {"mode": r.mode, "count": r.count, "percent": r.percent} for r in rows
            ],
        }

    if config.ui_dir and Path(config.ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
