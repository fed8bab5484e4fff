"""Embedded persistence: in-memory state with an optional append-only journal.

Every mutation happens inside a write transaction. The transaction stages
records, writes them to the journal as a single line, then applies them to
memory — so a failed request leaves no partial rows, and a torn final line
from a crash is simply ignored on reload.
"""

from __future__ import annotations

import json
import threading
from collections import Counter, defaultdict
from contextlib import contextmanager
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Callable, Iterator

from . import engagement
from .errors import (
    NotFoundError,
    PersistenceError,
    PseudonymTakenError,
    ValidationError,
)
from .geo import GeoPoint, JourneyIndex, haversine_distance
from .models import (
    Checkin,
    Comment,
    Journey,
    Note,
    NoteCategory,
    TransitMode,
    UserRecord,
    UserStats,
)

_TICK = timedelta(microseconds=1)


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class Store:
    """Holds users, journeys, check-ins, notes, comments, stats, and the spatial index.

    A single re-entrant lock serializes all writes (which also gives per-user
    write serialization); reads take the lock briefly and return snapshots.
    """

    def __init__(
        self,
        journal_path: str | Path | None = None,
        *,
        clock: Callable[[], datetime] | None = None,
    ):
        self.lock = threading.RLock()
        self._clock = clock or _utcnow
        self._last_ts: datetime | None = None
        self._counters: dict[str, int] = defaultdict(int)

        self.users: dict[str, UserRecord] = {}
        self._user_by_token: dict[str, str] = {}
        self._user_by_pseudonym: dict[str, str] = {}
        self.journeys: dict[str, Journey] = {}
        self.index = JourneyIndex()
        self.checkins: dict[str, Checkin] = {}
        self._checkins_by_user: dict[str, list[Checkin]] = defaultdict(list)
        self._checkins_by_journey: dict[str, list[Checkin]] = defaultdict(list)
        self._current_by_user: dict[str, Checkin] = {}
        self.notes: dict[str, Note] = {}
        self._notes_by_journey: dict[str, list[Note]] = defaultdict(list)
        self._comments_by_note: dict[str, list[Comment]] = defaultdict(list)
        self._stats: dict[str, UserStats] = {}
        self.seed_hashes: set[str] = set()
        self.pseudonym_collisions = 0  # uniqueness-check rejections, for ops visibility

        self._journal_path = Path(journal_path) if journal_path else None
        self._journal_file = None
        if self._journal_path:
            self._replay_journal()
            self._journal_path.parent.mkdir(parents=True, exist_ok=True)
            self._journal_file = open(self._journal_path, "a", encoding="utf-8")

    # ------------------------------------------------------------------ time

    def next_timestamp(self) -> datetime:
        """Strictly increasing wall-clock timestamps (bumped on collision)."""
        now = self._clock()
        if self._last_ts is not None and now <= self._last_ts:
            now = self._last_ts + _TICK
        self._last_ts = now
        return now

    def _new_id(self, prefix: str) -> str:
        self._counters[prefix] += 1
        return f"{prefix}{self._counters[prefix]}"

    # ----------------------------------------------------------------- writes

    @contextmanager
    def write(self) -> Iterator["WriteTxn"]:
        """All-or-nothing write scope; nothing is visible until the block exits."""
        with self.lock:
            txn = WriteTxn(self)
            yield txn
            self._commit(txn.events)

    def _commit(self, events: list[dict]) -> None:
        if not events:
            return
        self._journal_append(events)
        for event in events:
            self._apply(event)

    def _journal_append(self, events: list[dict]) -> None:
        if self._journal_file is None:
            return
        try:
            self._journal_file.write(json.dumps({"events": events}) + "\n")
            self._journal_file.flush()
        except OSError as exc:
            raise PersistenceError(f"journal write failed: {exc}") from exc

    def _replay_journal(self) -> None:
        if not self._journal_path or not self._journal_path.exists():
            return
        lines = self._journal_path.read_text(encoding="utf-8").splitlines()
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                batch = json.loads(line)
            except json.JSONDecodeError:
                if lineno == len(lines):
                    break  # torn final write from a crash; drop it
                raise PersistenceError(f"corrupt journal line {lineno}")
            for event in batch["events"]:
                self._apply(event)

    # One apply path for fresh writes and replay keeps the two identical.
    def _apply(self, event: dict) -> None:
        kind = event["t"]
        if kind == "user":
            record = UserRecord(
                user_id=event["user_id"],
                pseudonym=event["pseudonym"],
                token=event["token"],
                created_at=datetime.fromisoformat(event["created_at"]),
                synthetic=event.get("synthetic", False),
            )
            self.users[record.user_id] = record
            self._user_by_token[record.token] = record.user_id
            self._user_by_pseudonym[record.pseudonym] = record.user_id
            self._note_id_seen("u", record.user_id)
            self._note_ts(record.created_at)
        elif kind == "journey":
            journey = Journey(
                journey_id=event["journey_id"],
                origin=GeoPoint(*event["origin"]),
                destination=GeoPoint(*event["destination"]),
                origin_label=event["origin_label"],
                destination_label=event["destination_label"],
                length_m=event["length_m"],
                created_by=event["created_by"],
                created_at=datetime.fromisoformat(event["created_at"]),
            )
            self.journeys[journey.journey_id] = journey
            self.index.add(journey.journey_id, journey.origin, journey.destination)
            self._note_id_seen("j", journey.journey_id)
            self._note_ts(journey.created_at)
        elif kind == "checkin":
            checkin = Checkin(
                checkin_id=event["checkin_id"],
                user_id=event["user_id"],
                journey_id=event["journey_id"],
                mode=TransitMode(event["mode"]),
                created_at=datetime.fromisoformat(event["created_at"]),
                trailblazer=event["trailblazer"],
            )
            self.checkins[checkin.checkin_id] = checkin
            self._checkins_by_user[checkin.user_id].append(checkin)
            self._checkins_by_journey[checkin.journey_id].append(checkin)
            self._current_by_user[checkin.user_id] = checkin
            stats = self._stats.setdefault(checkin.user_id, UserStats())
            engagement.record_checkin_stats(
                stats, checkin, self.journeys[checkin.journey_id].length_m
            )
            self._note_id_seen("ci", checkin.checkin_id)
            self._note_ts(checkin.created_at)
        elif kind == "note":
            note = Note(
                note_id=event["note_id"],
                journey_id=event["journey_id"],
                author_user_id=event["author_user_id"],
                anonymous=event["anonymous"],
                category=NoteCategory(event["category"]),
                text=event["text"],
                mode=TransitMode(event["mode"]),
                created_at=datetime.fromisoformat(event["created_at"]),
                seeded=event.get("seeded", False),
            )
            self.notes[note.note_id] = note
            self._notes_by_journey[note.journey_id].append(note)
            self._note_id_seen("n", note.note_id)
            self._note_ts(note.created_at)
        elif kind == "comment":
            comment = Comment(
                comment_id=event["comment_id"],
                note_id=event["note_id"],
                author_user_id=event["author_user_id"],
                anonymous=event["anonymous"],
                text=event["text"],
                created_at=datetime.fromisoformat(event["created_at"]),
            )
            self._comments_by_note[comment.note_id].append(comment)
            self._note_id_seen("cm", comment.comment_id)
            self._note_ts(comment.created_at)
        elif kind == "seed":
            self.seed_hashes.add(event["hash"])
        else:
            raise PersistenceError(f"unknown journal event kind {kind!r}")

    def _note_id_seen(self, prefix: str, full_id: str) -> None:
        suffix = full_id[len(prefix):]
        if suffix.isdigit():
            self._counters[prefix] = max(self._counters[prefix], int(suffix))

    def _note_ts(self, ts: datetime) -> None:
        if self._last_ts is None or ts > self._last_ts:
            self._last_ts = ts

    def close(self) -> None:
        if self._journal_file is not None:
            self._journal_file.close()
            self._journal_file = None

    # ------------------------------------------------------------------ reads

    def get_user(self, user_id: str) -> UserRecord:
        with self.lock:
            try:
                return self.users[user_id]
            except KeyError:
                raise NotFoundError(f"no user {user_id!r}") from None

    def user_by_token(self, token: str) -> UserRecord | None:
        with self.lock:
            user_id = self._user_by_token.get(token)
            return self.users[user_id] if user_id else None

    def user_by_pseudonym(self, pseudonym: str) -> UserRecord | None:
        with self.lock:
            user_id = self._user_by_pseudonym.get(pseudonym)
            return self.users[user_id] if user_id else None

    def get_journey(self, journey_id: str) -> Journey:
        with self.lock:
            try:
                return self.journeys[journey_id]
            except KeyError:
                raise NotFoundError(f"no journey {journey_id!r}") from None

    def current_checkin(self, user_id: str) -> Checkin | None:
        with self.lock:
            return self._current_by_user.get(user_id)

    def user_checkins(self, user_id: str) -> tuple[Checkin, ...]:
        with self.lock:
            return tuple(self._checkins_by_user.get(user_id, ()))

    def checkins_on_journey(self, journey_id: str) -> tuple[Checkin, ...]:
        with self.lock:
            return tuple(self._checkins_by_journey.get(journey_id, ()))

    def notes_on_journey(self, journey_id: str) -> tuple[Note, ...]:
        with self.lock:
            return tuple(self._notes_by_journey.get(journey_id, ()))

    def get_note(self, note_id: str) -> Note:
        with self.lock:
            try:
                return self.notes[note_id]
            except KeyError:
                raise NotFoundError(f"no note {note_id!r}") from None

    def find_note(self, note_id: str) -> Note | None:
        with self.lock:
            return self.notes.get(note_id)

    def comments_for(self, note_id: str) -> tuple[Comment, ...]:
        with self.lock:
            return tuple(self._comments_by_note.get(note_id, ()))

    def comment_count(self, note_id: str) -> int:
        with self.lock:
            return len(self._comments_by_note.get(note_id, ()))

    def get_stats(self, user_id: str) -> UserStats:
        """The user's live stats object; treat as read-only outside the store."""
        with self.lock:
            return self._stats.get(user_id) or UserStats()

    def mode_checkin_counts(self) -> Counter:
        with self.lock:
            return Counter(ci.mode.value for ci in self.checkins.values())

    def journey_lengths(self) -> dict[str, float]:
        with self.lock:
            return {jid: j.length_m for jid, j in self.journeys.items()}


class WriteTxn:
    """Stages records for one atomic commit; also allocates their ids and timestamps."""

    def __init__(self, store: Store):
        self._store = store
        self.events: list[dict] = []
        self._staged_pseudonyms: set[str] = set()

    def new_user(self, *, pseudonym: str, token: str, synthetic: bool = False) -> UserRecord:
        store = self._store
        if pseudonym in store._user_by_pseudonym or pseudonym in self._staged_pseudonyms:
            store.pseudonym_collisions += 1
            raise PseudonymTakenError(f"pseudonym {pseudonym!r} already in use")
        if token in store._user_by_token:
            raise ValidationError("token already in use")
        record = UserRecord(
            user_id=store._new_id("u"),
            pseudonym=pseudonym,
            token=token,
            created_at=store.next_timestamp(),
            synthetic=synthetic,
        )
        self._staged_pseudonyms.add(pseudonym)
        self.events.append(
            {
                "t": "user",
                "user_id": record.user_id,
                "pseudonym": record.pseudonym,
                "token": record.token,
                "created_at": record.created_at.isoformat(),
                "synthetic": record.synthetic,
            }
        )
        return record

    def new_journey(
        self,
        *,
        origin: GeoPoint,
        destination: GeoPoint,
        origin_label: str,
        destination_label: str,
        created_by: str,
    ) -> Journey:
        origin_label = origin_label.strip()
        destination_label = destination_label.strip()
        if not origin_label or not destination_label:
            raise ValidationError("journey labels must be non-empty")
        store = self._store
        journey = Journey(
            journey_id=store._new_id("j"),
            origin=origin,
            destination=destination,
            origin_label=origin_label,
            destination_label=destination_label,
            length_m=haversine_distance(origin, destination),
            created_by=created_by,
            created_at=store.next_timestamp(),
        )
        self.events.append(
            {
                "t": "journey",
                "journey_id": journey.journey_id,
                "origin": [origin.latitude, origin.longitude],
                "destination": [destination.latitude, destination.longitude],
                "origin_label": journey.origin_label,
                "destination_label": journey.destination_label,
                "length_m": journey.length_m,
                "created_by": journey.created_by,
                "created_at": journey.created_at.isoformat(),
            }
        )
        return journey

    def new_checkin(
        self, *, user_id: str, journey_id: str, mode: TransitMode, trailblazer: bool
    ) -> Checkin:
        store = self._store
        checkin = Checkin(
            checkin_id=store._new_id("ci"),
            user_id=user_id,
            journey_id=journey_id,
            mode=mode,
            created_at=store.next_timestamp(),
            trailblazer=trailblazer,
        )
        self.events.append(
            {
                "t": "checkin",
                "checkin_id": checkin.checkin_id,
                "user_id": checkin.user_id,
                "journey_id": checkin.journey_id,
                "mode": checkin.mode.value,
                "created_at": checkin.created_at.isoformat(),
                "trailblazer": checkin.trailblazer,
            }
        )
        return checkin

    def new_note(
        self,
        *,
        journey_id: str,
        author_user_id: str,
        anonymous: bool,
        category: NoteCategory,
        text: str,
        mode: TransitMode,
        seeded: bool = False,
    ) -> Note:
        store = self._store
        note = Note(
            note_id=store._new_id("n"),
            journey_id=journey_id,
            author_user_id=author_user_id,
            anonymous=anonymous,
            category=category,
            text=text,
            mode=mode,
            created_at=store.next_timestamp(),
            seeded=seeded,
        )
        self.events.append(
            {
                "t": "note",
                "note_id": note.note_id,
                "journey_id": note.journey_id,
                "author_user_id": note.author_user_id,
                "anonymous": note.anonymous,
                "category": note.category.value,
                "text": note.text,
                "mode": note.mode.value,
                "created_at": note.created_at.isoformat(),
                "seeded": note.seeded,
            }
        )
        return note

    def new_comment(
        self, *, note_id: str, author_user_id: str, anonymous: bool, text: str
    ) -> Comment:
        store = self._store
        comment = Comment(
            comment_id=store._new_id("cm"),
            note_id=note_id,
            author_user_id=author_user_id,
            anonymous=anonymous,
            text=text,
            created_at=store.next_timestamp(),
        )
        self.events.append(
            {
                "t": "comment",
                "comment_id": comment.comment_id,
                "note_id": comment.note_id,
                "author_user_id": comment.author_user_id,
                "anonymous": comment.anonymous,
                "text": comment.text,
                "created_at": comment.created_at.isoformat(),
            }
        )
        return comment

    def add_seed_hash(self, digest: str) -> None:
        self.events.append({"t": "seed", "hash": digest})
