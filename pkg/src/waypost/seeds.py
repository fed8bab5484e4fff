"""Seed-content ingestion: pre-written notes that bootstrap empty journeys.

The seed file is line-delimited JSON, one record per line. Ingestion is
idempotent — every record's content hash is remembered, so a re-run adds
nothing — and each record lands atomically (author, journey, note) or not
at all. Bad records are reported with their line number and skipped.
"""

from __future__ import annotations

import hashlib
import json
import secrets
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from . import notes
from .errors import ValidationError, WaypostError
from .geo import GeoPoint
from .journeys import DEDUP_EPSILON_M, find_canonical_journey
from .models import NoteCategory, TransitMode
from .store import Store

_MODES = list(TransitMode)


@dataclass(frozen=True)
class SeedRecord:
    origin: GeoPoint
    destination: GeoPoint
    origin_label: str
    destination_label: str
    text: str
    category: NoteCategory
    author_pseudonym: str


@dataclass
class IngestFailure:
    line: int
    reason: str


@dataclass
class IngestReport:
    ingested: int = 0
    duplicates: int = 0
    failures: list[IngestFailure] = field(default_factory=list)


def record_digest(raw: dict) -> str:
    return hashlib.sha256(
        json.dumps(raw, sort_keys=True, separators=(",", ":")).encode("utf-8")
    ).hexdigest()


def parse_seed_record(raw: dict) -> SeedRecord:
    try:
        origin = GeoPoint(raw["origin"]["lat"], raw["origin"]["lng"])
        destination = GeoPoint(raw["destination"]["lat"], raw["destination"]["lng"])
        origin_label = str(raw["origin_label"]).strip()
        destination_label = str(raw["destination_label"]).strip()
        text = notes.validate_note_text(str(raw["text"]))
        category = NoteCategory.parse(raw["category"])
        author = str(raw["author_pseudonym"]).strip()
    except KeyError as exc:
        raise ValidationError(f"missing field {exc.args[0]!r}") from None
    except TypeError:
        raise ValidationError("malformed record structure") from None
    if not origin_label or not destination_label:
        raise ValidationError("labels must be non-empty")
    if not author:
        raise ValidationError("author_pseudonym must be non-empty")
    return SeedRecord(origin, destination, origin_label, destination_label, text, category, author)


def _seed_mode(digest: str) -> TransitMode:
    # Seed notes have no live check-in; derive a stable avatar from the record.
    return _MODES[int(digest[:8], 16) % len(_MODES)]


def ingest_seed_notes(
    source: str | Path | Iterable[str],
    store: Store,
    *,
    epsilon_m: float = DEDUP_EPSILON_M,
) -> IngestReport:
    """Load every record from the seed file; returns what happened per line."""
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = [line.rstrip("\n") for line in source]

    report = IngestReport()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            if not isinstance(raw, dict):
                raise ValidationError("record is not a JSON object")
            digest = record_digest(raw)
            with store.lock:
                if digest in store.seed_hashes:
                    report.duplicates += 1
                    continue
                record = parse_seed_record(raw)
                _ingest_one(store, record, digest, epsilon_m)
            report.ingested += 1
        except (json.JSONDecodeError, WaypostError) as exc:
            report.failures.append(IngestFailure(lineno, f"line {lineno}: {exc}"))
    return report


def _ingest_one(store: Store, record: SeedRecord, digest: str, epsilon_m: float) -> None:
    author = store.user_by_pseudonym(record.author_pseudonym)
    journey = find_canonical_journey(store, record.origin, record.destination, epsilon_m)
    with store.write() as txn:
        if author is None:
            author = txn.new_user(
                pseudonym=record.author_pseudonym,
                token=secrets.token_hex(16),
                synthetic=True,
            )
        if journey is None:
            journey = txn.new_journey(
                origin=record.origin,
                destination=record.destination,
                origin_label=record.origin_label,
                destination_label=record.destination_label,
                created_by=author.user_id,
            )
        txn.new_note(
            journey_id=journey.journey_id,
            author_user_id=author.user_id,
            anonymous=False,
            category=record.category,
            text=record.text,
            mode=_seed_mode(digest),
            seeded=True,
        )
        txn.add_seed_hash(digest)
