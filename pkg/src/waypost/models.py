"""Domain records shared across the service: journeys, check-ins, notes, users, stats."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum

from .errors import ValidationError
from .geo import GeoPoint


class TransitMode(str, Enum):
    """The closed set of travel modes; the mode icon doubles as the user's avatar."""

    CAR = "car"
    BUS = "bus"
    TRAIN = "train"
    AIRPLANE = "airplane"
    WALK = "walk"
    BICYCLE = "bicycle"
    FERRY = "ferry"
    MOTORCYCLE = "motorcycle"
    SKATEBOARD = "skateboard"
    HORSE = "horse"
    WHEELCHAIR = "wheelchair"
    ROCKET = "rocket"

    @property
    def avatar(self) -> str:
        """Stable identifier for the mode's avatar art."""
        return f"avatar-{self.value}"

    @classmethod
    def parse(cls, name: str) -> "TransitMode":
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ValidationError(f"unknown transit mode {name!r}") from None


class NoteCategory(str, Enum):
    NOTES_AND_VISITORS = "notes-and-visitors"
    SECRETS_AND_STORIES = "secrets-and-stories"
    LOVE_AND_HATE = "love-and-hate"
    MISSED_CONNECTIONS = "missed-connections"
    TIPS_AND_TRICKS = "tips-and-tricks"

    @property
    def color_tag(self) -> str:
        return _CATEGORY_COLORS[self]

    @classmethod
    def parse(cls, name: str) -> "NoteCategory":
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ValidationError(f"unknown note category {name!r}") from None


DEFAULT_CATEGORY = NoteCategory.NOTES_AND_VISITORS

_CATEGORY_COLORS = {
    NoteCategory.NOTES_AND_VISITORS: "sky",
    NoteCategory.SECRETS_AND_STORIES: "violet",
    NoteCategory.LOVE_AND_HATE: "rose",
    NoteCategory.MISSED_CONNECTIONS: "amber",
    NoteCategory.TIPS_AND_TRICKS: "moss",
}

NOTE_MAX_CHARS = 250


@dataclass(frozen=True)
class UserRecord:
    """An install-scoped identity. The pseudonym never changes."""

    user_id: str
    pseudonym: str
    token: str
    created_at: datetime
    synthetic: bool = False  # authors of seeded content, never issued to a device


@dataclass(frozen=True)
class Journey:
    """A directed pair of endpoints; the paths taken in between don't matter."""

    journey_id: str
    origin: GeoPoint
    destination: GeoPoint
    origin_label: str
    destination_label: str
    length_m: float  # cached crow-flies distance
    created_by: str
    created_at: datetime


@dataclass(frozen=True)
class Checkin:
    checkin_id: str
    user_id: str
    journey_id: str
    mode: TransitMode
    created_at: datetime
    trailblazer: bool


@dataclass(frozen=True)
class Note:
    note_id: str
    journey_id: str
    author_user_id: str  # always kept, even for anonymous notes
    anonymous: bool
    category: NoteCategory
    text: str
    mode: TransitMode  # the author's check-in mode when composing
    created_at: datetime
    seeded: bool = False


@dataclass(frozen=True)
class Comment:
    comment_id: str
    note_id: str
    author_user_id: str
    anonymous: bool
    text: str
    created_at: datetime


ANONYMOUS_AUTHOR = "anonymous"


@dataclass(frozen=True)
class NoteView:
    """What a reader sees. For anonymous notes nothing here leads back to the author."""

    note_id: str
    display_author: str
    mode_avatar: str
    category: NoteCategory
    color_tag: str
    text: str
    created_at: datetime
    comment_count: int


@dataclass(frozen=True)
class CommentView:
    comment_id: str
    display_author: str
    text: str
    created_at: datetime


@dataclass(frozen=True)
class JourneyCard:
    journey_id: str
    origin_label: str
    destination_label: str
    mode_counts: dict[str, int]
    last_checkin_at: datetime


@dataclass
class JourneyStats:
    trips: int = 0
    mode_counts: dict[str, int] = field(default_factory=dict)
    mode_distance_m: dict[str, float] = field(default_factory=dict)


@dataclass
class UserStats:
    """Per-user quantified-self counters, in meters, maintained check-in by check-in."""

    mode_counts: dict[str, int] = field(default_factory=dict)
    mode_distance_m: dict[str, float] = field(default_factory=dict)
    journeys: dict[str, JourneyStats] = field(default_factory=dict)

    @property
    def total_checkins(self) -> int:
        return sum(self.mode_counts.values())


@dataclass(frozen=True)
class WelcomeMessage:
    kind: str  # "stats" | "haiku" | "fun-fact"
    text: str


WELCOME_KINDS = ("stats", "haiku", "fun-fact")


@dataclass(frozen=True)
class EndpointSuggestion:
    label: str
    kind: str  # "venue" | "address"
    location: GeoPoint
    rank_score: float
