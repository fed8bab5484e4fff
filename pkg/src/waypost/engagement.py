"""Travel statistics and the randomized check-in welcome engine.

Welcomes come in three kinds, picked uniformly at random: journey stats with
milestones, a travel haiku, or a fun fact (how long a bird would take to fly
the distance).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ValidationError
from .models import (
    Checkin,
    Journey,
    JourneyStats,
    NoteCategory,
    TransitMode,
    UserStats,
    WELCOME_KINDS,
    WelcomeMessage,
)

DEFAULT_BIRD_SPEED_KMH = 40.0
MIN_HAIKUS_TOTAL = 45
MIN_HAIKUS_PER_CATEGORY = 3

METERS_PER_MILE = 1609.344


def record_checkin_stats(stats: UserStats, checkin: Checkin, journey_length_m: float) -> UserStats:
    """Fold one check-in into the user's counters (totals and per-journey)."""
    mode = checkin.mode.value
    stats.mode_counts[mode] = stats.mode_counts.get(mode, 0) + 1
    stats.mode_distance_m[mode] = stats.mode_distance_m.get(mode, 0.0) + journey_length_m
    per_journey = stats.journeys.setdefault(checkin.journey_id, JourneyStats())
    per_journey.trips += 1
    per_journey.mode_counts[mode] = per_journey.mode_counts.get(mode, 0) + 1
    per_journey.mode_distance_m[mode] = (
        per_journey.mode_distance_m.get(mode, 0.0) + journey_length_m
    )
    return stats


def recompute_stats(
    checkins: Iterable[Checkin], journey_lengths: Mapping[str, float]
) -> UserStats:
    """Rebuild stats from scratch off the full check-in log, in log order."""
    stats = UserStats()
    for checkin in checkins:
        record_checkin_stats(stats, checkin, journey_lengths[checkin.journey_id])
    return stats


@dataclass(frozen=True)
class ModeTotals:
    count: int
    distance_m: float


def mode_summary(stats: UserStats) -> dict[str, ModeTotals]:
    """Profile-page projection of the totals; modes never used are omitted."""
    out = {
        mode: ModeTotals(count, stats.mode_distance_m.get(mode, 0.0))
        for mode, count in stats.mode_counts.items()
        if count > 0
    }
    return dict(sorted(out.items(), key=lambda kv: (-kv[1].count, kv[0])))


def format_distance(meters: float, units: str = "km") -> str:
    if units == "mi":
        return f"{meters / METERS_PER_MILE:.1f} mi"
    return f"{meters / 1000.0:.1f} km"


@dataclass(frozen=True)
class Haiku:
    lines: tuple[str, str, str]
    section: NoteCategory

    @property
    def text(self) -> str:
        return "\n".join(self.lines)


@dataclass(frozen=True)
class HaikuCorpus:
    entries: tuple[Haiku, ...]

    def __len__(self) -> int:
        return len(self.entries)


def load_haiku_corpus(path: str | Path | None = None) -> HaikuCorpus:
    """Parse the corpus file: a [category] tag line, three haiku lines, blank line between.

    Loaded corpora must hold at least three haikus per note category.
    """
    if path is None:
        text = resources.files("waypost").joinpath("data/haikus.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    entries: list[Haiku] = []
    block: list[str] = []
    for raw in text.splitlines() + [""]:
        line = raw.rstrip()
        if line:
            block.append(line)
            continue
        if not block:
            continue
        if len(block) != 4 or not (block[0].startswith("[") and block[0].endswith("]")):
            raise ValidationError(
                f"bad haiku record near {block[0]!r}: expected [category] plus three lines"
            )
        section = NoteCategory.parse(block[0][1:-1])
        entries.append(Haiku((block[1], block[2], block[3]), section))
        block = []

    per_category = {cat: 0 for cat in NoteCategory}
    for haiku in entries:
        per_category[haiku.section] += 1
    lacking = [cat.value for cat, n in per_category.items() if n < MIN_HAIKUS_PER_CATEGORY]
    if lacking:
        raise ValidationError(f"corpus needs {MIN_HAIKUS_PER_CATEGORY} haikus per category; short on {lacking}")
    return HaikuCorpus(tuple(entries))


def fun_fact(journey_length_m: float, bird_speed_mps: float) -> str:
    """How long a bird flying flat-out would take to cover the journey."""
    if journey_length_m < 0:
        raise ValidationError("length must be non-negative")
    if bird_speed_mps <= 0:
        raise ValidationError("bird speed must be positive")
    kmh = bird_speed_mps * 3.6
    if journey_length_m == 0:
        return "A bird could cover this journey in no time at all."
    flight = _humanize_duration(journey_length_m / bird_speed_mps)
    return f"A songbird flying nonstop at {kmh:g} km/h would take {flight} to cover this journey."


def _humanize_duration(seconds: float) -> str:
    minutes = seconds / 60.0
    if round(minutes) < 1:
        return "less than a minute"
    if round(minutes) < 60:
        n = round(minutes)
        return f"about {n} minute{'s' if n != 1 else ''}"
    hours = seconds / 3600.0
    if round(hours) < 48:
        n = round(hours)
        return f"about {n} hour{'s' if n != 1 else ''}"
    n = round(hours / 24.0)
    return f"about {n} day{'s' if n != 1 else ''}"


@dataclass(frozen=True)
class WelcomeContext:
    """Everything the welcome engine may mention, captured just after the check-in."""

    journey: Journey
    stats: UserStats  # post-check-in
    user_visits: int  # trips by this user on this journey, counting this one
    other_travellers: int  # distinct other users seen on this journey
    mode: TransitMode
    bird_speed_mps: float = DEFAULT_BIRD_SPEED_KMH / 3.6


def select_welcome(
    context: WelcomeContext, corpus: HaikuCorpus, rng: random.Random
) -> WelcomeMessage:
    """Pick one of the three welcome kinds uniformly and render it.

    An empty corpus downgrades a haiku draw to the stats kind.
    """
    kind = WELCOME_KINDS[rng.randrange(len(WELCOME_KINDS))]
    if kind == "haiku" and len(corpus) == 0:
        kind = "stats"
    if kind == "haiku":
        haiku = corpus.entries[rng.randrange(len(corpus))]
        return WelcomeMessage(kind="haiku", text=haiku.text)
    if kind == "fun-fact":
        return WelcomeMessage(
            kind="fun-fact",
            text=fun_fact(context.journey.length_m, context.bird_speed_mps),
        )
    return WelcomeMessage(kind="stats", text=_render_stats_welcome(context))


def _render_stats_welcome(ctx: WelcomeContext) -> str:
    visits = ctx.user_visits
    others = ctx.other_travellers
    parts = [
        f"You have made this journey {visits} time{'s' if visits != 1 else ''}.",
        f"{others} other traveller{'s have' if others != 1 else ' has'} been here.",
    ]
    parts.extend(f"Milestone: {m}!" for m in milestones(ctx))
    return " ".join(parts)


def milestones(ctx: WelcomeContext) -> list[str]:
    """Notable marks hit by this check-in: every 10th trip on the journey, and
    each power-of-ten kilometer total crossed for the mode."""
    out: list[str] = []
    if ctx.user_visits > 0 and ctx.user_visits % 10 == 0:
        out.append(f"trip {ctx.user_visits} on this journey")
    mode = ctx.mode.value
    new_total = ctx.stats.mode_distance_m.get(mode, 0.0)
    old_total = new_total - ctx.journey.length_m
    for power in range(9):
        threshold_m = (10**power) * 1000.0
        if old_total < threshold_m <= new_total:
            out.append(f"{10**power:,} km travelled by {mode}")
    return out
