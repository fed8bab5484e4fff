"""Operational reporting over the store."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .store import Store


@dataclass(frozen=True)
class ModeShare:
    mode: str
    count: int
    percent: int


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def mode_share_report(store: Store) -> list[ModeShare]:
    """Check-in counts by transit mode with integer percentages, busiest first."""
    counts = store.mode_checkin_counts()
    total = sum(counts.values())
    if total == 0:
        return []
    rows = [
        ModeShare(mode, count, _round_half_up(100.0 * count / total))
        for mode, count in counts.items()
    ]
    rows.sort(key=lambda r: (-r.count, r.mode))
    return rows
