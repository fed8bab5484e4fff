from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

import pytest

from waypost.identity import Lexicon
from waypost.store import Store


class TickingClock:
    """Deterministic clock advancing one second per call."""

    def __init__(self, start: datetime | None = None):
        self.now = start or datetime(2026, 1, 1, tzinfo=timezone.utc)

    def __call__(self) -> datetime:
        self.now += timedelta(seconds=1)
        return self.now


@pytest.fixture
def store() -> Store:
    return Store(clock=TickingClock())


@pytest.fixture
def tiny_lexicon() -> Lexicon:
    return Lexicon(
        family_names=("wren", "finch", "sparrow"),
        attribute_descriptors=("scarlet", "crested", "dusky", "banded"),
        geographic_descriptors=("eastern", "arctic"),
        habitat_descriptors=("marsh", "meadow"),
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(1234)


def register(store: Store, pseudonym: str = None, token: str = None):
    """Insert a user directly, bypassing the lexicon."""
    n = len(store.users) + 1
    with store.write() as txn:
        return txn.new_user(
            pseudonym=pseudonym or f"test bird {n}",
            token=token or f"token-{n}",
        )
