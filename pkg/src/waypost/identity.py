"""Pseudonym generation and user registration.

Usernames are random bird-like names: one or two descriptive words followed
by a bird family name ("scarlet crested wren"). The shipped word lists
multiply out to a namespace of well over a million names, so collisions stay
rare even at six-figure registration counts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING

from .errors import CapacityError, PseudonymTakenError, ValidationError

if TYPE_CHECKING:
    from .models import UserRecord
    from .store import Store

MIN_NAMESPACE = 1_000_000
MAX_REGISTER_ATTEMPTS = 16

LEXICON_FILES = {
    "family_names": "families.txt",
    "attribute_descriptors": "attributes.txt",
    "geographic_descriptors": "geographic.txt",
    "habitat_descriptors": "habitats.txt",
}


@dataclass(frozen=True)
class Lexicon:
    """The four word lists a pseudonym is assembled from."""

    family_names: tuple[str, ...]
    attribute_descriptors: tuple[str, ...]
    geographic_descriptors: tuple[str, ...]
    habitat_descriptors: tuple[str, ...]

    @cached_property
    def descriptor_set(self) -> frozenset[str]:
        return frozenset(
            self.attribute_descriptors + self.geographic_descriptors + self.habitat_descriptors
        )

    @cached_property
    def attribute_set(self) -> frozenset[str]:
        return frozenset(self.attribute_descriptors)

    @cached_property
    def family_set(self) -> frozenset[str]:
        return frozenset(self.family_names)


def load_lexicon(directory: str | Path) -> Lexicon:
    """Read the four plain-text word files (one lowercase term per line)."""
    directory = Path(directory)
    lists = {}
    for field_name, filename in LEXICON_FILES.items():
        path = directory / filename
        if not path.exists():
            raise ValidationError(f"missing lexicon file {path}")
        terms = [line.strip() for line in path.read_text(encoding="utf-8").splitlines()]
        lists[field_name] = tuple(t for t in terms if t)
    return Lexicon(**lists)


def load_default_lexicon() -> Lexicon:
    with resources.as_file(resources.files("waypost").joinpath("data")) as data_dir:
        return load_lexicon(data_dir)


def validate_lexicon(lexicon: Lexicon) -> list[str]:
    """Check every lexicon invariant; returns a list of problems (empty = valid)."""
    problems: list[str] = []
    lists = {
        "families": lexicon.family_names,
        "attributes": lexicon.attribute_descriptors,
        "geographic": lexicon.geographic_descriptors,
        "habitats": lexicon.habitat_descriptors,
    }
    for name, terms in lists.items():
        if not terms:
            problems.append(f"{name}: empty list")
        if len(set(terms)) != len(terms):
            problems.append(f"{name}: duplicate entries")
        for t in terms:
            if not t or t != t.strip() or t != t.lower():
                problems.append(f"{name}: entry {t!r} not a trimmed lowercase term")
                break
    descriptors = (
        lexicon.attribute_descriptors
        + lexicon.geographic_descriptors
        + lexicon.habitat_descriptors
    )
    if len(set(descriptors)) != len(descriptors):
        problems.append("descriptor lists share entries")
    if not problems and namespace_size(lexicon) < MIN_NAMESPACE:
        problems.append(
            f"namespace holds {namespace_size(lexicon):,} names, need {MIN_NAMESPACE:,}"
        )
    return problems


def namespace_size(lexicon: Lexicon) -> int:
    """How many distinct pseudonyms the lexicon can produce.

    Single descriptor from any list, or an ordered pair of distinct attribute
    terms, always followed by a family name.
    """
    a = len(lexicon.attribute_descriptors)
    g = len(lexicon.geographic_descriptors)
    h = len(lexicon.habitat_descriptors)
    f = len(lexicon.family_names)
    if min(a, g, h, f) == 0:
        raise ValidationError("lexicon lists must be non-empty")
    return (a + g + h) * f + a * (a - 1) * f


def generate_pseudonym(lexicon: Lexicon, rng: random.Random) -> str:
    """Sample the pseudonym grammar uniformly. Deterministic for a seeded rng."""
    a = len(lexicon.attribute_descriptors)
    f = len(lexicon.family_names)
    total = namespace_size(lexicon)
    n_single = (a + len(lexicon.geographic_descriptors) + len(lexicon.habitat_descriptors)) * f
    k = rng.randrange(total)
    if k < n_single:
        d, fam = divmod(k, f)
        combined = (
            lexicon.attribute_descriptors
            + lexicon.geographic_descriptors
            + lexicon.habitat_descriptors
        )
        return f"{combined[d]} {lexicon.family_names[fam]}"
    k -= n_single
    pair, fam = divmod(k, f)
    i, j = divmod(pair, a - 1)
    first = lexicon.attribute_descriptors[i]
    second = lexicon.attribute_descriptors[j if j < i else j + 1]
    return f"{first} {second} {lexicon.family_names[fam]}"


@dataclass(frozen=True)
class ParsedPseudonym:
    descriptors: tuple[str, ...]
    family: str


def parse_pseudonym(text: str, lexicon: Lexicon) -> ParsedPseudonym:
    """Split a pseudonym back into lexicon components, or raise ValidationError."""
    words = text.split(" ")
    if len(words) == 2:
        descriptor, family = words
        if descriptor in lexicon.descriptor_set and family in lexicon.family_set:
            return ParsedPseudonym((descriptor,), family)
    elif len(words) == 3:
        first, second, family = words
        if (
            first in lexicon.attribute_set
            and second in lexicon.attribute_set
            and first != second
            and family in lexicon.family_set
        ):
            return ParsedPseudonym((first, second), family)
    raise ValidationError(f"{text!r} does not parse under the pseudonym grammar")


def register_user(
    store: "Store",
    lexicon: Lexicon,
    rng: random.Random,
    *,
    max_attempts: int = MAX_REGISTER_ATTEMPTS,
) -> "UserRecord":
    """Create a fresh user with a unique pseudonym and a 128-bit api token.

    Every install registers anew; identity is never carried across installs.
    Pseudonym collisions are retried up to max_attempts before giving up.
    """
    for _ in range(max_attempts):
        pseudonym = generate_pseudonym(lexicon, rng)
        token = f"{rng.getrandbits(128):032x}"
        try:
            with store.write() as txn:
                return txn.new_user(pseudonym=pseudonym, token=token)
        except PseudonymTakenError:
            continue
    raise CapacityError(
        f"could not find a free pseudonym in {max_attempts} attempts"
    )
