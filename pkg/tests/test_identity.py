import random

import pytest

from waypost.errors import CapacityError, PseudonymTakenError, ValidationError
from waypost.identity import (
    Lexicon,
    generate_pseudonym,
    load_default_lexicon,
    namespace_size,
    parse_pseudonym,
    register_user,
    validate_lexicon,
)
from waypost.store import Store

from conftest import register


@pytest.fixture(scope="module")
def default_lexicon():
    return load_default_lexicon()


class TestNamespaceSize:
    def test_small_arithmetic(self, tiny_lexicon):
        # (4 + 2 + 2) * 3 single-descriptor names + 4*3 ordered attribute pairs * 3
        assert namespace_size(tiny_lexicon) == 8 * 3 + 4 * 3 * 3

    def test_two_two_two_three(self):
        lex = Lexicon(
            family_names=("wren", "finch", "sparrow"),
            attribute_descriptors=("scarlet", "dusky"),
            geographic_descriptors=("eastern", "arctic"),
            habitat_descriptors=("marsh", "meadow"),
        )
        assert namespace_size(lex) == (2 + 2 + 2) * 3 + 2 * 1 * 3  # 24

    def test_empty_list_is_an_error(self):
        lex = Lexicon((), ("scarlet",), ("eastern",), ("marsh",))
        with pytest.raises(ValidationError):
            namespace_size(lex)

    def test_default_lexicon_exceeds_a_million(self, default_lexicon):
        assert namespace_size(default_lexicon) >= 1_000_000

    def test_default_lexicon_is_valid(self, default_lexicon):
        assert validate_lexicon(default_lexicon) == []


class TestGeneratePseudonym:
    def test_deterministic_for_a_seed(self, default_lexicon):
        a = generate_pseudonym(default_lexicon, random.Random(99))
        b = generate_pseudonym(default_lexicon, random.Random(99))
        assert a == b

    def test_every_draw_parses_back(self, tiny_lexicon):
        rng = random.Random(5)
        for _ in range(2000):
            name = generate_pseudonym(tiny_lexicon, rng)
            parsed = parse_pseudonym(name, tiny_lexicon)
            assert parsed.family in tiny_lexicon.family_names
            assert 1 <= len(parsed.descriptors) <= 2

    def test_small_namespace_is_covered_uniformly(self, tiny_lexicon):
        # 60 possible names; 20k draws should hit all of them.
        rng = random.Random(6)
        seen = {generate_pseudonym(tiny_lexicon, rng) for _ in range(20_000)}
        assert len(seen) == namespace_size(tiny_lexicon)

    def test_hundred_thousand_draws(self, default_lexicon):
        # Grammar closure plus the birthday bound, both over the same draws.
        # Expected duplicates for n draws over a namespace of size N is
        # n - N*(1 - (1 - 1/N)**n); computed here from the exact size.
        n = 100_000
        size = namespace_size(default_lexicon)
        rng = random.Random(20141022)
        family_set = default_lexicon.family_set
        draws = []
        for _ in range(n):
            name = generate_pseudonym(default_lexicon, rng)
            assert name.split(" ")[-1] in family_set
            draws.append(name)
        duplicates = n - len(set(draws))
        expected = n - size * (1.0 - (1.0 - 1.0 / size) ** n)
        assert expected * 0.75 <= duplicates <= expected * 1.25


class TestParsePseudonym:
    def test_rejects_junk(self, tiny_lexicon):
        for bad in ("", "wren", "scarlet scarlet wren", "scarlet eastern wren", "x y z w"):
            with pytest.raises(ValidationError):
                parse_pseudonym(bad, tiny_lexicon)

    def test_accepts_both_shapes(self, tiny_lexicon):
        assert parse_pseudonym("scarlet wren", tiny_lexicon).descriptors == ("scarlet",)
        assert parse_pseudonym("scarlet crested wren", tiny_lexicon).descriptors == (
            "scarlet",
            "crested",
        )


class TestRegisterUser:
    def test_two_registrations_are_distinct(self, store, tiny_lexicon):
        rng = random.Random(1)
        a = register_user(store, tiny_lexicon, rng)
        b = register_user(store, tiny_lexicon, rng)
        assert a.user_id != b.user_id
        assert a.pseudonym != b.pseudonym
        assert a.token and b.token and a.token != b.token

    def test_collision_retries_to_next_name(self, store, tiny_lexicon):
        rng = random.Random(2)
        first = generate_pseudonym(tiny_lexicon, random.Random(2))
        register(store, pseudonym=first)  # occupy the name the rng will emit first
        record = register_user(store, tiny_lexicon, rng)
        assert record.pseudonym != first
        assert store.pseudonym_collisions == 1

    def test_exhausted_namespace_raises_capacity(self, store):
        lex = Lexicon(
            family_names=("wren",),
            attribute_descriptors=("scarlet",),
            geographic_descriptors=("eastern",),
            habitat_descriptors=("marsh",),
        )
        rng = random.Random(3)
        for _ in range(3):  # namespace is exactly 3 names
            register_user(store, lex, rng)
        with pytest.raises(CapacityError):
            register_user(store, lex, rng)

    def test_reregistration_leaves_old_record_untouched(self, store, tiny_lexicon):
        # A reinstall registers from scratch; the earlier identity survives.
        rng = random.Random(4)
        old = register_user(store, tiny_lexicon, rng)
        new = register_user(store, tiny_lexicon, rng)
        assert store.get_user(old.user_id).pseudonym == old.pseudonym
        assert new.user_id != old.user_id

    def test_pseudonyms_never_collide_in_store(self, store, tiny_lexicon):
        rng = random.Random(8)
        for _ in range(30):
            register_user(store, tiny_lexicon, rng)
        names = [u.pseudonym for u in store.users.values()]
        assert len(names) == len(set(names))

    def test_direct_duplicate_insert_is_rejected(self, store):
        register(store, pseudonym="scarlet crested wren")
        with pytest.raises(PseudonymTakenError):
            register(store, pseudonym="scarlet crested wren")


class TestLexiconLoading:
    def test_missing_file_is_an_error(self, tmp_path):
        from waypost.identity import load_lexicon

        with pytest.raises(ValidationError):
            load_lexicon(tmp_path)

    def test_validate_flags_problems(self):
        messy = Lexicon(
            family_names=("wren", "wren"),
            attribute_descriptors=("Scarlet",),
            geographic_descriptors=("eastern",),
            habitat_descriptors=("eastern",),
        )
        problems = validate_lexicon(messy)
        assert any("duplicate" in p for p in problems)
        assert any("lowercase" in p for p in problems)
        assert any("share entries" in p for p in problems)
