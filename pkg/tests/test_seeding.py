"""Seed fan-out: named child streams must be stable and independent."""

import numpy as np
import pytest

from hippomem.seeding import as_generator, child_seed, derive_generator, derive_seed


class TestAsGenerator:
    def test_int_seed_reproducible(self):
        a = as_generator(42).random(8)
        b = as_generator(42).random(8)
        assert np.array_equal(a, b)

    def test_generator_passthrough_is_identity(self):
        g = np.random.default_rng(0)
        assert as_generator(g) is g

    def test_seed_sequence_accepted(self):
        ss = np.random.SeedSequence(5)
        a = as_generator(ss).random(4)
        b = as_generator(np.random.SeedSequence(5)).random(4)
        assert np.array_equal(a, b)

    def test_negative_seed_rejected(self):
        with pytest.raises(ValueError):
            as_generator(-1)

    def test_unsupported_type_rejected(self):
        with pytest.raises(TypeError):
            as_generator("not a seed")


class TestDerivation:
    def test_same_triple_same_stream(self):
        a = derive_generator(0, "data").random(16)
        b = derive_generator(0, "data").random(16)
        assert np.array_equal(a, b)

    def test_distinct_names_distinct_streams(self):
        a = derive_generator(0, "data").random(16)
        b = derive_generator(0, "model-init").random(16)
        assert not np.array_equal(a, b)

    def test_distinct_indices_distinct_streams(self):
        a = derive_generator(7, "repeat", 0).random(16)
        b = derive_generator(7, "repeat", 1).random(16)
        assert not np.array_equal(a, b)

    def test_distinct_masters_distinct_streams(self):
        a = derive_generator(0, "data").random(16)
        b = derive_generator(1, "data").random(16)
        assert not np.array_equal(a, b)

    def test_adding_draws_to_one_stream_never_shifts_another(self):
        # the point of named fan-out: consuming extra randomness from one
        # consumer leaves every other consumer's stream untouched
        g = derive_generator(3, "data")
        g.random(1000)
        untouched = derive_generator(3, "dream").random(8)
        assert np.array_equal(untouched, derive_generator(3, "dream").random(8))

    def test_stream_key_is_hash_based_not_positional(self):
        # renaming guard: the derived stream depends on the exact name string
        assert not np.array_equal(
            derive_generator(0, "cue-noise").random(4),
            derive_generator(0, "cue-noise2").random(4),
        )

    def test_negative_master_rejected(self):
        with pytest.raises(ValueError):
            derive_seed(-1, "data")


class TestChildSeed:
    def test_stable_and_plain_int(self):
        s = child_seed(0, "repeat", 3)
        assert isinstance(s, int)
        assert s == child_seed(0, "repeat", 3)
        assert s >= 0

    def test_varies_with_all_inputs(self):
        base = child_seed(0, "repeat", 0)
        assert base != child_seed(1, "repeat", 0)
        assert base != child_seed(0, "dream", 0)
        assert base != child_seed(0, "repeat", 1)

    def test_matches_generator_derivation(self):
        # a generator built from the child int must reproduce the named stream
        via_int = as_generator(child_seed(5, "cue-noise", 2))
        via_name = derive_generator(5, "cue-noise", 2)
        # not necessarily the same stream object semantics, but the child int
        # itself must be the first state word of the derived SeedSequence
        assert child_seed(5, "cue-noise", 2) == int(
            derive_seed(5, "cue-noise", 2).generate_state(1, np.uint64)[0]
        )
        assert via_int is not via_name
