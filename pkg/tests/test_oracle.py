import random

import pytest

from cvqcsim.bits import Bits
from cvqcsim.oracle import RandomOracle, blind, derive_seed, fresh_pad, query

SEED_A = bytes(range(32))
SEED_B = bytes(range(1, 33))


class TestQuery:
    def test_deterministic(self):
        o1, o2 = RandomOracle(SEED_A), RandomOracle(SEED_A)
        x = Bits(0b1011, 4)
        assert query(o1, x, 8) == query(o2, x, 8) == query(o1, x, 8)

    def test_seed_matters(self):
        x = Bits(0xDEAD, 16)
        assert query(RandomOracle(SEED_A), x, 64) != query(RandomOracle(SEED_B), x, 64)

    def test_prefix_consistency(self):
        # each entry behaves like one long lazy random string
        o = RandomOracle(SEED_A)
        x = Bits(0xABCD, 16)
        long = query(o, x, 200)
        for n in (1, 3, 64, 128, 199):
            assert query(RandomOracle(SEED_A), x, n) == long.prefix(n)

    def test_bytes_input_equals_bits_input(self):
        o = RandomOracle(SEED_A)
        assert query(o, b"\x12\x34", 16) == query(o, Bits(0x1234, 16), 16)

    def test_length_bound(self):
        o = RandomOracle(SEED_A)
        x = Bits(0b101, 3)
        assert query(o, x, 9).width == 9
        with pytest.raises(ValueError):
            query(o, x, 10)  # > |input|^2
        with pytest.raises(ValueError):
            query(o, x, 0)

    def test_single_bit_flip_decorrelates(self):
        # outputs of neighbouring inputs agree on ~50% of bits (4-sigma band)
        o = RandomOracle(SEED_A)
        rng = random.Random(1)
        agree = total = 0
        for _ in range(400):
            x = Bits(rng.getrandbits(16), 16)
            y = Bits(x.value ^ (1 << rng.randrange(16)), 16)
            diff = query(o, x, 25).value ^ query(o, y, 25).value
            agree += 25 - diff.bit_count()
            total += 25
        mean, sigma = total / 2, (total * 0.25) ** 0.5
        assert abs(agree - mean) < 4 * sigma


class TestBlind:
    def test_matching_query_resampled(self):
        # blinded entries differ from base w.p. 1 - 2^-outLen; check in bulk
        o = RandomOracle(SEED_A)
        kappa = 8
        k = Bits(0x5A, kappa)
        view = blind(o, [(kappa, k)])
        rng = random.Random(2)
        same = 0
        for _ in range(300):
            pad = Bits(rng.getrandbits(kappa), kappa)
            x = pad.concat(k)
            if query(view, x, 16) == query(o, x, 16):
                same += 1
        assert same <= 2  # expect 300 * 2^-16 ~ 0

    def test_resample_is_consistent_within_view(self):
        o = RandomOracle(SEED_A)
        k = Bits(0x5A, 8)
        view = blind(o, [(8, k)])
        x = Bits(0x11, 8).concat(k)
        assert query(view, x, 12) == query(view, x, 12)

    def test_non_matching_passes_through_exactly(self):
        o = RandomOracle(SEED_A)
        k = Bits(0x5A, 8)
        view = blind(o, [(8, k)])
        rng = random.Random(3)
        for _ in range(200):
            x = Bits(rng.getrandbits(16), 16)
            if x.suffix(8) == k:
                continue
            assert query(view, x, 16) == query(o, x, 16)
        # suffix at the wrong offset is not a match either
        x = Bits(0x5A, 8).concat(Bits(0x00, 8))
        assert query(view, x, 16) == query(o, x, 16)
        # too-short inputs can never match a (8, 8-bit) pattern
        short = Bits(0x5A, 8)
        assert query(view, short, 8) == query(o, short, 8)

    def test_empty_pattern_list_is_identity(self):
        o = RandomOracle(SEED_A)
        view = blind(o, [])
        rng = random.Random(4)
        for _ in range(100):
            x = Bits(rng.getrandbits(24), 24)
            assert query(view, x, 24) == query(o, x, 24)

    def test_base_unchanged_and_key_validation(self):
        o = RandomOracle(SEED_A)
        before = query(o, Bits(1, 4), 4)
        blind(o, [(4, Bits(0b1, 1))])
        assert query(o, Bits(1, 4), 4) == before
        with pytest.raises(ValueError):
            blind(o, [(4, Bits(0, 0))])


class TestFreshPad:
    def test_reproducible(self):
        assert fresh_pad(random.Random(9), 8) == fresh_pad(random.Random(9), 8)

    def test_zero_width(self):
        assert fresh_pad(random.Random(9), 0) == Bits(0, 0)

    def test_bits_unbiased(self):
        # 10^5 draws at kappa=8: each position within 4 sigma of n/2
        n, kappa = 100_000, 8
        rng = random.Random(10)
        counts = [0] * kappa
        for _ in range(n):
            v = fresh_pad(rng, kappa).value
            for i in range(kappa):
                counts[i] += (v >> i) & 1
        sigma = (n * 0.25) ** 0.5
        for c in counts:
            assert abs(c - n / 2) < 4 * sigma


def test_derive_seed_independent_labels():
    s = derive_seed(SEED_A, "client", 3)
    assert len(s) == 32
    assert s != derive_seed(SEED_A, "client", 4)
    assert s != derive_seed(SEED_A, "server", 3)
    assert s == derive_seed(SEED_A, "client", 3)
