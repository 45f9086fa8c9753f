import random
from itertools import combinations

import pytest

from cvqcsim.bits import Bits
from cvqcsim.ntcf import ClawResult, chk, dec, eval_claw, keygen


class TestKeygen:
    def test_small_kappa_rejected(self):
        with pytest.raises(ValueError):
            keygen(1, random.Random(0))

    def test_different_seeds_different_trapdoors(self):
        a = keygen(8, random.Random(1))
        b = keygen(8, random.Random(2))
        assert (a.sk.shift, a.sk.perm_seed) != (b.sk.shift, b.sk.perm_seed)

    def test_shift_nonzero(self):
        for seed in range(50):
            km = keygen(2, random.Random(seed))
            assert km.sk.shift.value != 0

    def test_hundred_evals_have_distinct_claws(self):
        km = keygen(8, random.Random(3))
        rng = random.Random(4)
        for _ in range(100):
            res = eval_claw(km.pk, rng)
            assert res.x0 != res.x1
            assert dec(km.sk, 0, res.y) != dec(km.sk, 1, res.y)


class TestEvalClaw:
    def test_chk_accepts_both_branches(self):
        km = keygen(10, random.Random(5))
        rng = random.Random(6)
        for _ in range(50):
            res = eval_claw(km.pk, rng)
            assert chk(km.pk, 0, res.x0, res.y)
            assert chk(km.pk, 1, res.x1, res.y)

    def test_image_collisions_at_birthday_rate(self):
        # the image set has 2^kappa points (one per u), so duplicates among n
        # draws follow the birthday law: E[dup] = n - M(1 - (1 - 1/M)^n)
        n = 10_000
        km = keygen(16, random.Random(7))
        rng = random.Random(8)
        dup = n - len({eval_claw(km.pk, rng).y.value for _ in range(n)})
        m = 2**16
        expected = n - m * (1 - (1 - 1 / m) ** n)  # ~ 724
        assert abs(dup - expected) < 5 * expected**0.5
        # and at kappa=32 the same draw count should essentially never collide
        km32 = keygen(32, random.Random(7))
        assert n - len({eval_claw(km32.pk, rng).y.value for _ in range(n)}) <= 3


class TestDec:
    def test_round_trip(self):
        km = keygen(12, random.Random(9))
        rng = random.Random(10)
        for _ in range(50):
            res = eval_claw(km.pk, rng)
            assert dec(km.sk, 0, res.y) == res.x0
            assert dec(km.sk, 1, res.y) == res.x1

    def test_random_y_rejected(self):
        # at kappa=4 the image set has 16 of 256 points; enumerate it and
        # check dec is None exactly off-image
        km = keygen(4, random.Random(11))
        image = {
            eval_claw(km.pk, random.Random(i)).y.value for i in range(200)
        }  # eval image is u-uniform; 200 draws cover all 16 w.h.p.
        assert len(image) == 16
        for yv in range(256):
            y = Bits(yv, 8)
            got = dec(km.sk, 0, y)
            if yv in image:
                assert got is not None
            else:
                assert got is None

    def test_wrong_width_rejected(self):
        km = keygen(8, random.Random(12))
        assert dec(km.sk, 0, Bits(0, 15)) is None


class TestChk:
    def test_negative_x(self):
        km = keygen(8, random.Random(13))
        rng = random.Random(14)
        res = eval_claw(km.pk, rng)
        bad = res.x0.xor(Bits(1, 8))
        assert not chk(km.pk, 0, bad, res.y)
        assert not chk(km.pk, 0, res.x1, res.y)  # branch mix-up fails too

    def test_negative_y(self):
        km = keygen(8, random.Random(15))
        rng = random.Random(16)
        res = eval_claw(km.pk, rng)
        assert not chk(km.pk, 0, res.x0, res.y.xor(Bits(1, 16)))

    def test_biconditional_exhaustive_small_kappa(self):
        # chk(pk,b,x,y) <=> dec(sk,b,y) = x, over the whole (b, x, y) cube
        km = keygen(4, random.Random(17))
        for b in (0, 1):
            for xv in range(16):
                for yv in range(256):
                    x, y = Bits(xv, 4), Bits(yv, 8)
                    assert chk(km.pk, b, x, y) == (dec(km.sk, b, y) == x)

    def test_biconditional_random_negatives(self):
        km = keygen(16, random.Random(18))
        rng = random.Random(19)
        for _ in range(10_000):
            x = Bits(rng.getrandbits(16), 16)
            y = Bits(rng.getrandbits(32), 32)
            assert chk(km.pk, 0, x, y) == (dec(km.sk, 0, y) == x)


def test_every_image_has_exactly_two_preimages():
    # exhaustive 2-to-1 check at kappa=6: f(b, x) over all (b, x)
    from cvqcsim.ntcf import _permute

    km = keygen(6, random.Random(20))
    hits: dict[int, set[tuple[int, int]]] = {}
    for b in (0, 1):
        for xv in range(64):
            x = Bits(xv, 6)
            u = x.xor(km.pk.shift) if b else x
            y = _permute(km.pk.perm_seed, u.concat(Bits(0, 6)), 6)
            hits.setdefault(y.value, set()).add((b, xv))
    assert len(hits) == 64
    for pre in hits.values():
        assert len(pre) == 2
        (b0, x0), (b1, x1) = sorted(pre)
        assert (b0, b1) == (0, 1) and x0 != x1


def test_claw_result_fields():
    km = keygen(8, random.Random(21))
    res = eval_claw(km.pk, random.Random(22))
    assert isinstance(res, ClawResult)
    assert res.y.width == 16 and res.x0.width == res.x1.width == 8
    assert res.x0.xor(res.x1) == km.sk.shift
