import json
import random
from dataclasses import replace
from fractions import Fraction
from itertools import product

import pytest

from cfactions import certificates as cert
from cfactions.certificates import (
    BoundRule, GroupoidWitness, Verdict, WanderingCertificate, certificate_from_json, check_any,
    check_conservativity_witness, check_ergodicity_witness, check_wandering, fuzz,
)
from cfactions.cylinders import Cylinder, DepthExhausted, images, lift, measure, meet_measure
from cfactions.groups import difference, zero
from cfactions.schema import build_theorem01, build_theorem02
from conftest import thm01, thm02, thm03


def one(s, level, *xs):
    return Cylinder(s, level, [tuple((x,) if isinstance(x, int) else x for x in xs)])


class TestSwap:
    @pytest.mark.parametrize("n", [0, 1])
    def test_delta_and_images(self, toy, n):
        w = cert.build_thm04_swap_witness(toy, n)
        C = len(toy.c(n + 1))
        assert w.delta == 1 - Fraction(1, C) >= Fraction(1, 2)
        assert check_conservativity_witness(w).verdict is Verdict.PASS
        for src, h in w.pieces:
            (t,) = src.tuples
            assert {u for _, u in images(src, h, w.signs)} == {(t[1], t[0])}

    def test_generated(self, s01, s03):
        for s in (s01, s03):
            out = check_conservativity_witness(cert.build_thm04_swap_witness(s, 1))
            assert out.verdict is Verdict.PASS

    def test_three_copies(self, toy):
        assert cert.build_thm04_swap_witness(toy, 1).delta == Fraction(2, 3)

    def test_needs_depth(self, toy):
        with pytest.raises(DepthExhausted):
            cert.build_thm04_swap_witness(toy, 2)


class TestGroupoidChecker:
    def test_identity_piece(self, toy):
        A = one(toy, 1, 0)
        w = GroupoidWitness(toy, (1,), A, A, [(A, (0,))], Fraction(1))
        assert check_ergodicity_witness(w).verdict is Verdict.PASS
        assert check_conservativity_witness(replace(w, mode="conservativity")).verdict is Verdict.FAIL

    def test_overlapping_images(self, toy):
        base = Cylinder.from_sets(toy, 1, range(10))
        tgt = Cylinder.from_sets(toy, 1, range(20))
        a, b = one(toy, 1, 0), one(toy, 1, 1)
        ok = GroupoidWitness(toy, (1,), base, tgt, [(a, (5,)), (b, (5,))], Fraction(1, 10))
        assert check_ergodicity_witness(ok).verdict is Verdict.PASS
        bad = replace(ok, pieces=[(a, (6,)), (b, (5,))])
        out = check_ergodicity_witness(bad)
        assert out.verdict is Verdict.FAIL and "overlap" in out.reason

    def test_image_outside_target(self, toy):
        base = Cylinder.from_sets(toy, 1, range(10))
        w = GroupoidWitness(toy, (1,), base, base, [(one(toy, 1, 0), (12,))], Fraction(1, 10))
        assert check_ergodicity_witness(w).verdict is Verdict.FAIL

    def test_exhausted_depth_is_inconclusive(self, toy):
        base = Cylinder.from_sets(toy, 2, range(10))
        w = GroupoidWitness(toy, (1,), base, base, [(one(toy, 2, 0), (-5,))], Fraction(1, 10))
        assert check_ergodicity_witness(w).verdict is Verdict.INCONCLUSIVE

    def test_measure_bookkeeping(self, s02):
        w = cert.build_thm02_conservativity_witness(s02, 1, 4)
        out = check_conservativity_witness(w)
        assert out.data["image_measure"] == out.data["covered"]


class TestFirstHit:
    def test_k1(self, s01):
        z = ((0,),)
        w = cert.build_thm01_ergodicity_witness(s01, z, z)
        out = check_ergodicity_witness(w)
        assert out.verdict is Verdict.PASS and w.delta > 0
        levels = [l for l in s01.meta.levels_for(((0,),)) if 0 < l <= 5]
        assert w.delta == cert.thm01_first_hit_fraction(s01, levels)

    @pytest.mark.parametrize("plus", [0, 1, 2])
    def test_k2_sign_splits(self, plus):
        s = thm01(2, 1, 5)
        z = ((0,), (0,))
        w = cert.build_thm01_ergodicity_witness(s, z, z, plus=plus, L=4)
        assert check_ergodicity_witness(w).verdict is Verdict.PASS

    def test_shifted_target(self, s01):
        # f = w - v = e_1 is served by level 4 only
        w = cert.build_thm01_ergodicity_witness(s01, ((0,),), ((1,),), n=1)
        assert check_ergodicity_witness(w).verdict is Verdict.PASS
        assert {src.level for src, _ in w.pieces} == {4}
        with pytest.raises(DepthExhausted):
            cert.build_thm01_ergodicity_witness(s01, ((0,),), ((2,),), n=1)

    def test_first_hit_fraction_formula(self, s01):
        R = s01.meta.R
        expect = Fraction(1, R[0]) + (1 - Fraction(2, R[0])) * Fraction(1, R[2])
        assert cert.thm01_first_hit_fraction(s01, [1, 3]) == expect


class TestDiagonal:
    def test_k1(self, s02):
        w = cert.build_thm02_conservativity_witness(s02, 1, 5)
        prod = Fraction(1)
        for l in range(2, 6):
            prod *= 1 - Fraction(1, len(s02.c(l)))
        assert w.delta == 1 - prod
        assert all(h != (0,) for _, h in w.pieces)
        assert check_conservativity_witness(w).verdict is Verdict.PASS

    def test_per_level_diagonal(self, s02):
        for l in range(1, 4):
            C = len(s02.c(l))
            assert Fraction(C, C ** 2) == Fraction(1, s02.meta.R[l - 1])


class TestIndexTwo:
    def test_sixteenth(self, s03):
        v1, v2, w1, w2 = cert.thm03_default_targets(s03, 1)
        w = cert.build_thm03_ergodicity_witness(s03, v1, v2, w1, w2, 1)
        out = check_ergodicity_witness(w)
        assert out.verdict is Verdict.PASS
        assert out.data["fraction"] == Fraction(1, 16)

    def test_piece_images(self, s03):
        v1, v2, w1, w2 = cert.thm03_default_targets(s03, 1)
        w = cert.build_thm03_ergodicity_witness(s03, v1, v2, w1, w2, 1)
        meta = s03.meta
        n = cert.thm03_level_for(s03, tuple(a - b for a, b in zip(w2, w1)), 1)
        dn = meta.dn[n - 1]
        src, h = w.pieces[0]
        li, ej = meta.l[n - 1][0], meta.e[n - 1][0]
        got = {u for _, u in images(src, h, w.signs)}
        D = list(s03.sum_block(2, n - 1))
        expect = {((w1[0] + a[0] + ej[0],), (w2[0] + b[0] - li[0] - dn[0],)) for a in D for b in D}
        assert got == expect


class TestWandering:
    def test_thm01(self, s01):
        c = cert.build_thm01_nonergodicity_certificate(s01)
        out = check_wandering(c)
        assert out.verdict is Verdict.PASS and c.bound > 0
        n = c.base_level + 1
        shown = 1 - sum(Fraction(2, s01.meta.R[j - 1]) ** 2 for j in range(n, 6)) - BoundRule(
            c.kind, s01).tail()
        assert c.bound == shown

    def test_thm02(self, s02):
        c = cert.build_thm02_wandering_certificate(s02)
        assert check_wandering(c).verdict is Verdict.PASS
        k = 1
        n = c.base_level + 1
        R = s02.meta.R
        shown = 1 - sum(Fraction(1, R[j - 1] ** (k + 1)) * (1 + Fraction((k + 1) ** (k + 2), R[j - 1]))
                        for j in range(n, 6)) - BoundRule(c.kind, s02).tail()
        assert c.bound == shown > 0

    def test_thm03(self, s03):
        c = cert.build_thm03_nonergodicity_certificate(s03)
        assert check_wandering(c).verdict is Verdict.PASS
        N = s03.meta.N
        assert c.bound == 1 - 4 * (Fraction(1, N[1]) + Fraction(1, N[2])) - 4 * (
            Fraction(1, 4) - sum(Fraction(1, x) for x in N))

    def test_explicit_ball_agrees(self, s01):
        c = cert.build_thm01_nonergodicity_certificate(s01, n=2, m=2)
        rng = random.Random(1)
        ball = difference(s01.f(2), s01.f(2))
        lo, hi = ball.bbox()
        gs = [(0,), (1,), (-1,)] + [(rng.randint(lo[0], hi[0]),) for _ in range(40)]
        assert check_wandering(c, ball=gs).verdict is Verdict.PASS
        assert check_wandering(c).verdict is Verdict.PASS

    def test_ball_at_depth_inconclusive(self, s01):
        c = cert.build_thm01_nonergodicity_certificate(s01)
        assert check_wandering(replace(c, ball_level=s01.depth)).verdict is Verdict.INCONCLUSIVE

    def test_certified_at_least_claimed(self, s01, s02, s03):
        for c in (cert.build_thm01_nonergodicity_certificate(s01),
                  cert.build_thm02_wandering_certificate(s02),
                  cert.build_thm03_nonergodicity_certificate(s03)):
            assert 0 < c.bound <= cert.certified_bound(c) <= 1

    def test_json_round_trip(self, s01):
        c = cert.build_thm01_nonergodicity_certificate(s01)
        back = certificate_from_json(s01, json.loads(json.dumps(c.to_json())))
        assert back.to_json() == c.to_json()
        assert check_wandering(back).verdict is Verdict.PASS


class TestRigidity:
    def test_profile(self):
        s = build_theorem01(1, 1, 6)
        A = Cylinder(s, 2, [((0,),)])
        prof = cert.rigidity_profile(s, A, [3, 4, 5])
        R = s.meta.R
        assert all(r >= Fraction(R[n - 1] - 3, R[n - 1]) for r, n in zip(prof, [3, 4, 5]))
        assert all(r <= 1 for r in prof)
        assert prof == sorted(prof)


class TestZeroType:
    def test_matches_bruteforce(self):
        s = build_theorem02(1, 1, 3)
        for n in (1, 2):
            scan = cert.zero_type_scan(s, [(0,)], n)
            assert scan.passed
            A = [(0,)]
            S = [(a[0] + c[0],) for a in A for c in s.c(n)]
            gs = {(y[0] - x[0],) for x in S for y in S}
            assert cert.zero_type_bruteforce(s, A, n, gs) == scan.max_ratio

    def test_zero_not_admissible(self, s02):
        assert not cert.admissible(s02, [(0,)], 2, (0,))


def test_fuzz_never_passes(s01, s02, s03, toy):
    z = ((0,),)
    certs = [cert.build_thm04_swap_witness(toy, 1),
             cert.build_thm01_ergodicity_witness(s01, z, z, L=4),
             cert.build_thm02_conservativity_witness(s02, 1, 3),
             cert.build_thm01_nonergodicity_certificate(s01),
             cert.build_thm03_nonergodicity_certificate(s03)]
    for c in certs:
        assert check_any(c).verdict is Verdict.PASS
    results = fuzz(certs, count=60, seed=11)
    assert all(v is not Verdict.PASS for _, v in results)
