import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from cfactions.cylinders import (
    Cylinder, Deferred, DepthExhausted, InsufficientDepth, LevelProduct, PointPrefix,
    apply_point, cartesian, images, intersect, lift, meet_measure, measure, translate,
    translate_lifted, union,
)
from conftest import thm01


def cyl(s, level, *sets):
    return Cylinder.from_sets(s, level, *sets)


def random_cylinder(s, rng, power, max_level=2, size=4):
    level = rng.randint(0, min(max_level, s.depth - 1))
    F = s.f(level)
    lo, hi = F.bbox()
    def elem():
        return tuple(rng.randint(a, min(b, a + 60)) for a, b in zip(lo, hi))
    return Cylinder(s, level, {tuple(elem() for _ in range(power)) for _ in range(rng.randint(1, size))},
                    power=power)


def at_level(c, m):
    return c if c.level == m else lift(c, m)


class TestExamples:
    def test_lift(self, toy):
        assert lift(cyl(toy, 0, [0]), 1).tuples == cyl(toy, 1, [0, 10]).tuples
        two = lift(Cylinder.point(toy, 0, 0, 0), 1)
        assert two.tuples == {((0,), (0,)), ((0,), (10,)), ((10,), (0,)), ((10,), (10,))}

    def test_measure(self, toy):
        assert measure(cyl(toy, 1, [0, 3])) == 1
        assert measure(cyl(toy, 2, range(9))) == Fraction(3, 2)
        assert measure(Cylinder.point(toy, 1, 0, 0)) == Fraction(1, 4)

    def test_intersect(self, toy):
        out = intersect(cyl(toy, 1, range(5)), cyl(toy, 1, range(3, 8)))
        assert out.tuples == cyl(toy, 1, [3, 4]).tuples and measure(out) == 1
        assert measure(intersect(cyl(toy, 1, [0]), cyl(toy, 1, [1]))) == 0
        cross = intersect(cyl(toy, 0, [0]), cyl(toy, 1, [10]))
        assert cross.tuples == cyl(toy, 1, [10]).tuples and measure(cross) == Fraction(1, 2)

    def test_translate(self, toy):
        assert translate(cyl(toy, 1, [0, 3]), 5).tuples == cyl(toy, 1, [5, 8]).tuples
        out = translate(cyl(toy, 1, [0, 3]), 18)
        assert isinstance(out, Deferred) and out.extra == 1
        done = translate_lifted(cyl(toy, 1, [0, 3]), 18)
        assert done.level == 2 and measure(done) == 1
        pm = translate(Cylinder.point(toy, 1, 0, 3), 5, "+-")
        assert isinstance(pm, Deferred) and pm.exhausted

    def test_meet(self, toy):
        assert meet_measure(cyl(toy, 1, range(5)), 10, None, cyl(toy, 1, range(8, 13))) == Fraction(3, 2)
        c = cyl(toy, 1, range(5))
        assert meet_measure(c, 0, None, c) == measure(c)

    def test_meet_truncated_oracle(self, toy):
        # brute force: points of the level-2 lift of [{0}]_0 that stay in it after +100
        A = {x for ((x,),) in lift(cyl(toy, 0, [0]), 2).tuples}
        expect = Fraction(sum(1 for x in A if x + 100 in A), toy.mass(2))
        c = cyl(toy, 0, [0])
        assert meet_measure(c, 100, None, c, truncate=True) == expect == Fraction(2, 3)
        with pytest.raises(DepthExhausted):
            meet_measure(c, 100, None, c)

    def test_points(self, toy):
        assert apply_point(toy, PointPrefix(1, (3,)), 5) == PointPrefix(1, (8,))
        assert apply_point(toy, PointPrefix(1, (3,), ((100,),)), 18) == PointPrefix(2, (121,))
        with pytest.raises(InsufficientDepth):
            apply_point(toy, PointPrefix(1, (19,)), 1)

    def test_json_round_trip(self, toy):
        c = cyl(toy, 1, [4, 0, 3])
        assert Cylinder.from_json(toy, c.to_json()).tuples == c.tuples
        assert c.to_json()["tuples"] == [[[0]], [[3]], [[4]]]

    def test_bad_tuple(self, toy):
        with pytest.raises(ValueError):
            cyl(toy, 1, [20])


@settings(max_examples=250, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from(["toy", "thm01"]), st.integers(1, 2))
def test_measure_calculus(toy, rnd, which, p):
    s = toy if which == "toy" else thm01(1, 1, 5)
    A = random_cylinder(s, rnd, p)
    B = random_cylinder(s, rnd, p)
    g = tuple(rnd.randint(-30, 30) for _ in range(s.d))
    top = max(A.level, B.level)
    m = min(top + 1, s.depth if p == 1 else 3)
    # lift invariance
    assert measure(lift(A, m)) == measure(A)
    # additivity at a common level
    A2, B2 = at_level(A, top), at_level(B, top)
    assert measure(union(A2, B2)) + measure(intersect(A2, B2)) == measure(A2) + measure(B2)
    assert measure(intersect(A, B)) == measure(intersect(A2, B2))
    # translation preserves measure when it fits
    out = translate(A, g, [rnd.choice([1, -1]) for _ in range(p)])
    if isinstance(out, Cylinder):
        assert measure(out) == measure(A)
    # meet values do not depend on the level they are computed at
    if A.level < s.depth:
        assert meet_measure(A, g, None, B, truncate=True) == meet_measure(
            lift(A, A.level + 1), g, None, B, truncate=True)


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False))
def test_product_consistency(toy, rnd):
    A = random_cylinder(toy, rnd, 1)
    B = random_cylinder(toy, rnd, 1)
    m = max(A.level, B.level)
    AB = cartesian(at_level(A, m), at_level(B, m))
    assert AB.power == 2
    assert measure(AB) == measure(A) * measure(B)


def test_images_preserve_measure(toy):
    rng = random.Random(3)
    for _ in range(100):
        A = random_cylinder(toy, rng, 1, max_level=1)
        g = rng.randint(-40, 40)
        try:
            img = images(A, g)
        except DepthExhausted:
            continue
        total = sum(Fraction(1, toy.mass(L)) for L, _ in img)
        assert total == measure(A)


def test_meet_lift_invariance(toy):
    rng = random.Random(7)
    for _ in range(100):
        A = random_cylinder(toy, rng, 1, max_level=1)
        B = random_cylinder(toy, rng, 1, max_level=1)
        g = rng.randint(-25, 25)
        try:
            base = meet_measure(A, g, None, B)
        except DepthExhausted:
            continue
        assert meet_measure(lift(A, 2), g, None, B) == base
        assert meet_measure(A, g, None, lift(B, 2)) == base


def test_meet_bruteforce_oracle(toy):
    """Compare with explicit point sets of F_2 for every g in a window."""
    A, B = cyl(toy, 1, range(5)), cyl(toy, 1, range(8, 13))
    la = {x for ((x,),) in lift(A, 2).tuples}
    lb = {x for ((x,),) in lift(B, 2).tuples}
    for g in range(-20, 21):
        expect = Fraction(len({x + g for x in la} & lb), toy.mass(2))
        try:
            got = meet_measure(A, g, None, B)
        except DepthExhausted:
            continue
        assert got == expect


def test_level_product(toy):
    base = Cylinder.point(toy, 0, 0)
    lp = LevelProduct(toy, base, [[((10,),)], [((0,),), ((200,),)]])
    assert lp.level == 2 and len(lp) == 2
    assert lp.measure() == measure(lp.to_cylinder()) == Fraction(1, 3)
    assert LevelProduct.from_json(toy, lp.to_json()).to_cylinder().tuples == lp.to_cylinder().tuples
    with pytest.raises(ValueError):
        LevelProduct(toy, base, [[((5,),)]])
