from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from cfactions.groups import (
    Cube, DimensionError, FinSet, centered_cube, cube, difference, difference_injective,
    iterated_difference, negate, separation_holds, set_from_json, spiral, subset, sumset,
    translate, translates_disjoint,
)


def S(*xs):
    return FinSet([(x,) for x in xs], dim=1)


def R(lo, hi):
    return FinSet.range1d(lo, hi)


def brute_disjoint(F, C):
    seen = set()
    for c in C:
        for f in F:
            x = tuple(a + b for a, b in zip(f, c))
            if x in seen:
                return False
            seen.add(x)
    return True


def brute_injective(A, B):
    diffs = [tuple(x - y for x, y in zip(a, b)) for a in A for b in B if a != b]
    return len(diffs) == len(set(diffs))


small_sets = st.sets(st.integers(-12, 12), max_size=7).map(lambda s: FinSet([(x,) for x in s], dim=1))
small_sets2 = st.sets(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=6).map(
    lambda s: FinSet(s, dim=2))


class TestSumset:
    def test_examples(self):
        assert sumset(S(0, 1), S(0, 10)) == S(0, 1, 10, 11)
        assert sumset(S(5), S(0)) == S(5)
        assert sumset(S(-1, 1), S(-1, 1)) == S(-2, 0, 2)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            sumset(S(0), FinSet([(0, 0)]))

    @given(small_sets, small_sets, small_sets)
    def test_commutative_associative(self, A, B, C):
        assert sumset(A, B) == sumset(B, A)
        assert sumset(sumset(A, B), C) == sumset(A, sumset(B, C))
        assert sumset(A, S(0)) == A

    @given(small_sets, small_sets)
    def test_cardinality(self, A, B):
        n = len(sumset(A, B))
        assert n <= len(A) * len(B)
        sums = [a[0] + b[0] for a in A for b in B]
        assert (n == len(A) * len(B)) == (len(sums) == len(set(sums)))

    def test_cubes_stay_symbolic(self):
        big = Cube((0, 0, 0), 10 ** 30)
        out = sumset(big, big)
        assert isinstance(out, Cube) and out.card == (2 * 10 ** 30 - 1) ** 3

    @given(st.integers(1, 4), st.integers(1, 4), st.integers(-3, 3))
    def test_cube_sum_matches_explicit(self, a, b, shift):
        A, B = cube(a, 2, (shift, 0)), cube(b, 2)
        assert sumset(A, B) == sumset(A.explicit(), B.explicit())


class TestNegateTranslate:
    def test_examples(self):
        assert negate(S(0, 3)) == S(0, -3)
        assert negate(FinSet([], dim=1)) == FinSet([], dim=1)
        assert negate(FinSet([(1, 2)])) == FinSet([(-1, -2)])

    def test_cube_negate(self):
        assert negate(cube(3, 1, 2)) == S(-2, -3, -4)
        assert translate(cube(2, 1), (5,)) == S(5, 6)


class TestDisjointness:
    def test_examples(self):
        assert translates_disjoint(R(0, 19), S(0, 100, 200))
        assert not translates_disjoint(S(0, 1), S(0, 1))
        assert translates_disjoint(R(0, 19), S(0, 10)) == brute_disjoint(R(0, 19), S(0, 10)) is False

    @given(small_sets, small_sets)
    def test_against_bruteforce(self, F, C):
        assert translates_disjoint(F, C) == brute_disjoint(F, C)

    @given(small_sets, small_sets)
    def test_difference_set_form(self, F, C):
        inter = set(difference(F, F)) & set(difference(C, C))
        if len(F) and len(C):
            assert translates_disjoint(F, C) == (inter <= {(0,)})


class TestSeparation:
    def test_examples(self):
        assert separation_holds(S(0, 50), R(-2, 2))
        assert not separation_holds(S(0, 1), S(0, 1, 2))

    @given(small_sets, small_sets)
    def test_explicit(self, L, Rr):
        assert separation_holds(L, Rr) == (set(L) & set(Rr) <= {(0,)})

    @given(st.integers(-5, 5), st.integers(1, 5), st.integers(-5, 5), st.integers(1, 5))
    def test_cube_pairs(self, a, s, b, t):
        A, B = Cube((a,), s), Cube((b,), t)
        assert separation_holds(A, B) == separation_holds(A.explicit(), B.explicit())


class TestInjective:
    def test_examples(self):
        assert difference_injective(S(0, 1, 10), S(0, 1, 10)) == brute_injective(S(0, 1, 10), S(0, 1, 10))
        assert difference_injective(S(0, 1, 10), S(0, 1, 10))
        assert not difference_injective(S(0, 1, 2), S(0, 1, 2))
        assert difference_injective(S(0, 1), S(0, 1))

    @given(small_sets, small_sets)
    def test_against_bruteforce(self, A, B):
        assert difference_injective(A, B) == brute_injective(A, B)

    @given(small_sets2)
    def test_sidon_count(self, A):
        if difference_injective(A, A):
            assert len(difference(A, A)) == len(A) ** 2 - len(A) + 1


class TestCubes:
    def test_examples(self):
        assert cube(3, 1, 0) == S(0, 1, 2)
        assert cube(2, 2, (0, 0)) == FinSet([(0, 0), (0, 1), (1, 0), (1, 1)])
        assert cube(1, 1, 7) == S(7)

    def test_centered(self):
        assert centered_cube(2, 1) == R(-2, 2)

    def test_subset_and_iterated(self):
        F = centered_cube(1, 1)
        assert iterated_difference(F, 4) == R(-4, 4)
        assert subset(S(-4, 4), iterated_difference(F, 4))
        assert not subset(S(5), iterated_difference(F, 4))

    def test_json_round_trip(self):
        for A in (S(3, 1, 2), cube(4, 2, (1, -1))):
            assert set_from_json(A.to_json(), A.dim) == A

    def test_canonical_order(self):
        A = FinSet([(2, 0), (0, 5), (0, -1)])
        assert A.to_json() == [[0, -1], [0, 5], [2, 0]]


def test_spiral_covers_shells():
    pts = []
    it = spiral(2)
    for _ in range(25):
        pts.append(next(it))
    assert set(pts) == set(product(range(-2, 3), repeat=2))
    assert pts[0] == (0, 0)
