"""Exact arithmetic on Z^d and on finite subsets of Z^d.

Group elements are plain tuples of Python ints, so coordinates never
overflow.  Finite sets come in two flavours sharing one small interface:

* :class:`FinSet` -- an explicit, canonically sorted set of elements;
* :class:`Cube` -- a lattice cube stored by its lower corner and side,
  used for the Følner shapes whose cardinality is far too large to list.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from itertools import product
from typing import Iterable, Iterator, Sequence, Union

Elem = tuple  # a GroupElement: tuple[int, ...]


class DimensionError(ValueError):
    pass


def vadd(a: Elem, b: Elem) -> Elem:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Elem, b: Elem) -> Elem:
    return tuple(x - y for x, y in zip(a, b))


def vneg(a: Elem) -> Elem:
    return tuple(-x for x in a)


def vscale(t: int, a: Elem) -> Elem:
    return tuple(t * x for x in a)


def zero(d: int) -> Elem:
    return (0,) * d


def unit(d: int, axis: int = 0, scale: int = 1) -> Elem:
    return tuple(scale if i == axis else 0 for i in range(d))


def norm_inf(a: Elem) -> int:
    return max((abs(x) for x in a), default=0)


def as_elem(x) -> Elem:
    """Coerce an int or an int sequence to a group element."""
    if isinstance(x, int):
        return (x,)
    return tuple(int(v) for v in x)


class FinSet:
    """Immutable finite subset of Z^d in lexicographic order."""

    __slots__ = ("dim", "elems", "_set", "_firsts")

    def __init__(self, elems: Iterable = (), dim: int | None = None):
        items = {as_elem(e) for e in elems}
        dims = {len(e) for e in items}
        if dim is None:
            if len(dims) != 1:
                raise DimensionError("cannot infer dimension" if not dims
                                     else f"mixed dimensions {sorted(dims)}")
            dim = dims.pop()
        elif dims - {dim}:
            raise DimensionError(f"elements of dimension {sorted(dims)} in a set of dimension {dim}")
        self.dim = dim
        self.elems = tuple(sorted(items))
        self._set = frozenset(items)
        self._firsts = None

    @classmethod
    def range1d(cls, lo: int, hi: int) -> "FinSet":
        """The integers lo..hi inclusive, as a 1-dimensional set."""
        return cls(((i,) for i in range(lo, hi + 1)), dim=1)

    def __contains__(self, g) -> bool:
        return g in self._set

    def __iter__(self) -> Iterator[Elem]:
        return iter(self.elems)

    def __len__(self) -> int:
        return len(self.elems)

    @property
    def card(self) -> int:
        return len(self.elems)

    def __eq__(self, other) -> bool:
        if isinstance(other, Cube):
            other = other.explicit()
        return isinstance(other, FinSet) and self.dim == other.dim and self._set == other._set

    def __hash__(self):
        return hash((self.dim, self._set))

    def __repr__(self):
        if self.dim == 1 and len(self) <= 12:
            return "FinSet{" + ", ".join(str(e[0]) for e in self.elems) + "}"
        return f"FinSet(dim={self.dim}, n={len(self)})"

    def bbox(self) -> tuple[Elem, Elem]:
        if not self.elems:
            raise ValueError("empty set has no bounding box")
        lo = tuple(min(e[i] for e in self.elems) for i in range(self.dim))
        hi = tuple(max(e[i] for e in self.elems) for i in range(self.dim))
        return lo, hi

    def with_first_coordinate_between(self, lo: int, hi: int) -> Sequence[Elem]:
        """Elements whose first coordinate lies in [lo, hi] (fast path for descent)."""
        if self._firsts is None:
            self._firsts = [e[0] for e in self.elems]
        i = bisect_left(self._firsts, lo)
        j = bisect_right(self._firsts, hi)
        return self.elems[i:j]

    def to_json(self):
        return [list(e) for e in self.elems]


class Cube:
    """The lattice cube lower + {0, ..., side-1}^d."""

    __slots__ = ("dim", "lower", "side")

    def __init__(self, lower: Elem, side: int):
        if side < 1:
            raise ValueError("cube side must be positive")
        self.lower = as_elem(lower)
        self.dim = len(self.lower)
        self.side = side

    @property
    def upper(self) -> Elem:
        return tuple(x + self.side - 1 for x in self.lower)

    def bbox(self) -> tuple[Elem, Elem]:
        return self.lower, self.upper

    def __contains__(self, g) -> bool:
        return len(g) == self.dim and all(l <= x < l + self.side for x, l in zip(g, self.lower))

    def __len__(self) -> int:
        return self.side ** self.dim

    @property
    def card(self) -> int:
        return self.side ** self.dim

    def __iter__(self) -> Iterator[Elem]:
        axes = [range(l, l + self.side) for l in self.lower]
        return (tuple(p) for p in product(*axes))

    def explicit(self) -> FinSet:
        return FinSet(iter(self), dim=self.dim)

    def __eq__(self, other) -> bool:
        if isinstance(other, Cube):
            return self.lower == other.lower and self.side == other.side
        if isinstance(other, FinSet):
            return len(other) == self.card and all(e in self for e in other)
        return NotImplemented

    def __hash__(self):
        return hash((self.lower, self.side))

    def __repr__(self):
        return f"Cube(lower={self.lower}, side={self.side})"

    def to_json(self):
        return {"cube": {"lower": list(self.lower), "side": self.side}}


GSet = Union[FinSet, Cube]


def set_from_json(obj, dim: int) -> GSet:
    if isinstance(obj, dict):
        c = obj["cube"]
        return Cube(tuple(c["lower"]), int(c["side"]))
    return FinSet((tuple(e) for e in obj), dim=dim)


def _check_dims(A: GSet, B: GSet):
    if A.dim != B.dim:
        raise DimensionError(f"dimension mismatch: {A.dim} vs {B.dim}")


def sumset(A: GSet, B: GSet) -> GSet:
    """{a + b : a in A, b in B}."""
    _check_dims(A, B)
    if isinstance(A, Cube) and isinstance(B, Cube):
        return Cube(vadd(A.lower, B.lower), A.side + B.side - 1)
    return FinSet((vadd(a, b) for a in A for b in B), dim=A.dim)


def negate(A: GSet) -> GSet:
    if isinstance(A, Cube):
        return Cube(vneg(A.upper), A.side)
    return FinSet((vneg(a) for a in A), dim=A.dim)


def difference(A: GSet, B: GSet) -> GSet:
    """A - B as a set."""
    return sumset(A, negate(B))


def translate(A: GSet, g: Elem) -> GSet:
    if isinstance(A, Cube):
        return Cube(vadd(A.lower, g), A.side)
    return FinSet((vadd(a, g) for a in A), dim=A.dim)


def subset(A: GSet, B: GSet) -> bool:
    _check_dims(A, B)
    if isinstance(B, Cube):
        if A.card == 0:
            return True
        lo, hi = A.bbox()
        return lo in B and hi in B
    return all(a in B for a in A)


def iterated_difference(F: GSet, times: int = 2) -> GSet:
    """F - F + F - F ... with ``times`` summands (times even)."""
    D = difference(F, F)
    out = D
    for _ in range(times // 2 - 1):
        out = sumset(out, D)
    return out


def intersection_within(L: GSet, R: GSet) -> set:
    """Explicit L ∩ R, iterating whichever side is explicit and smaller."""
    if isinstance(L, Cube) and isinstance(R, Cube):
        lo = tuple(max(a, b) for a, b in zip(L.lower, R.lower))
        hi = tuple(min(a, b) for a, b in zip(L.upper, R.upper))
        if any(l > h for l, h in zip(lo, hi)):
            return set()
        return set(product(*[range(l, h + 1) for l, h in zip(lo, hi)]))
    if isinstance(L, Cube) or (isinstance(R, FinSet) and len(R) < len(L)):
        L, R = R, L
    return {x for x in L if x in R}


def separation_holds(L: GSet, R: GSet) -> bool:
    """True iff L ∩ R ⊆ {0}."""
    _check_dims(L, R)
    if isinstance(L, Cube) and isinstance(R, Cube):
        lo = tuple(max(a, b) for a, b in zip(L.lower, R.lower))
        hi = tuple(min(a, b) for a, b in zip(L.upper, R.upper))
        if any(l > h for l, h in zip(lo, hi)):
            return True
        return lo == hi == zero(L.dim)
    return intersection_within(L, R) <= {zero(L.dim)}


def translates_disjoint(F: GSet, C: GSet) -> bool:
    """True iff the translates F + c, c in C, are pairwise disjoint."""
    _check_dims(F, C)
    FF = difference(F, F)
    z = zero(F.dim)
    return not any(vsub(c, c2) in FF for c in C for c2 in C if c != c2 and vsub(c, c2) != z)


def difference_injective(A: GSet, B: GSet) -> bool:
    """True iff (a, b) -> a - b is one-to-one off the diagonal a == b."""
    _check_dims(A, B)
    seen = set()
    for a in A:
        for b in B:
            if a == b:
                continue
            diff = vsub(a, b)
            if diff in seen:
                return False
            seen.add(diff)
    return True


def cube(side: int, d: int, center: Elem | int | None = None) -> Cube:
    """Cube of the given side whose lower corner is ``center`` (default 0)."""
    lower = zero(d) if center is None else as_elem(center)
    if len(lower) != d:
        raise DimensionError("corner dimension differs from d")
    return Cube(lower, side)


def centered_cube(radius: int, d: int) -> Cube:
    """{-radius, ..., radius}^d."""
    return Cube((-radius,) * d, 2 * radius + 1)


def spiral(D: int) -> Iterator[Elem]:
    """Enumerate Z^D shell by shell (sup-norm), lexicographically inside a shell."""
    yield zero(D)
    r = 1
    while True:
        for p in product(range(-r, r + 1), repeat=D):
            if max(abs(x) for x in p) == r:
                yield p
        r += 1
