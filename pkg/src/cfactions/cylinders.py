"""Cylinders [A]_n in the p-fold product space and their exact measure.

A cylinder stores its level n, its power p and an explicit set of p-tuples
of level-n bases.  Lifting is lazy: operations move a tuple to a deeper
level only when the translation they need leaves F_n.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Sequence

from .groups import Elem, as_elem, vadd, vscale
from .schema import CFSchema, LevelError


class DepthExhausted(LevelError):
    """An operation needed a level beyond the recorded depth of the schema."""


class InsufficientDepth(ValueError):
    """A point prefix was too short to carry out the action."""


Signs = tuple  # tuple of +1 / -1, one per component


def signs_from(spec: str | Sequence[int] | None, power: int) -> Signs:
    """'+-+' or (1, -1, 1) -> (1, -1, 1); None means all plus."""
    if spec is None:
        return (1,) * power
    if isinstance(spec, str):
        out = tuple(1 if ch == "+" else -1 for ch in spec if ch in "+-")
    else:
        out = tuple(1 if s > 0 else -1 for s in spec)
    if len(out) != power:
        raise ValueError(f"sign pattern of length {len(out)} for power {power}")
    return out


def _tuple(t, d: int) -> tuple:
    return tuple(as_elem(x) for x in t)


class Cylinder:
    """[A]_n ⊂ X^p for A a set of p-tuples over F_n."""

    __slots__ = ("schema", "level", "power", "tuples")

    def __init__(self, schema: CFSchema, level: int, tuples: Iterable, power: int | None = None,
                 check: bool = True):
        schema.f(level)
        tuples = frozenset(_tuple(t, schema.d) for t in tuples)
        if power is None:
            lens = {len(t) for t in tuples}
            if len(lens) != 1:
                raise ValueError("power cannot be inferred")
            power = lens.pop()
        if check:
            F = schema.f(level)
            for t in tuples:
                if len(t) != power or not all(x in F for x in t):
                    raise ValueError(f"tuple {t} is not in F_{level}^{power}")
        self.schema = schema
        self.level = level
        self.power = power
        self.tuples = tuples

    @classmethod
    def point(cls, schema: CFSchema, level: int, *bases) -> "Cylinder":
        return cls(schema, level, [tuple(as_elem(b) for b in bases)])

    @classmethod
    def from_sets(cls, schema: CFSchema, level: int, *sets) -> "Cylinder":
        """[A_1 × ... × A_p]_n."""
        return cls(schema, level, product(*[[as_elem(x) for x in S] for S in sets]), power=len(sets))

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)

    def __repr__(self):
        return f"Cylinder(level={self.level}, power={self.power}, n={len(self.tuples)})"

    def sorted_tuples(self) -> list:
        return sorted(self.tuples)

    def to_json(self) -> dict:
        return {"level": self.level, "power": self.power,
                "tuples": [[list(x) for x in t] for t in self.sorted_tuples()]}

    @classmethod
    def from_json(cls, schema: CFSchema, obj: dict) -> "Cylinder":
        return cls(schema, obj["level"], (tuple(tuple(x) for x in t) for t in obj["tuples"]),
                   power=obj["power"])


def rational_json(q: Fraction) -> dict:
    q = Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def measure(cyl: Cylinder) -> Fraction:
    """#A / (#C_1 ... #C_n)^p."""
    return Fraction(len(cyl.tuples), cyl.schema.mass(cyl.level) ** cyl.power)


def lift(cyl: Cylinder, m: int) -> Cylinder:
    """Rewrite [A]_n as [A + C_{n+1}^p + ... + C_m^p]_m."""
    s = cyl.schema
    if m < cyl.level:
        raise LevelError("lift target below cylinder level")
    if m > s.depth:
        raise DepthExhausted(f"level {m} exceeds depth {s.depth}")
    block = s.sum_block(cyl.level + 1, m)
    out = set()
    for t in cyl.tuples:
        for cs in product(block, repeat=cyl.power):
            out.add(tuple(vadd(x, c) for x, c in zip(t, cs)))
    return Cylinder(s, m, out, power=cyl.power, check=False)


def descend_tuple(schema: CFSchema, t: tuple, level: int, to: int) -> tuple | None:
    out = []
    for x in t:
        y = schema.descend(x, level, to)
        if y is None:
            return None
        out.append(y)
    return tuple(out)


def _same_frame(c1: Cylinder, c2: Cylinder):
    if c1.schema is not c2.schema:
        raise ValueError("cylinders over different schemas")
    if c1.power != c2.power:
        raise ValueError(f"power mismatch: {c1.power} vs {c2.power}")


def intersect(c1: Cylinder, c2: Cylinder) -> Cylinder:
    """[A]_n ∩ [B]_m at level max(n, m).

    Equivalent to lifting both to the deeper level; the deeper tuples are
    instead descended, which avoids materializing the lift.
    """
    _same_frame(c1, c2)
    if c1.level > c2.level:
        c1, c2 = c2, c1
    s = c1.schema
    if c1.level == c2.level:
        keep = c1.tuples & c2.tuples
    else:
        keep = {t for t in c2.tuples if descend_tuple(s, t, c2.level, c1.level) in c1.tuples}
    return Cylinder(s, c2.level, keep, power=c1.power, check=False)


def union(c1: Cylinder, c2: Cylinder) -> Cylinder:
    _same_frame(c1, c2)
    m = max(c1.level, c2.level)
    return Cylinder(c1.schema, m, lift(c1, m).tuples | lift(c2, m).tuples, power=c1.power, check=False)


def cartesian(c1: Cylinder, c2: Cylinder) -> Cylinder:
    """[A]_n × [B]_n as a cylinder of power p1 + p2 (levels aligned by lifting)."""
    m = max(c1.level, c2.level)
    a, b = lift(c1, m), lift(c2, m)
    return Cylinder(c1.schema, m, (x + y for x in a.tuples for y in b.tuples),
                    power=c1.power + c2.power, check=False)


@dataclass(frozen=True)
class Deferred:
    """Translation does not fit at the cylinder's level.

    ``extra`` is the least number of further levels after which every tuple
    fits, or None when the recorded depth runs out first.
    """

    extra: int | None

    @property
    def exhausted(self) -> bool:
        return self.extra is None


def _shifts(g: Elem, signs: Signs) -> tuple:
    return tuple(vscale(s, g) for s in signs)


def translate(cyl: Cylinder, g, signs=None) -> Cylinder | Deferred:
    """T_{s_1 g} × ... × T_{s_p g} applied to [A]_n, or Deferred."""
    s = cyl.schema
    g = as_elem(g)
    signs = signs_from(signs, cyl.power)
    sh = _shifts(g, signs)
    F = s.f(cyl.level)
    moved = [tuple(vadd(x, y) for x, y in zip(t, sh)) for t in cyl.tuples]
    if all(x in F for t in moved for x in t):
        return Cylinder(s, cyl.level, moved, power=cyl.power, check=False)
    from .schema import _sum_contained
    from .groups import FinSet
    comps = {vadd(x, y) for t in cyl.tuples for x, y in zip(t, sh)}
    pts = FinSet(comps, dim=s.d)
    for m in range(cyl.level + 1, s.depth + 1):
        if _sum_contained([pts, s.sum_block(cyl.level + 1, m)], s.f(m)):
            return Deferred(m - cyl.level)
    return Deferred(None)


def translate_lifted(cyl: Cylinder, g, signs=None) -> Cylinder:
    """Translate after lifting to the least level where everything fits."""
    out = translate(cyl, g, signs)
    if isinstance(out, Cylinder):
        return out
    if out.exhausted:
        raise DepthExhausted("translation does not fit within recorded depth")
    return translate(lift(cyl, cyl.level + out.extra), g, signs)


def tuple_images(schema: CFSchema, level: int, t: tuple, shifts: tuple, truncate: bool = False) -> list:
    """Images (level, tuple) of one p-tuple, lifting only where needed.

    With ``truncate`` the parts that still leave F_depth are dropped instead
    of raising, so the result covers only the recorded portion of the orbit.
    """
    moved = tuple(vadd(x, y) for x, y in zip(t, shifts))
    F = schema.f(level)
    if all(x in F for x in moved):
        return [(level, moved)]
    if level >= schema.depth:
        if truncate:
            return []
        raise DepthExhausted(f"translation of a level-{level} tuple leaves F_{level}")
    out = []
    for cs in product(schema.c(level + 1), repeat=len(t)):
        out.extend(tuple_images(schema, level + 1, tuple(vadd(x, c) for x, c in zip(t, cs)),
                                shifts, truncate))
    return out


def images(cyl: Cylinder, g, signs=None, truncate: bool = False) -> list:
    sh = _shifts(as_elem(g), signs_from(signs, cyl.power))
    out = []
    for t in cyl.tuples:
        out.extend(tuple_images(cyl.schema, cyl.level, t, sh, truncate))
    return out


def entries_measure(schema: CFSchema, entries: Iterable, power: int) -> Fraction:
    """Total measure of a disjoint family of (level, tuple) cylinders."""
    counts = Counter(L for L, _ in entries)
    return sum((Fraction(c, schema.mass(L) ** power) for L, c in counts.items()), Fraction(0))


def meet_in(schema: CFSchema, entries: Iterable, target: Cylinder) -> Fraction:
    """μ^p((⊔ entries) ∩ target) for a disjoint family of (level, tuple) cylinders."""
    p = target.power
    total = Fraction(0)
    down = {}
    for L, u in entries:
        if L >= target.level:
            if descend_tuple(schema, u, L, target.level) in target.tuples:
                total += Fraction(1, schema.mass(L) ** p)
        else:
            if L not in down:
                down[L] = Counter(descend_tuple(schema, v, target.level, L) for v in target.tuples)
            c = down[L].get(u, 0)
            if c:
                total += Fraction(c, schema.mass(target.level) ** p)
    return total


def meet_measure(c1: Cylinder, g, signs, c2: Cylinder, truncate: bool = False) -> Fraction:
    """μ^p(T̃_g c1 ∩ c2) exactly, T̃_g the signed product translation.

    Raises DepthExhausted when part of T̃_g c1 cannot be placed within the
    recorded levels, unless ``truncate`` asks to ignore that part.
    """
    _same_frame(c1, c2)
    return meet_in(c1.schema, images(c1, g, signs, truncate), c2)


# --------------------------------------------------------------- points

@dataclass(frozen=True)
class PointPrefix:
    """x = (f_n, c_{n+1}, ..., c_m) with f_n in F_n and c_j in C_j."""

    level: int
    f: Elem
    coords: tuple = ()

    @property
    def top(self) -> int:
        return self.level + len(self.coords)


def apply_point(schema: CFSchema, x: PointPrefix, g) -> PointPrefix:
    """T_g x using the least level j with g + f_j in F_j."""
    g = as_elem(g)
    if x.top > schema.depth:
        raise DepthExhausted("prefix deeper than schema")
    base = as_elem(x.f)
    for idx in range(len(x.coords) + 1):
        j = x.level + idx
        if idx:
            base = vadd(base, as_elem(x.coords[idx - 1]))
        moved = vadd(base, g)
        if moved in schema.f(j):
            return PointPrefix(j, moved, tuple(as_elem(c) for c in x.coords[idx:]))
    raise InsufficientDepth(f"g + f_j leaves F_j for every j up to {x.top}; supply deeper coordinates")


# ------------------------------------------------ level-product cylinders

class LevelProduct:
    """{base} × S_n × ... × S_m: a base tuple at level n-1 and, per level j,
    the allowed blocks S_j ⊆ C_j^p of coordinate tuples.

    This is the shape of every finite-depth surrogate of a wandering set; its
    measure is computed without enumerating the product.
    """

    def __init__(self, schema: CFSchema, base: Cylinder, blocks: Sequence[Iterable]):
        self.schema = schema
        self.base = base
        self.start = base.level + 1
        self.blocks = [frozenset(_tuple(b, schema.d) for b in blk) for blk in blocks]
        self.power = base.power
        for j, blk in enumerate(self.blocks, start=self.start):
            C = schema.c(j)
            for b in blk:
                if len(b) != self.power or not all(c in C for c in b):
                    raise ValueError(f"block entry {b} not in C_{j}^{self.power}")

    @property
    def level(self) -> int:
        return self.base.level + len(self.blocks)

    def measure(self) -> Fraction:
        out = measure(self.base)
        for j, blk in enumerate(self.blocks, start=self.start):
            out *= Fraction(len(blk), len(self.schema.c(j)) ** self.power)
        return out

    def ratio(self) -> Fraction:
        return self.measure() / measure(self.base)

    def __len__(self):
        n = len(self.base.tuples)
        for blk in self.blocks:
            n *= len(blk)
        return n

    def iter_tuples(self) -> Iterator[tuple]:
        sums = [t for t in self.base.tuples]
        for blk in self.blocks:
            sums = [tuple(vadd(x, c) for x, c in zip(t, b)) for t in sums for b in blk]
        return iter(sums)

    def to_cylinder(self) -> Cylinder:
        return Cylinder(self.schema, self.level, self.iter_tuples(), power=self.power, check=False)

    def to_json(self) -> dict:
        return {"base": self.base.to_json(),
                "blocks": [sorted([list(x) for x in b] for b in blk) for blk in self.blocks]}

    @classmethod
    def from_json(cls, schema: CFSchema, obj: dict) -> "LevelProduct":
        base = Cylinder.from_json(schema, obj["base"])
        blocks = [[tuple(tuple(x) for x in b) for b in blk] for blk in obj["blocks"]]
        return cls(schema, base, blocks)
