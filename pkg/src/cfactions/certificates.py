"""Machine-checkable certificates for the dynamical claims.

Two certificate shapes cover everything:

* :class:`GroupoidWitness` -- a partial map given piecewise by translations,
  checked for disjoint sources, disjoint images, image containment and a
  coverage fraction.  Conservativity witnesses additionally need h != 0.
* :class:`WanderingCertificate` -- a set W and a target cylinder whose
  orbit-intersection must vanish for every g in a finite ball, together with
  an exact positive lower bound for the measure of the infinite-level W.

Every checker returns an :class:`Outcome` whose verdict is pass, fail or
inconclusive; running out of recorded depth is never reported as failure.
"""
from __future__ import annotations

import enum
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .cylinders import (Cylinder, DepthExhausted, LevelProduct, descend_tuple, entries_measure,
                        images, lift, measure, meet_measure, rational_json, signs_from)
from .groups import (Cube, Elem, FinSet, as_elem, centered_cube, difference, iterated_difference,
                     separation_holds, unit, vadd, vneg, vscale, vsub, zero)
from .schema import CFSchema, LevelError, r_schedule, r_tail_bound


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"

    def __bool__(self):
        return self is Verdict.PASS

    @property
    def exit_code(self) -> int:
        return {Verdict.PASS: 0, Verdict.FAIL: 2, Verdict.INCONCLUSIVE: 3}[self]


@dataclass
class Outcome:
    verdict: Verdict
    reason: str = ""
    data: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.verdict)

    def to_json(self) -> dict:
        out = {"verdict": self.verdict.value, "reason": self.reason}
        for key, val in self.data.items():
            out[key] = frac_str(val) if isinstance(val, Fraction) else val
        return out


def frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_frac(s) -> Fraction:
    return Fraction(s) if not isinstance(s, dict) else Fraction(int(s["num"]), int(s["den"]))


def _fail(reason, **data):
    return Outcome(Verdict.FAIL, reason, data)


def _inconclusive(reason, **data):
    return Outcome(Verdict.INCONCLUSIVE, reason, data)


# ------------------------------------------------- families of cylinders
# A family is a list of (level, tuple) pairs, each standing for [tuple]_level.

def _family(cyls: Iterable[Cylinder]) -> list:
    return [(c.level, t) for c in cyls for t in c.tuples]


def first_overlap(schema: CFSchema, entries: Sequence) -> tuple | None:
    """A pair of intersecting members of the family, or None if disjoint."""
    by_level = defaultdict(set)
    for L, t in entries:
        if t in by_level[L]:
            return (L, t), (L, t)
        by_level[L].add(t)
    levels = sorted(by_level)
    for i, L in enumerate(levels):
        for t in by_level[L]:
            for L2 in levels[:i]:
                u = descend_tuple(schema, t, L, L2)
                if u is not None and u in by_level[L2]:
                    return (L2, u), (L, t)
    return None


def family_within(schema: CFSchema, entries: Sequence, target: Cylinder) -> tuple | None:
    """First member not contained in ``target``, or None."""
    T, p = target.level, target.power
    counts = {}
    for L, t in entries:
        if L >= T:
            if descend_tuple(schema, t, L, T) not in target.tuples:
                return L, t
        else:
            if L not in counts:
                counts[L] = Counter(descend_tuple(schema, v, T, L) for v in target.tuples)
            if counts[L].get(t, 0) != len(schema.sum_block(L + 1, T)) ** p:
                return L, t
    return None


# ------------------------------------------------------ groupoid witness

@dataclass
class GroupoidWitness:
    """Piecewise translation map on ``base`` with values in ``target``.

    Each piece (source, h) is moved by the signed product translation
    T_{s_1 h} x ... x T_{s_p h}; ``delta`` is the claimed coverage fraction.
    """

    schema: CFSchema
    signs: tuple
    base: Cylinder
    target: Cylinder
    pieces: list
    delta: Fraction
    mode: str = "ergodicity"
    claim: str = ""

    @property
    def power(self) -> int:
        return self.base.power

    def covered(self) -> Fraction:
        return sum((measure(c) for c, _ in self.pieces), Fraction(0))

    def to_json(self) -> dict:
        return {
            "type": "groupoid",
            "claim": self.claim,
            "mode": self.mode,
            "signs": "".join("+" if s > 0 else "-" for s in self.signs),
            "base": self.base.to_json(),
            "target": self.target.to_json(),
            "pieces": [{"source": c.to_json(), "h": list(h)} for c, h in self.pieces],
            "delta": frac_str(self.delta),
        }

    @classmethod
    def from_json(cls, schema: CFSchema, obj: dict) -> "GroupoidWitness":
        base = Cylinder.from_json(schema, obj["base"])
        return cls(
            schema=schema,
            signs=signs_from(obj["signs"], base.power),
            base=base,
            target=Cylinder.from_json(schema, obj["target"]),
            pieces=[(Cylinder.from_json(schema, p["source"]), as_elem(p["h"])) for p in obj["pieces"]],
            delta=parse_frac(obj["delta"]),
            mode=obj.get("mode", "ergodicity"),
            claim=obj.get("claim", ""),
        )


def _check_groupoid(w: GroupoidWitness, conservative: bool) -> Outcome:
    s, p = w.schema, w.power
    if len(w.signs) != p or w.target.power != p or any(c.power != p for c, _ in w.pieces):
        return _fail("power or sign-pattern mismatch")
    if any(c.schema is not s for c, _ in w.pieces) or w.base.schema is not s or w.target.schema is not s:
        return _fail("cylinders from a different schema")
    if w.delta <= 0:
        return _fail("claimed fraction must be positive")
    if any(len(h) != s.d for _, h in w.pieces):
        return _fail("element of the wrong dimension")
    if conservative:
        if w.target.level != w.base.level or w.target.tuples != w.base.tuples:
            return _fail("conservativity needs target equal to base")
        if any(h == zero(s.d) for _, h in w.pieces):
            return _fail("a piece is moved by h = 0")
    src = _family(c for c, _ in w.pieces)
    bad = family_within(s, src, w.base)
    if bad:
        return _fail("source piece leaves the base", piece=repr(bad))
    bad = first_overlap(s, src)
    if bad:
        return _fail("source pieces overlap", pair=repr(bad))
    img = []
    try:
        for c, h in w.pieces:
            img.extend(images(c, h, w.signs))
    except DepthExhausted as exc:
        return _inconclusive(f"image needs levels beyond the recorded depth: {exc}")
    bad = first_overlap(s, img)
    if bad:
        return _fail("images overlap", pair=repr(bad))
    bad = family_within(s, img, w.target)
    if bad:
        return _fail("image leaves the target", piece=repr(bad))
    covered = entries_measure(s, src, p)
    moved = entries_measure(s, img, p)
    base = measure(w.base)
    data = {"covered": covered, "image_measure": moved, "base_measure": base,
            "fraction": covered / base, "delta": w.delta}
    if moved != covered:
        return _fail("images do not preserve measure", **data)
    if covered < w.delta * base:
        return _fail("coverage below the claimed fraction", **data)
    return Outcome(Verdict.PASS, "all witness conditions verified", data)


def check_ergodicity_witness(w: GroupoidWitness) -> Outcome:
    return _check_groupoid(w, conservative=False)


def check_conservativity_witness(w: GroupoidWitness) -> Outcome:
    return _check_groupoid(w, conservative=True)


def check_witness(w: GroupoidWitness) -> Outcome:
    return _check_groupoid(w, conservative=w.mode == "conservativity")


# ------------------------------------------------------ witness builders

def _need_depth(schema: CFSchema, level: int):
    if level > schema.depth:
        raise DepthExhausted(f"needs level {level}, schema depth is {schema.depth}")


def _origin(schema: CFSchema, level: int, p: int) -> Cylinder:
    return Cylinder(schema, level, [(zero(schema.d),) * p], power=p)


def build_thm04_swap_witness(schema: CFSchema, n: int) -> GroupoidWitness:
    """(x, y) -> (T_{c'-c} x, T_{c-c'} y) on [c] x [c'], c != c' in C_{n+1}."""
    _need_depth(schema, n + 1)
    C = schema.c(n + 1)
    pieces = [(Cylinder(schema, n + 1, [(c, c2)], power=2, check=False), vsub(c2, c))
              for c in C for c2 in C if c != c2]
    base = _origin(schema, n, 2)
    return GroupoidWitness(schema, (1, -1), base, base, pieces,
                           1 - Fraction(1, len(C)), "conservativity", "thm04-conservative")


def _thm012_meta(schema: CFSchema):
    if schema.variant not in ("thm01", "thm02"):
        raise ValueError(f"needs a rigid or zero-type build, got variant {schema.variant!r}")
    return schema.meta


def _signed_f(v, w, plus: int) -> tuple:
    f = [vsub(b, a) for a, b in zip(v, w)]
    return tuple(x if j < plus else vneg(x) for j, x in enumerate(f))


def _prefix_sums(base: tuple, blocks: Sequence[Sequence[tuple]]) -> list:
    sums = [base]
    for blk in blocks:
        sums = [tuple(vadd(x, c) for x, c in zip(t, b)) for t in sums for b in blk]
    return sums


def build_thm01_ergodicity_witness(schema: CFSchema, v, w, plus: int | None = None,
                                   n: int = 0, L: int | None = None) -> GroupoidWitness:
    """First-hit map from [v]_n to [w]_n for T^{x plus} x (T^-1)^{x (k - plus)}.

    With c_j = j a_l + d_{l,j}, the source pattern at level l has c_{j-1} on
    plus components and c_j on minus components; moving by a_l turns it into
    the image pattern (the other neighbour) up to the shift f~.  A level stops
    the search when x_l is either pattern, so images of different levels stay
    disjoint and the map is one-to-one.
    """
    meta = _thm012_meta(schema)
    k = meta.k
    plus = k if plus is None else plus
    if not 0 <= plus <= k:
        raise ValueError("plus must lie in 0..k")
    L = schema.depth if L is None else L
    _need_depth(schema, L)
    v = tuple(as_elem(x) for x in v)
    w = tuple(as_elem(x) for x in w)
    if len(v) != k or len(w) != k:
        raise ValueError(f"v and w need {k} components")
    F = schema.f(n)
    if not all(x in F for x in v + w):
        raise ValueError(f"v and w must lie in F_{n}")
    ft = _signed_f(v, w, plus)
    levels = [l for l in meta.levels_for(ft) if n < l <= L]
    if not levels:
        raise DepthExhausted(f"no level in ({n}, {L}] is assigned to {ft}; deepen the schema")
    signs = (1,) * plus + (-1,) * (k - plus)
    pieces, blocks = [], []
    for l in range(n + 1, L + 1):
        C = list(schema.c(l))
        if l not in levels:
            blocks.append(list(product(C, repeat=k)))
            continue
        c0 = meta.c0_list(l)
        pattern = tuple(c0[j] if j < plus else c0[j + 1] for j in range(k))
        landing = tuple(c0[j + 1] if j < plus else c0[j] for j in range(k))
        src = [tuple(vadd(x, c) for x, c in zip(t, pattern)) for t in _prefix_sums(v, blocks)]
        pieces.append((Cylinder(schema, l, src, power=k, check=False), meta.a[l - 1]))
        blocks.append([b for b in product(C, repeat=k) if b not in (pattern, landing)])
    base = Cylinder(schema, n, [v], power=k)
    target = Cylinder(schema, n, [w], power=k)
    wit = GroupoidWitness(schema, signs, base, target, pieces, Fraction(1), "ergodicity",
                          "thm01-ergodic")
    wit.delta = wit.covered() / measure(base)
    return wit


def thm01_first_hit_fraction(schema: CFSchema, levels: Iterable[int]) -> Fraction:
    """sum over l of prod_{earlier j}(1 - 2/R_j^k) * R_l^-k: exact first-hit coverage."""
    k = schema.meta.k
    out, keep = Fraction(0), Fraction(1)
    for l in sorted(levels):
        R = schema.meta.R[l - 1]
        out += keep * Fraction(1, R ** k)
        keep *= 1 - Fraction(2, R ** k)
    return out


def build_thm02_conservativity_witness(schema: CFSchema, n: int = 0, L: int | None = None) -> GroupoidWitness:
    """Diagonal first-hit map on [0]_n for the (k+1)-fold power.

    A piece is the set where level l is the first diagonal level with common
    value c; it moves by c' - c, c' the cyclic successor of c in C_l, which
    keeps the map one-to-one.
    """
    meta = _thm012_meta(schema)
    p = meta.k + 1
    L = schema.depth if L is None else L
    _need_depth(schema, L)
    if L <= n:
        raise DepthExhausted("need at least one level above n")
    base = _origin(schema, n, p)
    pieces, blocks = [], []
    delta, keep = Fraction(0), Fraction(1)
    for l in range(n + 1, L + 1):
        C = list(schema.c(l))
        prefix = _prefix_sums(base.sorted_tuples()[0], blocks)
        for i, c in enumerate(C):
            nxt = C[(i + 1) % len(C)]
            src = [tuple(vadd(x, c) for x in t) for t in prefix]
            pieces.append((Cylinder(schema, l, src, power=p, check=False), vsub(nxt, c)))
        blocks.append([b for b in product(C, repeat=p) if len(set(b)) > 1])
        R = len(C)
        delta += keep * Fraction(1, R ** (p - 1))
        keep *= 1 - Fraction(1, R ** (p - 1))
    return GroupoidWitness(schema, (1,) * p, base, base, pieces, delta, "conservativity",
                           "thm02-conservative")


def _thm03_meta(schema: CFSchema):
    if schema.variant != "thm03":
        raise ValueError(f"needs an index-two build, got variant {schema.variant!r}")
    return schema.meta


def thm03_level_for(schema: CFSchema, target: Elem, m: int) -> int:
    meta = _thm03_meta(schema)
    for n in range(m + 1, schema.depth + 1):
        if meta.dn[n - 1] == target:
            return n
    raise DepthExhausted(f"no level above {m} has d_n = {target}; deepen the schema")


def build_thm03_ergodicity_witness(schema: CFSchema, v1, v2, w1, w2, m: int) -> GroupoidWitness:
    """Pieces [v1+D+l_i] x [v2+D-e_j] moved diagonally by w1-v1+e_j-l_i."""
    meta = _thm03_meta(schema)
    v1, v2, w1, w2 = map(as_elem, (v1, v2, w1, w2))
    F = schema.f(m)
    if not all(x in F for x in (v1, v2, w1, w2)):
        raise ValueError(f"v1, v2, w1, w2 must lie in F_{m}")
    n = thm03_level_for(schema, vadd(vsub(w2, w1), vsub(v1, v2)), m)
    D = list(schema.sum_block(m + 1, n - 1))
    pieces = []
    for li in meta.l[n - 1]:
        for ej in meta.e[n - 1]:
            src = [(vadd(vadd(v1, a), li), vsub(vadd(v2, b), ej)) for a in D for b in D]
            h = vadd(vsub(w1, v1), vsub(ej, li))
            pieces.append((Cylinder(schema, n, src, power=2, check=False), h))
    base = Cylinder(schema, m, [(v1, v2)], power=2)
    target = Cylinder(schema, m, [(w1, w2)], power=2)
    return GroupoidWitness(schema, (1, 1), base, target, pieces, Fraction(1, 16), "ergodicity",
                           "thm03-ergodic")


def thm03_default_targets(schema: CFSchema, m: int) -> tuple:
    """(v1, v2, w1, w2) in F_m with w2 - w1 = d_{m+1}, v1 = v2 = 0."""
    meta = _thm03_meta(schema)
    _need_depth(schema, m + 1)
    d = meta.dn[m]
    w1 = tuple(-(x // 2) for x in d)
    w2 = vadd(d, w1)
    z = zero(schema.d)
    if w1 not in schema.f(m) or w2 not in schema.f(m):
        raise ValueError(f"d_{m + 1} = {d} does not split inside F_{m}")
    return z, z, w1, w2


# ------------------------------------------------- wandering certificates

def _R(schema: CFSchema, j: int) -> int:
    meta = schema.meta
    return meta.R[j - 1] if j <= len(meta.R) else r_schedule(meta.k, j)


def _thm03_slack(schema: CFSchema) -> Fraction:
    """1/4 - sum of recorded 1/N_j: bounds the unrecorded sum of 1/N_j."""
    return Fraction(1, 4) - sum((Fraction(1, x) for x in schema.meta.N[: schema.depth]), Fraction(0))


class BoundRule:
    """Per-level loss x_j (fraction of level-j tuples excluded from W) and tails.

    ``x`` is exact; ``shown`` is the coarser term of the displayed partial-sum
    bound; ``tail`` bounds the sum of x_j over unrecorded levels and
    ``shown_tail`` the sum of ``shown``; ``xmax`` bounds every unrecorded x_j.
    """

    def __init__(self, kind: str, schema: CFSchema):
        self.kind, self.schema = kind, schema
        if kind in ("thm01-nonergodic", "thm02-wandering"):
            _thm012_meta(schema)
        elif kind in ("thm03-nonergodic", "thm03-wandering"):
            _thm03_meta(schema)
        else:
            raise ValueError(f"unknown certificate kind {kind!r}")

    def x(self, j: int) -> Fraction:
        s, kind = self.schema, self.kind
        if kind == "thm01-nonergodic":
            k = s.meta.k
            return Fraction(k + 1, _R(s, j)) ** (k + 1)
        if kind == "thm02-wandering":
            k, R = s.meta.k, _R(s, j)
            return Fraction((k + 1) ** (k + 2) + R - k - 1, R ** (k + 2))
        M = 4 * s.meta.N[j - 1]
        if kind == "thm03-nonergodic":
            return Fraction(1, M)
        return Fraction(3, M) - Fraction(2, M * M)

    def shown(self, j: int) -> Fraction:
        s, kind = self.schema, self.kind
        if kind == "thm02-wandering":
            k, R = s.meta.k, _R(s, j)
            return Fraction(1, R ** (k + 1)) * (1 + Fraction((k + 1) ** (k + 2), R))
        if kind == "thm03-nonergodic":
            return Fraction(4, s.meta.N[j - 1])
        if kind == "thm03-wandering":
            return Fraction(3, 4 * s.meta.N[j - 1])
        return self.x(j)

    def tail(self) -> Fraction:
        s, kind, N = self.schema, self.kind, self.schema.depth
        if kind == "thm01-nonergodic":
            k = s.meta.k
            return (k + 1) ** (k + 1) * r_tail_bound(k, N, k + 1)
        if kind == "thm02-wandering":
            k = s.meta.k
            return r_tail_bound(k, N, k + 1) + (k + 1) ** (k + 2) * r_tail_bound(k, N, k + 2)
        if kind == "thm03-nonergodic":
            return _thm03_slack(s) / 4
        return _thm03_slack(s) * Fraction(3, 4)

    def shown_tail(self) -> Fraction:
        if self.kind == "thm03-nonergodic":
            return 4 * _thm03_slack(self.schema)
        return self.tail()

    def xmax(self) -> Fraction:
        s, kind = self.schema, self.kind
        if kind in ("thm01-nonergodic", "thm02-wandering"):
            nxt = s.depth + 1
            return max(self.x(nxt), self.shown(nxt))
        return self.tail()

    def tail_factor(self) -> Fraction:
        """Lower bound for prod over unrecorded j of (1 - x_j).

        max of 1 - tail and (1 - t/M)^M with t = tail/(1 - xmax), using
        log(1-x) >= -x/(1-x) and (1 - t/M)^M <= exp(-t).
        """
        tail, xm = self.tail(), self.xmax()
        linear = 1 - tail
        if xm >= 1:
            return max(linear, Fraction(0))
        t = tail / (1 - xm)
        M = math.floor(2 * t) + 1
        return max(linear, (1 - t / M) ** M)

    def shown_bound(self, first: int) -> Fraction:
        """1 - sum_{j=first}^{depth} shown_j - shown tail."""
        return 1 - sum((self.shown(j) for j in range(first, self.schema.depth + 1)),
                       Fraction(0)) - self.shown_tail()


@dataclass
class WanderingCertificate:
    """No point of W is moved into ``target`` by any g in the ball F_m - F_m.

    ``target`` None means W itself (wandering, g != 0); otherwise g = 0 is
    included (non-ergodicity).  ``bound`` claims a lower bound for
    mu(W_inf) / mu([0]_{base_level}), W_inf the infinite-level set whose
    recorded levels give W.
    """

    schema: CFSchema
    kind: str
    W: LevelProduct | Cylinder
    target: LevelProduct | Cylinder | None
    signs: tuple
    ball_level: int
    base_level: int
    bound: Fraction
    claim: str = ""

    def to_json(self) -> dict:
        def enc(obj):
            if obj is None:
                return "self"
            if isinstance(obj, LevelProduct):
                return {"product": obj.to_json()}
            return {"cylinder": obj.to_json()}

        return {
            "type": "wandering",
            "claim": self.claim,
            "kind": self.kind,
            "signs": "".join("+" if s > 0 else "-" for s in self.signs),
            "W": enc(self.W),
            "target": enc(self.target),
            "ball_level": self.ball_level,
            "base_level": self.base_level,
            "bound": frac_str(self.bound),
        }

    @classmethod
    def from_json(cls, schema: CFSchema, obj: dict) -> "WanderingCertificate":
        def dec(x):
            if x == "self":
                return None
            if "product" in x:
                return LevelProduct.from_json(schema, x["product"])
            return Cylinder.from_json(schema, x["cylinder"])

        W = dec(obj["W"])
        return cls(schema, obj["kind"], W, dec(obj["target"]), signs_from(obj["signs"], W.power),
                   obj["ball_level"], obj["base_level"], parse_frac(obj["bound"]), obj.get("claim", ""))


def _explicit(obj, level: int) -> Cylinder:
    cyl = obj.to_cylinder() if isinstance(obj, LevelProduct) else obj
    return lift(cyl, level) if cyl.level < level else cyl


def _key(t: tuple, signs: tuple) -> tuple:
    first = vscale(signs[0], t[0])
    return tuple(vsub(vscale(s, x), first) for s, x in zip(signs[1:], t[1:]))


def certified_bound(cert: WanderingCertificate) -> Fraction:
    """Exact lower bound for mu(W_inf)/mu([0]_base) derived from W and the schema."""
    s = cert.schema
    rule = BoundRule(cert.kind, s)
    base = _origin(s, cert.base_level, cert.W.power)
    ratio = (cert.W.measure() if isinstance(cert.W, LevelProduct) else measure(cert.W)) / measure(base)
    out = ratio
    for j in range(cert.W.level + 1, s.depth + 1):
        out *= 1 - rule.x(j)
    return out * rule.tail_factor()


def check_wandering(cert: WanderingCertificate, ball: Iterable | None = None) -> Outcome:
    """Verify the avoidance property over the ball and the measure bound.

    The default ball is F_m - F_m.  For g there, any return into a level-L
    cylinder (L = level of W and target, L >= m) is already visible at level
    L, because (C_j - C_j) meets F_{j-1}-F_{j-1}+F_{j-1}-F_{j-1} only in 0
    for j > L; that separation is verified on the recorded levels, so L must
    be below the depth.  An explicit ``ball`` instead computes every
    intersection measure directly.
    """
    s = cert.schema
    p = cert.W.power
    if len(cert.signs) != p or (cert.target is not None and cert.target.power != p):
        return _fail("power or sign-pattern mismatch")
    try:
        rule = BoundRule(cert.kind, s)
    except ValueError as exc:
        return _fail(str(exc))
    if cert.bound <= 0:
        return _fail("claimed lower bound is not positive", bound=cert.bound)
    base = _origin(s, cert.base_level, p)
    W = _explicit(cert.W, cert.W.level)
    bad = family_within(s, [(W.level, t) for t in W.tuples], base)
    if bad:
        return _fail("W leaves the base cylinder", piece=repr(bad))
    cert_lb = certified_bound(cert)
    data = {"bound": cert.bound, "certified": cert_lb,
            "shown_bound": rule.shown_bound(cert.base_level + 1), "W_tuples": len(W.tuples)}
    if cert.bound > cert_lb:
        return _fail("claimed bound exceeds the certified lower bound", **data)

    if ball is not None:
        T = W if cert.target is None else _explicit(cert.target, cert.target.level)
        for g in ball:
            g = as_elem(g)
            if cert.target is None and g == zero(s.d):
                continue
            try:
                val = meet_measure(W, g, cert.signs, T)
            except DepthExhausted:
                return _inconclusive(f"g = {g} needs levels beyond the recorded depth", **data)
            if val:
                return _fail(f"orbit meets the target at g = {g}", measure=val, **data)
        return Outcome(Verdict.PASS, "no intersection over the explicit ball", data)

    m = cert.ball_level
    L = max(cert.W.level, m if cert.target is None else max(m, cert.target.level))
    if L >= s.depth:
        return _inconclusive("no recorded level above the join level to verify separation", **data)
    for j in range(L + 1, s.depth + 1):
        if not separation_holds(difference(s.c(j), s.c(j)), iterated_difference(s.f(j - 1), 4)):
            return _inconclusive(f"separation fails at level {j}; returns may resolve deeper", **data)
    W = _explicit(cert.W, L)
    T = W if cert.target is None else _explicit(cert.target, L)
    ballset = difference(s.f(m), s.f(m))
    buckets = defaultdict(list)
    for x in W.tuples:
        buckets[_key(x, cert.signs)].append(x)
    z = zero(s.d)
    sg = cert.signs[0]
    for y in T.tuples:
        for x in buckets.get(_key(y, cert.signs), ()):
            g = vscale(sg, vsub(y[0], x[0]))
            if g in ballset and (cert.target is not None or g != z):
                return _fail(f"orbit meets the target at g = {g}", x=repr(x), y=repr(y), **data)
    data["ball"] = f"F_{m} - F_{m}"
    return Outcome(Verdict.PASS, "no intersection over the ball; bound verified", data)


def _product_blocks(schema: CFSchema, lo: int, hi: int, p: int, drop) -> list:
    return [[b for b in product(list(schema.c(j)), repeat=p) if not drop(j, b)] for j in range(lo, hi + 1)]


def _levels(schema: CFSchema, n: int | None, m: int | None, min_n: int):
    m = schema.depth - 1 if m is None else m
    n = max(min_n, m - 1) if n is None else n
    if not min_n <= n <= m < schema.depth:
        raise LevelError(f"need {min_n} <= n <= m < depth, got n={n}, m={m}, depth={schema.depth}")
    return n, m


def _claimed(rule: BoundRule, first: int, cert: WanderingCertificate) -> Fraction:
    shown = rule.shown_bound(first)
    return shown if shown > 0 else certified_bound(cert)


def build_thm01_nonergodicity_certificate(schema: CFSchema, n: int | None = None,
                                          m: int | None = None) -> WanderingCertificate:
    """W = {0} x prod_{j=n..m} (C_j^{k+1} minus C_{j,0}^{k+1}) avoids [0]^k x [h]_{n-1}."""
    meta = _thm012_meta(schema)
    p = meta.k + 1
    n, m = _levels(schema, n, m, 2)
    z = zero(schema.d)
    h = unit(schema.d)
    drop = lambda j, b: all(c in meta.c0(j) for c in b)
    W = LevelProduct(schema, _origin(schema, n - 1, p), _product_blocks(schema, n, m, p, drop))
    B = LevelProduct(schema, Cylinder(schema, n - 1, [(z,) * meta.k + (h,)], power=p),
                     _product_blocks(schema, n, m, p, lambda j, b: False))
    cert = WanderingCertificate(schema, "thm01-nonergodic", W, B, (1,) * p, m, n - 1, Fraction(0),
                                "thm01-nonergodic")
    cert.bound = _claimed(BoundRule(cert.kind, schema), n, cert)
    return cert


def build_thm02_wandering_certificate(schema: CFSchema, n: int | None = None,
                                      m: int | None = None) -> WanderingCertificate:
    """W = prod_{j=n..m} (C_j^{k+2} minus (C_{j,0}^{k+2} and the C_{j,1} diagonal))."""
    meta = _thm012_meta(schema)
    p = meta.k + 2
    if n is None and meta.k >= 2:
        # one level keeps the (k+2)-fold product small
        n = schema.depth - 1 if m is None else m
    n, m = _levels(schema, n, m, 1)

    def drop(j, b):
        c0 = meta.c0(j)
        return all(c in c0 for c in b) or (len(set(b)) == 1 and b[0] not in c0)

    W = LevelProduct(schema, _origin(schema, n - 1, p), _product_blocks(schema, n, m, p, drop))
    cert = WanderingCertificate(schema, "thm02-wandering", W, None, (1,) * p, m, n - 1, Fraction(0),
                                "thm02-wandering")
    cert.bound = _claimed(BoundRule(cert.kind, schema), n, cert)
    return cert


def build_thm03_nonergodicity_certificate(schema: CFSchema, m: int | None = None) -> WanderingCertificate:
    """Z: non-antipodal coordinate pairs on levels 2..m avoids [0]_1 x [f_1]_1 under T x T^-1."""
    meta = _thm03_meta(schema)
    n, m = _levels(schema, 2, m if m is not None else 2, 2)
    f1 = unit(schema.d)
    z = zero(schema.d)
    drop = lambda j, b: meta.antipode(j)[b[0]] == b[1]
    W = LevelProduct(schema, _origin(schema, 1, 2), _product_blocks(schema, 2, m, 2, drop))
    B = LevelProduct(schema, Cylinder(schema, 1, [(z, f1)], power=2),
                     _product_blocks(schema, 2, m, 2, lambda j, b: False))
    cert = WanderingCertificate(schema, "thm03-nonergodic", W, B, (1, -1), m, 1, Fraction(0),
                                "thm03-nonergodic")
    cert.bound = _claimed(BoundRule(cert.kind, schema), 2, cert)
    return cert


def build_thm03_wandering_certificate(schema: CFSchema, m: int = 1) -> WanderingCertificate:
    """W: pairwise distinct coordinates on levels 1..m, wandering for T x T x T."""
    _thm03_meta(schema)
    n, m = _levels(schema, 1, m, 1)
    W = LevelProduct(schema, _origin(schema, 0, 3),
                     _product_blocks(schema, 1, m, 3, lambda j, b: len(set(b)) < 3))
    cert = WanderingCertificate(schema, "thm03-wandering", W, None, (1, 1, 1), m, 0, Fraction(0),
                                "thm03-wandering")
    cert.bound = _claimed(BoundRule(cert.kind, schema), 1, cert)
    return cert


# ------------------------------------------------- rigidity and zero type

def rigidity_profile(schema: CFSchema, A: Cylinder, levels: Iterable[int]) -> list:
    """mu(T_{w_n} A ∩ A) / mu(A) for each level n, exactly."""
    meta = _thm012_meta(schema)
    mA = measure(A)
    return [meet_measure(A, meta.w(n), None, A) / mA for n in levels]


@dataclass
class ZeroTypeScan:
    level: int
    support: int        # admissible g with a nonzero intersection
    max_ratio: Fraction
    argmax: Elem | None
    bound: Fraction

    @property
    def passed(self) -> bool:
        return self.max_ratio < self.bound

    def to_json(self) -> dict:
        return {"level": self.level, "support": self.support, "max_ratio": frac_str(self.max_ratio),
                "argmax": list(self.argmax) if self.argmax else None, "bound": frac_str(self.bound),
                "passed": self.passed}


def admissible(schema: CFSchema, A: Iterable, n: int, g: Elem) -> bool:
    """g in (F_n - F_n) minus (F_{n-1} - F_{n-1}) with g + A + C_n inside F_n."""
    Fn, Fp = schema.f(n), schema.f(n - 1)
    if g not in difference(Fn, Fn) or g in difference(Fp, Fp):
        return False
    return all(vadd(vadd(g, a), c) in Fn for a in A for c in schema.c(n))


def zero_type_scan(schema: CFSchema, A: Iterable, n: int) -> ZeroTypeScan:
    """Max of mu(T_g[A]_{n-1} ∩ [A]_{n-1}) / mu([A]_{n-1}) over admissible g.

    For admissible g the translate is [g+A+C_n]_n, so the ratio is
    #((g+S) ∩ S) / (#A #C_n) with S = A + C_n.  Only g in S - S can give a
    nonzero value, so sweeping those differences covers every admissible g;
    if some admissible g exists outside S - S the maximum is at least 0.
    """
    meta = _thm012_meta(schema)
    A = [as_elem(a) for a in A]
    Fp = schema.f(n - 1)
    if not all(a in Fp for a in A):
        raise ValueError(f"A must lie in F_{n - 1}")
    S = [vadd(a, c) for a in A for c in schema.c(n)]
    counts = Counter(vsub(y, x) for x in S for y in S)
    best, arg, seen = Fraction(0), None, 0
    denom = len(A) * len(schema.c(n))
    for g, cnt in sorted(counts.items()):
        if admissible(schema, A, n, g):
            seen += 1
            r = Fraction(cnt, denom)
            if r > best:
                best, arg = r, g
    bound = Fraction((meta.k + 1) ** 2, len(schema.c(n)))
    return ZeroTypeScan(n, seen, best, arg, bound)


def zero_type_bruteforce(schema: CFSchema, A: Iterable, n: int, gs: Iterable) -> Fraction:
    """Max ratio over the given g via meet_measure on cylinders (independent oracle)."""
    A = [as_elem(a) for a in A]
    cyl = Cylinder(schema, n - 1, [(a,) for a in A], power=1)
    mA = measure(cyl)
    best = Fraction(0)
    for g in gs:
        g = as_elem(g)
        if admissible(schema, A, n, g):
            best = max(best, meet_measure(cyl, g, None, cyl) / mA)
    return best


# --------------------------------------------------------------- fuzzing

def _small_shift(schema: CFSchema, level: int, t: tuple, rng: random.Random):
    F = schema.f(level)
    i = rng.randrange(len(t))
    for e in (unit(schema.d), vneg(unit(schema.d))):
        x = vadd(t[i], e)
        if x in F:
            return t[:i] + (x,) + t[i + 1:]
    return None


def mutate(cert, rng: random.Random):
    """One single-field corruption of a passing certificate; returns (copy, label)."""
    if isinstance(cert, GroupoidWitness):
        return _mutate_witness(cert, rng)
    return _mutate_wandering(cert, rng)


def _mutate_witness(w: GroupoidWitness, rng: random.Random):
    s = w.schema
    kinds = ["enlarge", "delta", "shift-h", "move-target", "duplicate"]
    if w.mode == "conservativity":
        kinds.append("zero-h")
    kind = rng.choice(kinds)
    pieces = list(w.pieces)
    i = rng.randrange(len(pieces))
    src, h = pieces[i]
    if kind == "enlarge":
        t = rng.choice(sorted(src.tuples))
        moved = _small_shift(s, src.level, t, rng)
        if moved is None:
            kind = "delta"
        else:
            pieces[i] = (Cylinder(s, src.level, src.tuples | {moved}, power=src.power), h)
            return replace(w, pieces=pieces), kind
    if kind == "delta":
        return replace(w, delta=w.covered() / measure(w.base) + Fraction(1, rng.randint(2, 10 ** 6))), kind
    if kind == "shift-h":
        # h + e = 0 would be the identity, a legitimate piece when base = target
        e = unit(s.d, rng.randrange(s.d), rng.choice((1, -1)))
        if vadd(h, e) == zero(s.d):
            e = vneg(e)
        pieces[i] = (src, vadd(h, e))
        return replace(w, pieces=pieces), kind
    if kind == "zero-h":
        pieces[i] = (src, zero(s.d))
        return replace(w, pieces=pieces), kind
    if kind == "duplicate":
        pieces.insert(rng.randrange(len(pieces) + 1), (src, h))
        return replace(w, pieces=pieces), kind
    t = next(iter(w.target.tuples))
    moved = _small_shift(s, w.target.level, t, rng)
    tgt = Cylinder(s, w.target.level, [moved], power=w.target.power) if moved else \
        Cylinder(s, w.target.level, [], power=w.target.power)
    return replace(w, target=tgt), kind


def _mutate_wandering(c: WanderingCertificate, rng: random.Random):
    s = c.schema
    kind = rng.choice(["bound-up", "bound-nonpositive", "collide", "ball-depth", "target-onto-W"])
    if kind == "bound-up":
        return replace(c, bound=certified_bound(c) + Fraction(1, rng.randint(2, 10 ** 6))), kind
    if kind == "bound-nonpositive":
        return replace(c, bound=-Fraction(rng.randint(0, 5), rng.randint(1, 5))), kind
    if kind == "ball-depth":
        return replace(c, ball_level=s.depth), kind
    W = _explicit(c.W, c.W.level)
    if kind == "target-onto-W":
        return replace(c, target=W), kind
    x = rng.choice(sorted(W.tuples))
    e = unit(s.d)
    F = s.f(W.level)
    for g in (e, vneg(e)):
        y = tuple(vadd(xi, vscale(si, g)) for xi, si in zip(x, c.signs))
        if all(yi in F for yi in y):
            return replace(c, W=Cylinder(s, W.level, W.tuples | {y}, power=W.power)), kind
    return replace(c, bound=certified_bound(c) * 2), "bound-up"


def check_any(cert) -> Outcome:
    if isinstance(cert, GroupoidWitness):
        return check_witness(cert)
    return check_wandering(cert)


def fuzz(certs: Sequence, count: int = 200, seed: int = 0) -> list:
    """Apply ``count`` random mutations; returns (label, verdict) per trial."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        base = rng.choice(list(certs))
        mutant, label = mutate(base, rng)
        out.append((label, check_any(mutant).verdict))
    return out


def certificate_from_json(schema: CFSchema, obj: dict):
    if obj.get("type") == "groupoid":
        return GroupoidWitness.from_json(schema, obj)
    if obj.get("type") == "wandering":
        return WanderingCertificate.from_json(schema, obj)
    raise ValueError(f"unknown certificate type {obj.get('type')!r}")
