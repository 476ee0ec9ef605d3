"""(C,F) schemas: data structure, validator and the three theorem builders."""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Any, Iterable, Sequence

from .groups import (
    Cube,
    Elem,
    FinSet,
    GSet,
    as_elem,
    centered_cube,
    difference,
    difference_injective,
    iterated_difference,
    negate,
    norm_inf,
    separation_holds,
    set_from_json,
    spiral,
    subset,
    sumset,
    translates_disjoint,
    unit,
    vadd,
    vneg,
    vscale,
    vsub,
    zero,
)


class LevelError(IndexError):
    pass


# ---------------------------------------------------------------- schedules

def ceil_root(x: int, k: int) -> int:
    """Smallest integer t >= 0 with t**k >= x."""
    if x <= 0:
        return 0
    t = max(1, int(round(x ** (1.0 / k))))
    while t ** k < x:
        t += 1
    while t > 1 and (t - 1) ** k >= x:
        t -= 1
    return t


def r_schedule(k: int, n: int) -> int:
    """R_n = k + 1 + ceil((n+1)^(1/k)).

    sum R_n^-k diverges like the harmonic series, sum R_n^-(k+1) converges.
    """
    return k + 1 + ceil_root(n + 1, k)


def r_tail_bound(k: int, m: int, power: int) -> Fraction:
    """Rational upper bound for sum_{j>m} R_j^-power, valid for power >= k+1.

    Groups the j sharing t = ceil((j+1)^(1/k)) (at most k t^(k-1) of them) and
    compares with sum_{u >= R_{m+1}} u^-2 <= 1/(R_{m+1}-1).
    """
    if power < k + 1:
        raise ValueError("the R-schedule tail diverges for power <= k")
    R = r_schedule(k, m + 1)
    return Fraction(k, R - 1) / Fraction(R) ** (power - k - 1)


@dataclass(frozen=True)
class Progression:
    """The arithmetic progression {start + m*step : m >= 0}."""

    start: int
    step: int

    def __contains__(self, n: int) -> bool:
        return n >= self.start and (n - self.start) % self.step == 0

    def take(self, count: int) -> list[int]:
        return [self.start + m * self.step for m in range(count)]

    def __iter__(self):
        n = self.start
        while True:
            yield n
            n += self.step


def partition_index(i: int) -> Progression:
    """i-th block {m 2^i + 2^(i-1)} of the dyadic partition of the positive integers."""
    if i < 1:
        raise ValueError("progressions are indexed from 1")
    return Progression(2 ** (i - 1), 2 ** i)


def level_class(n: int) -> int:
    """The i with n in partition_index(i), i.e. 1 + the 2-adic valuation of n."""
    if n < 1:
        raise ValueError("levels start at 1")
    i = 1
    while n % 2 == 0:
        n //= 2
        i += 1
    return i


def dvector(f: Sequence[Elem]) -> list[Elem]:
    """d_0 = 0 and d_{j-1} - d_j = f_j, i.e. d_j = -(f_1 + ... + f_j)."""
    f = [as_elem(x) for x in f]
    if not f:
        return []
    out = [zero(len(f[0]))]
    for fj in f:
        out.append(vsub(out[-1], fj))
    return out


# ------------------------------------------------------------------- schema

@dataclass(frozen=True)
class Theorem01Meta:
    k: int
    R: tuple            # R_1..R_N
    a: tuple            # a_n
    gens: tuple         # C_{n,1} in listed order
    dvec: tuple         # (d_{n,0}, ..., d_{n,k})
    f: tuple            # element of G^k assigned to level n
    cls: tuple          # i with n in partition_index(i)
    scale: tuple

    variant = "thm01"

    def c0_list(self, n: int) -> list[Elem]:
        a, dv = self.a[n - 1], self.dvec[n - 1]
        return [vadd(vscale(j, a), dv[j]) for j in range(self.k + 1)]

    def c0(self, n: int) -> FinSet:
        return FinSet(self.c0_list(n))

    def c1(self, n: int) -> FinSet:
        return FinSet(self.gens[n - 1])

    def top(self, n: int) -> Elem:
        return self.c0_list(n)[self.k]

    def w(self, n: int) -> Elem:
        return self.gens[n - 1][0]

    def levels_for(self, f: Sequence[Elem]) -> list[int]:
        f = tuple(as_elem(x) for x in f)
        return [n for n in range(1, len(self.R) + 1) if self.f[n - 1] == f]

    def to_json(self) -> dict:
        lst = lambda xs: [list(x) for x in xs]
        return {
            "k": self.k,
            "R": list(self.R),
            "a": lst(self.a),
            "gens": [lst(g) for g in self.gens],
            "dvec": [lst(dv) for dv in self.dvec],
            "f": [lst(fv) for fv in self.f],
            "cls": list(self.cls),
            "scale": list(self.scale),
        }

    @classmethod
    def from_json(cls, obj: dict):
        tup = lambda xs: tuple(tuple(x) for x in xs)
        return cls(
            k=obj["k"],
            R=tuple(obj["R"]),
            a=tup(obj["a"]),
            gens=tuple(tup(g) for g in obj["gens"]),
            dvec=tuple(tup(dv) for dv in obj["dvec"]),
            f=tuple(tup(fv) for fv in obj["f"]),
            cls=tuple(obj["cls"]),
            scale=tuple(obj["scale"]),
        )


@dataclass(frozen=True)
class Theorem02Meta(Theorem01Meta):
    """Same bookkeeping; C_{n,1} consists of independent Sidon-spaced generators."""

    variant = "thm02"


@dataclass(frozen=True)
class Theorem03Meta:
    """C_n = {e_i, -e_i, l_i, -l_i - d_n}; e_i ~ -e_i and l_i ~ -l_i - d_n are antipodal."""

    N: tuple
    dn: tuple
    e: tuple
    l: tuple
    scale: tuple

    variant = "thm03"

    def antipode(self, n: int) -> dict:
        d = self.dn[n - 1]
        out = {}
        for e in self.e[n - 1]:
            out[e] = vneg(e)
            out[vneg(e)] = e
        for l in self.l[n - 1]:
            m = vsub(vneg(l), d)
            out[l] = m
            out[m] = l
        return out

    def to_json(self) -> dict:
        lst = lambda xs: [list(x) for x in xs]
        return {
            "N": list(self.N),
            "dn": lst(self.dn),
            "e": [lst(x) for x in self.e],
            "l": [lst(x) for x in self.l],
            "scale": list(self.scale),
        }

    @classmethod
    def from_json(cls, obj: dict):
        tup = lambda xs: tuple(tuple(x) for x in xs)
        return cls(
            N=tuple(obj["N"]),
            dn=tup(obj["dn"]),
            e=tuple(tup(x) for x in obj["e"]),
            l=tuple(tup(x) for x in obj["l"]),
            scale=tuple(obj["scale"]),
        )


_META = {"thm01": Theorem01Meta, "thm02": Theorem02Meta, "thm03": Theorem03Meta}


@dataclass(frozen=True, eq=False)
class CFSchema:
    """Finite-depth (C,F) data: F_0..F_N and C_1..C_N.

    ``C[n-1]`` holds C_n so that level numbering matches the construction.
    """

    d: int
    F: tuple
    C: tuple
    variant: str = "custom"
    meta: Any = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.F) != len(self.C) + 1:
            raise ValueError("need exactly one more F than C")

    @property
    def depth(self) -> int:
        return len(self.C)

    def f(self, n: int) -> GSet:
        if not 0 <= n <= self.depth:
            raise LevelError(f"level {n} outside 0..{self.depth}")
        return self.F[n]

    def c(self, n: int) -> FinSet:
        if not 1 <= n <= self.depth:
            raise LevelError(f"no C_{n} in a schema of depth {self.depth}")
        return self.C[n - 1]

    def mass(self, n: int) -> int:
        """#C_1 * ... * #C_n."""
        key = ("mass", n)
        if key not in self._cache:
            self.f(n)
            out = 1
            for j in range(1, n + 1):
                out *= len(self.C[j - 1])
            self._cache[key] = out
        return self._cache[key]

    def radius(self, n: int) -> int:
        lo, hi = self.f(n).bbox()
        return max(norm_inf(lo), norm_inf(hi))

    def descend(self, f: Elem, level: int, to: int) -> Elem | None:
        """Level-``to`` base of the point whose level-``level`` base is f.

        Returns None when f is not in F_to + C_{to+1} + ... + C_level, i.e. the
        point does not lie in X_to.
        """
        if to > level:
            raise LevelError("cannot descend upwards")
        memo = self._cache.setdefault("descend", {})
        while level > to:
            key = (f, level)
            if key in memo:
                f = memo[key]
            else:
                Fp = self.F[level - 1]
                lo, hi = Fp.bbox()
                found = None
                for c in self.C[level - 1].with_first_coordinate_between(f[0] - hi[0], f[0] - lo[0]):
                    g = vsub(f, c)
                    if g in Fp:
                        found = g
                        break
                memo[key] = found
                f = found
            if f is None:
                return None
            level -= 1
        return f

    def sum_block(self, lo: int, hi: int) -> FinSet:
        """C_{lo} + ... + C_{hi} (the set {0} when lo > hi)."""
        key = ("block", lo, hi)
        if key not in self._cache:
            out = FinSet([zero(self.d)])
            for j in range(lo, hi + 1):
                out = sumset(out, self.c(j))
            self._cache[key] = out
        return self._cache[key]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "depth": self.depth,
            "F": [F.to_json() for F in self.F],
            "C": [C.to_json() for C in self.C],
            "variant": self.variant,
            "meta": self.meta.to_json() if self.meta is not None else {},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict) -> "CFSchema":
        d = obj["d"]
        F = tuple(set_from_json(x, d) for x in obj["F"])
        C = tuple(FinSet((tuple(e) for e in x), dim=d) for x in obj["C"])
        variant = obj.get("variant", "custom")
        meta = _META[variant].from_json(obj["meta"]) if variant in _META else None
        return cls(d=d, F=F, C=C, variant=variant, meta=meta)

    @classmethod
    def loads(cls, text: str) -> "CFSchema":
        return cls.from_json(json.loads(text))


def toy_schema() -> CFSchema:
    """d=1: F_0={0}, C_1={0,10}, F_1={0..19}, C_2={0,100,200}, F_2={0..299}."""
    return CFSchema(
        d=1,
        F=(FinSet([0]), FinSet.range1d(0, 19), FinSet.range1d(0, 299)),
        C=(FinSet([0, 10]), FinSet([0, 100, 200])),
    )


def measure_growth(schema: CFSchema, n: int) -> Fraction:
    """#F_n / (#C_1 ... #C_n)."""
    return Fraction(schema.f(n).card, schema.mass(n))


# ---------------------------------------------------------------- validator

@dataclass
class Check:
    level: int | None
    condition: str
    passed: bool
    detail: str = ""
    informational: bool = False

    def to_json(self):
        return {"level": self.level, "condition": self.condition, "passed": self.passed,
                "detail": self.detail, "informational": self.informational}


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)
    growth: list = field(default_factory=list)

    def add(self, level, condition, passed, detail="", informational=False):
        self.checks.append(Check(level, condition, bool(passed), detail, informational))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed and not c.informational]

    def result(self, condition: str, level: int | None = None) -> bool:
        hits = [c.passed for c in self.checks
                if c.condition == condition and (level is None or c.level == level)]
        if not hits:
            raise KeyError(condition)
        return all(hits)

    @property
    def all_pass(self) -> bool:
        return not self.failures() and all(v is not None for v in self.thresholds.values())

    def to_json(self) -> dict:
        return {
            "all_pass": self.all_pass,
            "checks": [c.to_json() for c in self.checks],
            "thresholds": [{"g": list(g), "n_g": n} for g, n in sorted(self.thresholds.items())],
            "growth": [str(q) for q in self.growth],
        }


def _sum_contained(parts: Sequence[GSet], target: GSet) -> bool:
    """Whether parts[0] + parts[1] + ... lies inside target."""
    if isinstance(target, Cube):
        lo, hi = parts[0].bbox()
        for P in parts[1:]:
            plo, phi = P.bbox()
            lo, hi = vadd(lo, plo), vadd(hi, phi)
        return lo in target and hi in target
    S = parts[0]
    for P in parts[1:]:
        S = sumset(S, P)
    return subset(S, target)


def c1_triple_difference(C1: GSet, C: GSet) -> GSet:
    """C1 - C - C + C."""
    nC = negate(C)
    return sumset(sumset(sumset(C1, nC), nC), C)


def quadruple_violations(C: Iterable[Elem], Q: GSet, partner: dict, limit: int = 1) -> list:
    """Pairs of pair-sums s=c1+c4, s'=c2+c3 breaking the antipodal rule.

    (c1-c2)-(c3-c4) = s - s'.  A violation is 0 != s - s' in Q where one of
    the representing pairs is not antipodal.  Sums are bucketed on the first
    coordinate so only nearby sums are compared; the result equals the
    brute-force scan over C^4.
    """
    C = list(C)
    sums = defaultdict(list)
    for c1 in C:
        for c4 in C:
            sums[vadd(c1, c4)].append((c1, c4))
    bad = {s for s, pairs in sums.items() if any(partner.get(a) != b for a, b in pairs)}
    lo, hi = Q.bbox()
    rho = max(abs(lo[0]), abs(hi[0]))
    width = rho + 1
    buckets = defaultdict(list)
    for s in sums:
        buckets[s[0] // width].append(s)
    out = []
    for s in bad:
        b = s[0] // width
        for bb in (b - 1, b, b + 1):
            for s2 in buckets.get(bb, ()):
                if s2 != s and (vsub(s, s2) in Q or vsub(s2, s) in Q):
                    out.append((s, s2))
                    if len(out) >= limit:
                        return out
    return out


def antipodal_collisions(C: Iterable[Elem], partner: dict) -> list:
    """Colliding differences c-c' = c''-c''' that are not antipodal twins."""
    reps = defaultdict(list)
    for c in C:
        for c2 in C:
            if c != c2:
                reps[vsub(c, c2)].append((c, c2))
    out = []
    for diff, pairs in reps.items():
        if len(pairs) == 1:
            continue
        if len(pairs) == 2:
            (c1, c2), (c3, c4) = pairs
            if partner.get(c1) == c4 and partner.get(c2) == c3:
                continue
        out.append((diff, pairs))
    return out


def validate(schema: CFSchema, gball: GSet | Iterable = ()) -> ValidationReport:
    """Check the construction conditions and the variant-specific ones level by level."""
    rep = ValidationReport()
    N, d = schema.depth, schema.d
    z = zero(d)

    rep.add(0, "nontrivial", schema.f(0) == FinSet([z]), "F_0 = {0}")
    for n in range(1, N + 1):
        rep.add(n, "nontrivial", len(schema.c(n)) > 1, f"#C_{n} = {len(schema.c(n))}")
    for n in range(N):
        rep.add(n + 1, "nested", _sum_contained([schema.f(n), schema.c(n + 1)], schema.f(n + 1)))
        rep.add(n + 1, "disjoint-copies", translates_disjoint(schema.f(n), schema.c(n + 1)))

    rep.growth = [measure_growth(schema, n) for n in range(N + 1)]
    mono = all(a <= b for a, b in zip(rep.growth, rep.growth[1:]))
    rep.add(None, "growth", mono, "growth " + ", ".join(str(q) for q in rep.growth))

    for g in gball:
        g = as_elem(g)
        ok = [_sum_contained([FinSet([g]), schema.f(n), schema.c(n + 1)], schema.f(n + 1))
              for n in range(N)]
        th = None
        for n in range(N - 1, -1, -1):
            if not ok[n]:
                break
            th = n
        rep.thresholds[g] = th
    if rep.thresholds:
        missing = [g for g, v in rep.thresholds.items() if v is None]
        rep.add(None, "absorbing", not missing, f"{len(missing)} probe elements never contained")

    meta = schema.meta
    if schema.variant in ("thm01", "thm02", "thm03"):
        for n in range(1, N + 1):
            F = schema.f(n - 1)
            rep.add(n, "F-double", _sum_contained([F, F, schema.c(n)], schema.f(n)),
                    "F_{n-1}+F_{n-1}+C_n in F_n")
    if schema.variant in ("thm01", "thm02"):
        _validate_thm012(schema, meta, rep)
    elif schema.variant == "thm03":
        _validate_thm03(schema, meta, rep)
    return rep


def _validate_thm012(schema, meta, rep):
    k = meta.k
    for n in range(1, schema.depth + 1):
        C, C0, C1 = schema.c(n), meta.c0(n), meta.c1(n)
        R = meta.R[n - 1]
        shape = (len(C0) == k + 1 and len(C1) == R - k - 1 and len(C) == R
                 and set(C) == set(C0) | set(C1) and not set(C0) & set(C1))
        dv = meta.dvec[n - 1]
        rec = dv[0] == zero(schema.d) and all(
            vsub(dv[j - 1], dv[j]) == meta.f[n - 1][j - 1] for j in range(1, k + 1))
        rec = rec and meta.cls[n - 1] == level_class(n)
        rep.add(n, "shape", shape and rec, f"#C_n = {len(C)}, R_n = {R}")
        if schema.variant == "thm01":
            w = meta.w(n)
            rep.add(n, "arith", sorted(meta.gens[n - 1]) == sorted(vscale(j, w) for j in range(1, R - k)),
                    "C_{n,1} = {w, 2w, ...}")
        Q = iterated_difference(schema.f(n - 1), 4)
        rep.add(n, "separation", separation_holds(c1_triple_difference(C1, C), Q))
        if schema.variant == "thm02":
            rep.add(n, "distinct-differences", difference_injective(C1, C))


def _validate_thm03(schema, meta, rep):
    total = sum(Fraction(1, x) for x in meta.N[: schema.depth])
    rep.add(None, "N-sum", total < Fraction(1, 4), f"sum 1/N_n = {total}")
    for n in range(1, schema.depth + 1):
        C, Nn, dn = schema.c(n), meta.N[n - 1], meta.dn[n - 1]
        partner = meta.antipode(n)
        listed = set(meta.e[n - 1]) | {vneg(e) for e in meta.e[n - 1]} | set(meta.l[n - 1]) | {
            vsub(vneg(l), dn) for l in meta.l[n - 1]}
        rep.add(n, "shape", len(C) == 4 * Nn and set(C) == listed and len(partner) == 4 * Nn,
                f"#C_n = {len(C)}, N_n = {Nn}")
        FF = difference(schema.f(n - 1), schema.f(n - 1))
        rep.add(n, "d_n", dn in FF, f"d_n = {dn}")
        Q = iterated_difference(schema.f(n - 1), 4)
        rep.add(n, "copy-separation", separation_holds(difference(C, C), Q))
        rep.add(n, "antipodal-quadruples", not quadruple_violations(C, Q, partner))
        rep.add(n, "injective-differences", difference_injective(C, C),
                "strict one-to-one; fails for any C_n containing two pairs {e,-e}",
                informational=True)
        rep.add(n, "injective-up-to-twins", not antipodal_collisions(C, partner),
                "one-to-one up to antipodal twins")


# ----------------------------------------------------------------- builders

def _pow2_above(x: int) -> int:
    s = 1
    while s <= x:
        s *= 2
    return s


def _spiral_prefix(D: int, count: int) -> list:
    return list(islice(spiral(D), count))


def _check_params(**kw):
    for name, v in kw.items():
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")


def build_theorem01(k: int, d: int, depth: int, *, mixing: bool = False) -> CFSchema:
    """Rigid rank-one schema of ergodic index k (mixing=True gives the zero-type variant).

    Elements sit on the first axis at scale s: a_n = s e_1 and the C_{n,1}
    generators at multiples of (2k+1)s; s doubles until every separation
    predicate of the level verifies.
    """
    _check_params(k=k, d=d, depth=depth)
    K = 2 * k + 1
    fs = _spiral_prefix(d * k, level_class(2 ** (depth.bit_length())) + 1)
    F = [Cube(zero(d), 1)]
    C_all, R_all, A, G, DV, FV, CL, S = [], [], [], [], [], [], [], []
    for n in range(1, depth + 1):
        i = level_class(n)
        fvec = fs[i - 1]
        f = tuple(tuple(fvec[j * d:(j + 1) * d]) for j in range(k))
        dv = dvector(f)
        R = r_schedule(k, n)
        r = max(norm_inf(x) for x in F[-1].bbox())
        Q = centered_cube(4 * r, d)
        s = _pow2_above(4 * r + 3 * max(norm_inf(x) for x in dv))
        while True:
            a = unit(d, 0, s)
            c0 = [vadd(vscale(j, a), dv[j]) for j in range(k + 1)]
            if mixing:
                gens = [unit(d, 0, K * 5 ** j * s) for j in range(1, R - k)]
            else:
                gens = [unit(d, 0, j * K * s) for j in range(1, R - k)]
            C = FinSet(c0 + gens, dim=d)
            C1 = FinSet(gens, dim=d)
            ok = (len(C) == R and translates_disjoint(F[-1], C)
                  and separation_holds(c1_triple_difference(C1, C), Q)
                  and (not mixing or difference_injective(C1, C)))
            if ok:
                break
            s *= 2
        F.append(centered_cube(2 * r + max(norm_inf(c) for c in C), d))
        C_all.append(C)
        R_all.append(R)
        A.append(a)
        G.append(tuple(gens))
        DV.append(tuple(dv))
        FV.append(f)
        CL.append(i)
        S.append(s)
    cls = Theorem02Meta if mixing else Theorem01Meta
    meta = cls(k=k, R=tuple(R_all), a=tuple(A), gens=tuple(G), dvec=tuple(DV),
               f=tuple(FV), cls=tuple(CL), scale=tuple(S))
    return CFSchema(d=d, F=tuple(F), C=tuple(C_all), variant=meta.variant, meta=meta)


def build_theorem02(k: int, d: int, depth: int) -> CFSchema:
    """Zero-type schema of ergodic index k whose C_{n,1} - C_n differences are distinct."""
    return build_theorem01(k, d, depth, mixing=True)


def d_sequence_candidates(d: int) -> list[Elem]:
    """The cube {-2..2}^d in spiral order; d_n runs round-robin through it."""
    return _spiral_prefix(d, 5 ** d)


def build_theorem03(d: int, depth: int, N: Sequence[int]) -> CFSchema:
    """Schema for an action of ergodic index 2 with T x T^-1 non-ergodic."""
    _check_params(d=d, depth=depth)
    N = tuple(int(x) for x in N)
    if len(N) < depth:
        raise ValueError(f"need {depth} values of N_n, got {len(N)}")
    if any(x < 1 for x in N):
        raise ValueError("N_n must be positive")
    total = sum(Fraction(1, x) for x in N)
    if total >= Fraction(1, 4):
        raise ValueError(f"sum 1/N_n = {total} is not below 1/4")
    E = d_sequence_candidates(d)
    F = [Cube(zero(d), 1)]
    C_all, DN, EE, LL, S = [], [], [], [], []
    for n in range(1, depth + 1):
        Nn = N[n - 1]
        r = max(norm_inf(x) for x in F[-1].bbox())
        cand = E[(n - 1) % len(E)]
        dn = cand if norm_inf(cand) <= 2 * r else zero(d)
        Q = centered_cube(4 * r, d)
        s = _pow2_above(4 * r + 2 * norm_inf(dn))
        while True:
            es = [unit(d, 0, s * 5 ** (2 * i)) for i in range(Nn)]
            ls = [unit(d, 0, s * 5 ** (2 * i + 1)) for i in range(Nn)]
            elems = es + [vneg(e) for e in es] + ls + [vsub(vneg(l), dn) for l in ls]
            C = FinSet(elems, dim=d)
            meta_n = Theorem03Meta(N=(Nn,), dn=(dn,), e=(tuple(es),), l=(tuple(ls),), scale=(s,))
            partner = meta_n.antipode(1)
            ok = (len(C) == 4 * Nn and translates_disjoint(F[-1], C)
                  and separation_holds(difference(C, C), Q)
                  and not quadruple_violations(C, Q, partner)
                  and not antipodal_collisions(C, partner))
            if ok:
                break
            s *= 2
        F.append(centered_cube(2 * r + max(norm_inf(c) for c in C), d))
        C_all.append(C)
        DN.append(dn)
        EE.append(tuple(es))
        LL.append(tuple(ls))
        S.append(s)
    meta = Theorem03Meta(N=N[:depth], dn=tuple(DN), e=tuple(EE), l=tuple(LL), scale=tuple(S))
    return CFSchema(d=d, F=tuple(F), C=tuple(C_all), variant="thm03", meta=meta)
