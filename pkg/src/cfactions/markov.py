"""Exact return probabilities for sparse Markov kernels on integer-vector states.

A kernel is a pure function ``state -> [(state, probability), ...]`` with
Fraction probabilities, plus an invariant vector λ.  Nothing is ever
materialized beyond the states a computation actually reaches.
"""
from __future__ import annotations

import re
from collections import defaultdict
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

State = tuple


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class MarkovSpec:
    """Transition kernel P with invariant vector λ (λP = λ).

    ``predecessors(b)`` lists every a with P_{a,b} > 0; it is needed for the
    reversed chain and for checking invariance.
    """

    step: Callable[[State], Sequence]
    invariant: Callable[[State], Fraction]
    predecessors: Callable[[State], Sequence] | None = None
    name: str = "kernel"

    def row(self, a: State) -> list:
        out = [(tuple(b), Fraction(p)) for b, p in self.step(a)]
        if sum(p for _, p in out) != 1 or any(p < 0 for _, p in out):
            raise KernelError(f"{self.name}: row at {a} is not stochastic")
        return out

    def prob(self, a: State, b: State) -> Fraction:
        return sum((p for c, p in self.row(a) if c == b), Fraction(0))

    def check_invariance(self, b: State) -> None:
        if self.predecessors is None:
            return
        lam = self.invariant(b)
        if lam <= 0:
            raise KernelError(f"{self.name}: λ vanishes at {b}")
        total = sum((self.invariant(a) * self.prob(a, b) for a in self.predecessors(b)), Fraction(0))
        if total != lam:
            raise KernelError(f"{self.name}: λP != λ at {b}")


# --------------------------------------------------------------- registry

def _walk(offsets: Sequence[State], probs: Sequence[Fraction], lam, name: str) -> MarkovSpec:
    offsets = [tuple(o) for o in offsets]

    def step(a):
        return [(tuple(x + y for x, y in zip(a, o)), p) for o, p in zip(offsets, probs)]

    def pred(b):
        return [tuple(x - y for x, y in zip(b, o)) for o in offsets]

    return MarkovSpec(step, lam, pred, name)


def srw1d() -> MarkovSpec:
    half = Fraction(1, 2)
    return _walk([(1,), (-1,)], [half, half], lambda a: Fraction(1), "srw1d")


def srw2d() -> MarkovSpec:
    q = Fraction(1, 4)
    return _walk([(1, 0), (-1, 0), (0, 1), (0, -1)], [q] * 4, lambda a: Fraction(1), "srw2d")


def drift(p) -> MarkovSpec:
    """Walk on Z stepping +1 with probability p; λ_a = (p/(1-p))^a."""
    p = Fraction(p)
    if not 0 < p < 1:
        raise KernelError("drift probability must lie strictly between 0 and 1")
    r = p / (1 - p)
    return _walk([(1,), (-1,)], [p, 1 - p], lambda a: r ** a[0], f"drift({p})")


def kernel(name: str) -> MarkovSpec:
    """Look up ``srw1d``, ``srw2d`` or ``drift(p)`` (p like 2/3 or 0.6)."""
    name = name.strip()
    if name == "srw1d":
        return srw1d()
    if name == "srw2d":
        return srw2d()
    m = re.fullmatch(r"drift\(\s*([0-9./]+)\s*\)", name)
    if m:
        return drift(Fraction(m.group(1)))
    raise KernelError(f"unknown kernel {name!r}")


# ------------------------------------------------------------ convolution

def evolve(P: MarkovSpec, start: State, n: int, check: bool = True) -> list:
    """Distributions after 0..n steps from ``start`` (exact, sparse)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    dist = {tuple(start): Fraction(1)}
    out = [dist]
    checked = set()
    for _ in range(n):
        nxt = defaultdict(Fraction)
        for a, pa in dist.items():
            if check and a not in checked:
                P.check_invariance(a)
                checked.add(a)
            for b, p in P.row(a):
                nxt[b] += pa * p
        dist = {b: p for b, p in nxt.items() if p}
        out.append(dist)
    return out


def n_step_return(P: MarkovSpec, a: State, n: int) -> Fraction:
    """P^{(n)}_{a,a}."""
    return evolve(P, a, n)[n].get(tuple(a), Fraction(0))


def return_sequence(P: MarkovSpec, a: State, N: int) -> list:
    """[P^{(n)}_{a,a} for n = 0..N]."""
    a = tuple(a)
    return [d.get(a, Fraction(0)) for d in evolve(P, a, N)]


def reversed_chain(P: MarkovSpec) -> MarkovSpec:
    """Q_{a,b} = λ_b P_{b,a} / λ_a, which again leaves λ invariant."""
    if P.predecessors is None:
        raise KernelError("reversal needs the predecessor map")

    def step(a):
        la = P.invariant(a)
        if la <= 0:
            raise KernelError(f"λ vanishes at {a}")
        return [(b, P.invariant(b) * P.prob(b, a) / la) for b in dict.fromkeys(P.predecessors(a))]

    def pred(b):
        return [c for c, _ in P.row(b)]

    return MarkovSpec(step, P.invariant, pred, f"reversed({P.name})")


def tensor_chain(kernels: Sequence[MarkovSpec]) -> MarkovSpec:
    """(P_1 ⊗ ... ⊗ P_k)_{(a_i),(b_i)} = prod P_i(a_i, b_i) on tuple-of-states."""
    kernels = list(kernels)

    @lru_cache(maxsize=None)
    def step(a):
        rows = [K.row(x) for K, x in zip(kernels, a)]
        out = []
        for combo in product(*rows):
            p = Fraction(1)
            for _, q in combo:
                p *= q
            out.append((tuple(b for b, _ in combo), p))
        return out

    def lam(a):
        out = Fraction(1)
        for K, x in zip(kernels, a):
            out *= K.invariant(x)
        return out

    pred = None
    if all(K.predecessors for K in kernels):
        def pred(b):
            return list(product(*[K.predecessors(x) for K, x in zip(kernels, b)]))

    return MarkovSpec(step, lam, pred, "⊗".join(K.name for K in kernels))


def tensor_return_identity(P: MarkovSpec, k: int, m: int, a: State, n: int) -> tuple:
    """(return probability of P^{⊗m} ⊗ Q^{⊗(k-m)} at (a,...,a), (P^{(n)}_{a,a})^k).

    The left side runs the joint chain on product states; the right side
    powers the one-dimensional return probability.
    """
    lhs, rhs = tensor_return_sequence(P, k, m, a, n)
    return lhs[n], rhs[n]


def tensor_return_sequence(P: MarkovSpec, k: int, m: int, a: State, N: int) -> tuple:
    """Both sides of the tensor identity for n = 0..N in one pass each."""
    if not 0 <= m <= k:
        raise ValueError("need 0 <= m <= k")
    a = tuple(a)
    Q = reversed_chain(P)
    joint = tensor_chain([P] * m + [Q] * (k - m))
    lhs = [d.get((a,) * k, Fraction(0)) for d in evolve(joint, (a,) * k, N)]
    rhs = [r ** k for r in return_sequence(P, a, N)]
    return lhs, rhs


def index_partial_sums(P: MarkovSpec, a: State, k: int, N: int) -> list:
    """[S_1, ..., S_N] with S_M = sum_{n=1}^{M} (P^{(n)}_{a,a})^k."""
    if N < 1:
        raise ValueError("N must be at least 1")
    ret = return_sequence(P, a, N)
    out, s = [], Fraction(0)
    for n in range(1, N + 1):
        s += ret[n] ** k
        out.append(s)
    return out


def reachability_check(P: MarkovSpec, a: State, b: State, n: int) -> bool:
    """True iff P^{(j)}_{a,b} > 0 for some j <= n."""
    a, b = tuple(a), tuple(b)
    frontier, seen = {a}, {a}
    for _ in range(n + 1):
        if b in frontier:
            return True
        nxt = set()
        for x in frontier:
            for y, p in P.row(x):
                if p:
                    nxt.add(y)
        frontier = nxt
        seen |= nxt
    return False


# --------------------------------------------------------------- indicators

@dataclass(frozen=True)
class Trend:
    k: int
    N: int
    sums: tuple          # S_{N/4}, S_{N/2}, S_N
    ratio: Fraction      # (S_N - S_{N/2}) / (S_{N/2} - S_{N/4})

    @property
    def diverging(self) -> bool:
        # constant or growing dyadic increments look like sum 1/n or slower decay
        return self.ratio >= Fraction(9, 10)


def dyadic_trend(P: MarkovSpec, a: State, k: int, N: int) -> Trend:
    """Compare the last two dyadic increments of the k-th power partial sums."""
    if N < 4 or N % 4:
        raise ValueError("N must be a positive multiple of 4")
    S = index_partial_sums(P, a, k, N)
    s1, s2, s3 = S[N // 4 - 1], S[N // 2 - 1], S[N - 1]
    inc1 = s2 - s1
    ratio = (s3 - s2) / inc1 if inc1 else Fraction(0)
    return Trend(k, N, (s1, s2, s3), ratio)


def inverse_product_indicator(P: MarkovSpec, a: State, N: int = 64) -> str:
    """Label the Σ-criterion outcome for the shift times its inverse.

    The return probabilities of P ⊗ Q equal (P^{(n)}_{a,a})^2, so the label
    follows the k = 2 trend; it is an indicator computed from finitely many
    exact terms, not a statement about the infinite system.
    """
    one, two = dyadic_trend(P, a, 1, N), dyadic_trend(P, a, 2, N)
    if not one.diverging:
        return "transient indicator"
    if two.diverging:
        return "product with inverse: conservative indicator"
    return "product with inverse: non-conservative indicator"
