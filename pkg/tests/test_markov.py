from fractions import Fraction
from math import comb

import pytest

from cfactions.markov import (
    KernelError, MarkovSpec, drift, dyadic_trend, index_partial_sums, inverse_product_indicator,
    kernel, n_step_return, reachability_check, return_sequence, reversed_chain, srw1d, srw2d,
    tensor_chain, tensor_return_identity, tensor_return_sequence,
)


def test_srw_returns():
    P = srw1d()
    assert n_step_return(P, (0,), 2) == Fraction(1, 2)
    assert n_step_return(P, (0,), 1) == 0
    assert n_step_return(P, (0,), 4) == Fraction(3, 8)
    for n, r in enumerate(return_sequence(P, (0,), 24)):
        assert r == (Fraction(comb(n, n // 2), 2 ** n) if n % 2 == 0 else 0)


def test_srw2d_returns():
    # P^{(2n)} = (C(2n,n)/4^n)^2 for the planar walk
    seq = return_sequence(srw2d(), (0, 0), 10)
    for n in range(0, 11, 2):
        assert seq[n] == Fraction(comb(n, n // 2), 2 ** n) ** 2


def test_reversal():
    P = srw1d()
    Q = reversed_chain(P)
    assert Q.row((3,)) == [((4,), Fraction(1, 2)), ((2,), Fraction(1, 2))] or \
        sorted(Q.row((3,))) == sorted(P.row((3,)))
    D = drift(Fraction(2, 3))
    R = reversed_chain(D)
    for a in range(-3, 4):
        assert R.prob((a,), (a + 1,)) == Fraction(2, 3)
        assert sum(p for _, p in R.row((a,))) == 1
        R.check_invariance((a,))
    assert return_sequence(R, (0,), 10) == return_sequence(D, (0,), 10)


def test_tensor_identity_examples():
    P = srw1d()
    assert tensor_return_identity(P, 2, 1, (0,), 2) == (Fraction(1, 4), Fraction(1, 4))
    assert tensor_return_identity(P, 3, 0, (0,), 4) == (Fraction(27, 512), Fraction(27, 512))
    D = drift(Fraction(3, 5))
    lhs, rhs = tensor_return_identity(D, 1, 1, (0,), 6)
    assert lhs == rhs == n_step_return(D, (0,), 6)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_tensor_identity_sweep(k):
    for m in range(k + 1):
        lhs, rhs = tensor_return_sequence(srw1d(), k, m, (0,), 12 if k < 3 else 8)
        assert lhs == rhs


def test_tensor_identity_drift():
    lhs, rhs = tensor_return_sequence(drift(Fraction(2, 3)), 2, 1, (0,), 10)
    assert lhs == rhs


def test_partial_sums():
    P = srw1d()
    assert index_partial_sums(P, (0,), 1, 2) == [0, Fraction(1, 2)]
    S2 = index_partial_sums(P, (0,), 2, 64)
    S3 = index_partial_sums(P, (0,), 3, 128)
    assert S2[63] - S2[31] > Fraction(3, 1000)
    assert S3[63] - S3[31] < Fraction(3, 100)
    assert S3[127] - S3[63] < S3[63] - S3[31]
    with pytest.raises(ValueError):
        index_partial_sums(P, (0,), 1, 0)


def test_reachability():
    P = srw1d()
    assert reachability_check(P, (0,), (3,), 3)
    assert not reachability_check(P, (0,), (3,), 2)
    T = tensor_chain([P, P])
    assert not reachability_check(T, ((0,), (0,)), ((0,), (1,)), 12)


def test_indicators():
    assert dyadic_trend(srw1d(), (0,), 1, 64).diverging
    assert not dyadic_trend(srw1d(), (0,), 3, 64).diverging
    assert inverse_product_indicator(srw1d(), (0,), 64) == "product with inverse: conservative indicator"
    assert inverse_product_indicator(drift(Fraction(2, 3)), (0,), 64) == "transient indicator"
    with pytest.raises(ValueError):
        dyadic_trend(srw1d(), (0,), 1, 10)


def test_non_conservative_product_label():
    # planar walk: k=1 sums grow like log N while k=2 sums converge
    assert inverse_product_indicator(srw2d(), (0, 0), 32) == \
        "product with inverse: non-conservative indicator"


def test_registry_and_errors():
    assert kernel("srw1d").name == "srw1d"
    assert kernel("drift(2/3)").prob((0,), (1,)) == Fraction(2, 3)
    assert kernel("drift(0.6)").prob((0,), (1,)) == Fraction(3, 5)
    with pytest.raises(KernelError):
        kernel("nope")
    with pytest.raises(KernelError):
        drift(1)
    leaky = MarkovSpec(lambda a: [((a[0] + 1,), Fraction(1, 3))], lambda a: Fraction(1))
    with pytest.raises(KernelError):
        leaky.row((0,))
    skewed = MarkovSpec(lambda a: [((a[0] + 1,), Fraction(1))], lambda a: Fraction(2) ** a[0],
                        lambda b: [(b[0] - 1,)])
    with pytest.raises(KernelError):
        n_step_return(skewed, (0,), 3)
