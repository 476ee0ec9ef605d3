"""Return probabilities of random walks and the products they generate.

For the walk on Z the k-fold product returns with probability
(P^(n)_{0,0})^k, so the sums behave like sum n^(-k/2): divergent for k <= 2
and convergent for k = 3.  These are exact finite partial sums, read as
indicators.
"""
from fractions import Fraction

from cfactions.markov import (
    drift, dyadic_trend, index_partial_sums, inverse_product_indicator, n_step_return,
    reversed_chain, srw1d, srw2d, tensor_return_identity,
)

P = srw1d()
print("P^(n)_{0,0} for n = 0..8:", [str(n_step_return(P, (0,), n)) for n in range(9)])

lhs, rhs = tensor_return_identity(P, 3, 1, (0,), 8)
print(f"P x Q x Q returns at n=8: {lhs}; (P^(8))^3 = {rhs}")

D = drift(Fraction(2, 3))
R = reversed_chain(D)
print("drift 2/3 reversed: step right with probability", R.prob((0,), (1,)))

print("\n k  S_32            S_64            dyadic ratio")
for k in (1, 2, 3):
    S = index_partial_sums(P, (0,), k, 64)
    t = dyadic_trend(P, (0,), k, 64)
    print(f" {k}  {float(S[31]):<15.6f} {float(S[63]):<15.6f} {float(t.ratio):.3f}"
          f"  {'diverging' if t.diverging else 'settling'}")

for name, K, a, N in [("walk on Z", P, (0,), 64), ("walk on Z^2", srw2d(), (0, 0), 32),
                      ("drift 2/3", D, (0,), 64)]:
    print(f"{name}: {inverse_product_indicator(K, a, N)}")
