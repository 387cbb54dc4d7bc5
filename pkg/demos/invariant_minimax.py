"""
Pair invariant as a minimax
===========================

"""

# The worst-case value over states can be approached from below (a
# conditional-gradient search over mixtures of Bell operators) and from
# above (descent over states). For pairs built from tensor factors the two
# sides meet at 1.

from bellcorr import diagonal_pair, direct_sum_pair, minimax_interval, qubit_pair, qutrit_pair

pairs = {
    "qubit": qubit_pair(),
    "qutrit": qutrit_pair(),
    "diagonal": diagonal_pair(),
    "qubit+qubit": direct_sum_pair([qubit_pair(), qubit_pair()]),
}

for name, (A, B) in pairs.items():
    star, inf = minimax_interval(A, B)
    print(f"{name:12s} lower={star.value:.9f}  upper={inf.value:.9f}  gap={inf.value - star.value:.2e}")

# Starting the lower search far away, at the vertex that is optimal for the
# singlet, shows how slowly the fixed step size recovers.

from bellcorr import InvariantOptions, beta_star, maximize_bell, singlet

A, B = qubit_pair()
far = maximize_bell(singlet(), A, B).candidate
for n in (10, 100, 500):
    rep = beta_star(A, B, InvariantOptions(start=far, max_iter=n))
    print(f"far start, {n:4d} iterations: {rep.value:.4f}")
