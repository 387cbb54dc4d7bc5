"""
Clustering and the correlation value
====================================

"""

# Weak connected correlations force the correlation value toward 1. The
# bound depends only on a clustering coefficient in [0, 1].

import numpy as np

from bellcorr import (bound_table, clustering_bound, clustering_coefficient, qubit_pair,
                      random_state, verify_cluster_bound, werner)

for g in np.linspace(0, 1, 6):
    print(f"gamma={g:.1f}  bound={clustering_bound(g):.6f}")

# For Werner states the coefficient equals the noise parameter, and the
# bound sits above the optimized value.

A, B = qubit_pair()
for w in (0.2, 0.5, 0.8, 1.0):
    chk = verify_cluster_bound(werner(w), A, B, w)
    print(f"w={w:.1f}  beta={chk.beta:.6f}  bound={chk.bound:.6f}  holds={chk.holds}")

# The coefficient can also be estimated by sampling. The estimate is a lower
# estimate of the supremum.

phi = random_state(4, 11)
print("estimated gamma:", clustering_coefficient(phi, A, B).gamma_hat)

# With exponential clustering at rate m, two bounds apply at distance d.
# The first is loose at short range, the second saturates at a constant.

print(" d      exponential  short-distance")
for d, e, s in bound_table(1.0, [0, 0.25, 0.5, 1, 2, 4, 8]):
    print(f"{d:5.2f}  {e:11.6f}  {s:14.9f}")
