"""
Correlation value in an Ising ground state
==========================================

"""

# Two blocks of a transverse-field Ising chain are moved apart and the
# correlation value of the ground state is optimized at each separation.

from bellcorr.lattice import build_chain, fit_decay, ground_vector, separation_curve, zz_correlations
from bellcorr.errors import FitError

chain = build_chain(10, 1.0, 2.0)
curve = separation_curve(chain, 2, range(5))
for p in curve:
    print(f"a={p.a}  beta-1={p.beta - 1:.3e}  converged={p.converged}")

# In the disordered phase the value is already classical once the blocks
# stop touching, so there is nothing left to fit.

try:
    fit = fit_decay(curve)
    print("fitted rate:", fit.m_hat)
except FitError as exc:
    print("fit failed:", exc)

# The two-point function still decays exponentially and gives the rate.

_, _, psi = ground_vector(chain)
corr = zz_correlations(psi, 10, 0)
fit = fit_decay([(r, 1 + c) for r, c in corr])
print(f"zz decay rate {fit.m_hat:.4f}, amplitude {fit.amplitude:.4f}")
