"""
Maximal violation on a singlet
==============================

"""

# The two qubits of a singlet are measured by commuting local algebras.
# The see-saw optimizer alternates between the two sides and returns the
# largest correlation value it can find.

import math

import numpy as np

from bellcorr import (brute_force_beta, horodecki_beta, maximize_bell, qubit_pair, singlet,
                      structural_diagnostics, werner)

A, B = qubit_pair()
rep = maximize_bell(singlet(), A, B)
print("beta(singlet)       =", rep.beta)
print("sqrt(2)             =", math.sqrt(2))
print("restarts, converged =", rep.restarts_used, rep.converged)

# Two independent checks: a grid over the Bloch sphere and the closed form
# for two-qubit states.

print("grid oracle         =", brute_force_beta(singlet(), A, B, 128))
print("closed form         =", horodecki_beta(singlet()))

# At the optimum, the observables on each side anticommute and square to
# the identity. The residuals measure how far they are from that.

print("max residual        =", structural_diagnostics(singlet(), rep).max_residual())

# Mixing in white noise lowers the value linearly until it hits the
# classical value 1.

for w in np.linspace(0, 1, 6):
    print(f"werner w={w:.1f}  beta={maximize_bell(werner(w), A, B).beta:.6f}")
