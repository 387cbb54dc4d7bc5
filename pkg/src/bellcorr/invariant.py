"""State-independent Bell correlation invariant of a commuting pair.

Two numerical routes bracket the same number:

* ``beta_star`` maximizes the smallest eigenvalue of T over the convex hull
  of Bell operators with a conditional-gradient (Frank-Wolfe) scheme on a
  soft-min smoothing.  Every iterate is an explicit convex combination of
  Bell operators, so ``lambda_min`` of any iterate is a certified lower
  bound: phi(T) >= lambda_min(T) for every state phi.
* ``beta_inf`` minimizes the convex map phi -> beta(phi, A, B) over density
  matrices by projected subgradient descent.  It is an upper estimate.

The minimax theorem says the two coincide; ``minimax_gap`` reports the
numerical difference.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import Algebra
from .bell import BellCandidate, OptimizerOptions, _check_pair, bell_operator, maximize_bell
from .errors import InputError
from .states import State, maximally_mixed, random_state

SQRT2 = math.sqrt(2.0)


@dataclass
class InvariantOptions:
    bell: OptimizerOptions = field(default_factory=OptimizerOptions)
    temperature: float = 1e-3 * SQRT2
    max_iter: int = 2000
    gap_tol: float = 1e-4
    #: base step of the subgradient descent (divided by sqrt(k))
    step: float = 0.5
    inf_max_iter: int = 300
    #: "identity" starts the conditional gradient at T = 1; "random" at the
    #: Bell operator optimal for a seeded random state; a BellCandidate is
    #: used as given
    start: object = "identity"
    #: "mixed" starts the descent at 1/d; "random" at a seeded random
    #: state; a State is used as given
    inf_start: object = "mixed"
    seed: int = 0


@dataclass
class InvariantReport:
    value: float
    witness_operator: np.ndarray | None = None
    witness_state: State | None = None
    iterations: int = 0
    converged: bool = False
    gap: float = 0.0
    #: convex weights and Bell candidates whose combination is the witness
    weights: list = field(default_factory=list, repr=False)
    vertices: list = field(default_factory=list, repr=False)


def soft_min_state(T: np.ndarray, temperature: float) -> tuple[State, float]:
    """Gibbs state exp(-T/t)/Z, the gradient of the soft-min of the spectrum."""
    w, V = np.linalg.eigh(T)
    p = np.exp(-(w - w[0]) / temperature)
    p /= p.sum()
    rho = (V * p) @ V.conj().T
    return State(T.shape[0], rho), float(w[0])


def _start_vertex(state_dim, A, B, opts: InvariantOptions) -> BellCandidate:
    if isinstance(opts.start, BellCandidate):
        opts.start.check(A, B)
        return opts.start
    if opts.start == "identity":
        return BellCandidate.identity(state_dim)
    if opts.start == "random":
        phi = random_state(state_dim, opts.seed)
        return maximize_bell(phi, A, B, opts.bell).candidate
    raise InputError(f"unknown start {opts.start!r}")


def beta_star(A: Algebra, B: Algebra, opts: InvariantOptions | None = None) -> InvariantReport:
    """Certified lower bound sup_T lambda_min(T) over the hull of Bell operators."""
    opts = opts or InvariantOptions()
    _check_pair(maximally_mixed(A.dim), A, B)
    v0 = _start_vertex(A.dim, A, B, opts)
    vertices, weights = [v0], [1.0]
    T = bell_operator(v0)
    best = (-np.inf, None, None)
    gap = np.inf
    converged = False
    k = 0
    for k in range(opts.max_iter):
        phi, lam = soft_min_state(T, opts.temperature)
        if lam > best[0]:
            best = (lam, T.copy(), (list(weights), list(vertices)))
        rep = maximize_bell(phi, A, B, opts.bell)
        Tv = bell_operator(rep.candidate)
        gap = float(np.trace(phi.rho @ (Tv - T)).real)
        if gap < opts.gap_tol:
            converged = True
            break
        gamma = 2.0 / (k + 2)
        T = (1 - gamma) * T + gamma * Tv
        weights = [(1 - gamma) * w for w in weights] + [gamma]
        vertices.append(rep.candidate)
    else:
        lam = float(np.linalg.eigvalsh(T)[0])
        if lam > best[0]:
            best = (lam, T.copy(), (list(weights), list(vertices)))
    value, witness, (w_best, v_best) = best
    return InvariantReport(
        value=float(value),
        witness_operator=witness,
        iterations=k + 1,
        converged=converged,
        gap=max(gap, 0.0),
        weights=w_best,
        vertices=v_best,
    )


def project_to_states(M: np.ndarray) -> np.ndarray:
    """Frobenius-nearest density matrix to the Hermitian part of M."""
    H = (M + M.conj().T) / 2
    w, V = np.linalg.eigh(H)
    # Euclidean projection of the spectrum onto the probability simplex
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(u) + 1)
    r = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[r] / (r + 1)
    p = np.maximum(w - theta, 0.0)
    rho = (V * p) @ V.conj().T
    return (rho + rho.conj().T) / 2


def beta_inf(A: Algebra, B: Algebra, opts: InvariantOptions | None = None) -> InvariantReport:
    """Upper estimate of inf_phi beta(phi, A, B) by projected subgradient descent.

    The Bell operator of the optimizer at phi is a subgradient of the convex
    map phi -> beta(phi).  Reaching 1, the universal lower bound, ends the
    search with a certificate.
    """
    opts = opts or InvariantOptions()
    _check_pair(maximally_mixed(A.dim), A, B)
    if isinstance(opts.inf_start, State):
        if opts.inf_start.dim != A.dim:
            raise InputError("start state has the wrong dimension")
        rho = opts.inf_start.rho
    elif opts.inf_start == "mixed":
        rho = maximally_mixed(A.dim).rho
    elif opts.inf_start == "random":
        rho = random_state(A.dim, opts.seed).rho
    else:
        raise InputError(f"unknown start {opts.inf_start!r}")
    best_val, best_state, best_T = np.inf, None, None
    converged = False
    k = 0
    for k in range(1, opts.inf_max_iter + 1):
        phi = State(A.dim, rho)
        rep = maximize_bell(phi, A, B, opts.bell)
        if rep.beta < best_val:
            best_val, best_state = rep.beta, phi
            best_T = bell_operator(rep.candidate)
        if best_val <= 1.0 + 1e-9:
            converged = True
            break
        new = project_to_states(rho - opts.step / math.sqrt(k) * bell_operator(rep.candidate))
        if np.max(np.abs(new - rho)) < 1e-12:
            converged = True
            break
        rho = new
    return InvariantReport(
        value=float(best_val),
        witness_operator=best_T,
        witness_state=best_state,
        iterations=k,
        converged=converged,
    )


def minimax_interval(A: Algebra, B: Algebra, opts: InvariantOptions | None = None):
    """(beta_star report, beta_inf report); the invariant lies between their values."""
    return beta_star(A, B, opts), beta_inf(A, B, opts)


def minimax_gap(A: Algebra, B: Algebra, opts: InvariantOptions | None = None) -> float:
    star, inf = minimax_interval(A, B, opts)
    return inf.value - star.value
