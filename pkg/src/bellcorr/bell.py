"""Maximal Bell correlation of a state across a commuting pair of algebras.

    beta(phi, A, B) = sup phi(T),  T = 1/2 (a1 (b1 + b2) + a2 (b1 - b2)),

with the sup over Hermitian contractions a_i in A and b_j in B.  The value
always lies in [1, sqrt(2)].

The optimizer is an alternating ("see-saw") ascent.  With b1, b2 fixed the
objective is linear in each a_i and the exact maximizer over Hermitian
contractions of A is the spectral sign of the conditional expectation of
the symmetrized operator, so every half-step is a global best response and
the objective never decreases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    PAULIS,
    Algebra,
    _sign_stack,
    as_operator,
    check_commuting,
    commutator,
    full_algebra,
    is_hermitian,
    opnorm,
    same_algebra,
    spectral_sign,
    tensor_embed,
)
from .errors import InputError
from .states import State

SQRT2 = math.sqrt(2.0)
COMMUTE_TOL = 1e-8
_CLEANUP_TOL = 1e-10


@dataclass
class OptimizerOptions:
    restarts: int = 20
    max_sweeps: int = 500
    tol: float = 1e-10
    seed: int = 0


@dataclass(frozen=True, eq=False)
class BellCandidate:
    """Four Hermitian contractions a1, a2 in A and b1, b2 in B."""

    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray

    @property
    def dim(self) -> int:
        return self.a1.shape[0]

    def operators(self):
        return self.a1, self.a2, self.b1, self.b2

    def negate_a(self) -> "BellCandidate":
        return BellCandidate(-self.a1, -self.a2, self.b1, self.b2)

    def check(self, A: Algebra | None = None, B: Algebra | None = None, tol: float = 1e-8):
        """Raise InputError unless the candidate satisfies its invariants."""
        ops = [as_operator(X, self.dim) for X in self.operators()]
        for name, X in zip(("a1", "a2", "b1", "b2"), ops):
            if not is_hermitian(X, tol):
                raise InputError(f"{name} is not Hermitian")
            if opnorm(X) > 1 + 1e-9:
                raise InputError(f"{name} has norm {opnorm(X):.12g} > 1")
        for a in ops[:2]:
            for b in ops[2:]:
                if opnorm(commutator(a, b)) > tol:
                    raise InputError("candidate operators on the two sides do not commute")
        for alg, xs in ((A, ops[:2]), (B, ops[2:])):
            if alg is not None and max(alg.membership_residual(X) for X in xs) > tol:
                raise InputError("candidate operator lies outside its algebra")

    @classmethod
    def identity(cls, dim: int) -> "BellCandidate":
        eye = np.eye(dim, dtype=complex)
        return cls(eye, eye, eye, eye)


@dataclass
class BellReport:
    beta: float
    candidate: BellCandidate
    iterations: int
    restarts_used: int
    converged: bool
    #: objective of the winning restart after every half-step
    history: list = field(default_factory=list, repr=False)
    #: final value of every restart, in restart order
    restart_values: np.ndarray | None = field(default=None, repr=False)


@dataclass
class Diagnostics:
    sq_residuals: tuple
    anticomm_residuals: tuple
    i2_residuals: tuple

    def max_residual(self) -> float:
        flat = list(self.sq_residuals) + list(self.anticomm_residuals)
        flat += [r for pair in self.i2_residuals for r in pair]
        return max(flat)


# ---------------------------------------------------------------------------
# values
# ---------------------------------------------------------------------------

def bell_operator(cand: BellCandidate) -> np.ndarray:
    """T = 1/2 (a1 (b1 + b2) + a2 (b1 - b2))."""
    cand.check()
    a1, a2, b1, b2 = cand.operators()
    T = 0.5 * (a1 @ (b1 + b2) + a2 @ (b1 - b2))
    return (T + T.conj().T) / 2


def correlation_value(state: State, cand: BellCandidate) -> float:
    """phi(T) for the Bell operator of ``cand``."""
    if state.dim != cand.dim:
        raise InputError(f"state acts on C^{state.dim}, candidate on C^{cand.dim}")
    a1, a2, b1, b2 = cand.operators()
    T = 0.5 * (a1 @ (b1 + b2) + a2 @ (b1 - b2))
    val = np.trace(state.rho @ T)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise InputError("candidate produces a non-real expectation; operators do not commute")
    return float(val.real)


def _traces(rho, Ms):
    """Tr(rho M) for a stack of matrices."""
    return np.einsum("ij,rji->r", rho, Ms).real


def _responses(rho, alg: Algebra, Xs):
    """Batched best responses sign(E_alg((X rho + rho X)/2))."""
    H = 0.5 * (Xs @ rho + rho @ Xs)
    S = _sign_stack(alg.project(H))
    # Nearly degenerate eigenvalues close to zero can have their eigenvectors
    # mixed at the 1e-6 level, which pushes the sign out of the algebra.
    # Projecting back gives eigenvalues near +-1, where a second sign is exact.
    P = alg.project(S)
    off = np.linalg.norm(S - P, axis=(-2, -1)) > _CLEANUP_TOL
    if np.any(off):
        S[off] = _sign_stack(P[off])
    return S


def best_response(state: State, alg: Algebra, X) -> np.ndarray:
    """Maximizer of Tr(rho A X) over Hermitian contractions A in ``alg``.

    ``X`` must be Hermitian and commute with ``alg``.
    """
    X = as_operator(X, alg.dim)
    if state.dim != alg.dim:
        raise InputError("state and algebra act on different spaces")
    if not is_hermitian(X, 1e-10 * max(1.0, opnorm(X))):
        raise InputError("best_response needs a Hermitian X")
    if max(opnorm(commutator(E, X)) for E in alg.basis) > COMMUTE_TOL:
        raise InputError("X does not commute with the algebra")
    return _responses(state.rho, alg, X[None])[0]


# ---------------------------------------------------------------------------
# see-saw
# ---------------------------------------------------------------------------

def random_contraction(alg: Algebra, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian element of ``alg`` with its spectrum clipped to [-1, 1]."""
    coeffs = rng.standard_normal(alg.linear_dimension)
    H = alg.element(coeffs)
    H = (H + H.conj().T) / 2
    w, V = np.linalg.eigh(H)
    return (V * np.clip(w, -1.0, 1.0)) @ V.conj().T


def initial_candidates(A: Algebra, B: Algebra, opts: OptimizerOptions) -> list[BellCandidate]:
    """Restart 0 is all-identity; restart k >= 1 draws from rng([seed, k])."""
    out = [BellCandidate.identity(A.dim)]
    for k in range(1, opts.restarts):
        rng = np.random.default_rng([opts.seed, k])
        a1, a2 = random_contraction(A, rng), random_contraction(A, rng)
        b1, b2 = random_contraction(B, rng), random_contraction(B, rng)
        out.append(BellCandidate(a1, a2, b1, b2))
    return out


def _check_pair(state: State, A: Algebra, B: Algebra):
    if not (state.dim == A.dim == B.dim):
        raise InputError(f"dimension mismatch: state {state.dim}, A {A.dim}, B {B.dim}")
    c = check_commuting(A, B)
    if c > COMMUTE_TOL:
        raise InputError(f"algebras do not commute (max commutator norm {c:.3g})")


def seesaw(state: State, A: Algebra, B: Algebra, starts, max_sweeps: int = 500, tol: float = 1e-10):
    """Run the alternating ascent from each start, all restarts batched together.

    Returns ``(candidates, values, sweeps, converged, history)`` where
    ``history[h, r]`` is the objective of restart r after half-step h (row 0
    holds the starting values).
    """
    rho = state.rho
    a1 = np.stack([c.a1 for c in starts])
    a2 = np.stack([c.a2 for c in starts])
    b1 = np.stack([c.b1 for c in starts])
    b2 = np.stack([c.b2 for c in starts])
    R = len(starts)
    T0 = 0.5 * (a1 @ (b1 + b2) + a2 @ (b1 - b2))
    values = _traces(rho, T0)
    history = [values.copy()]
    converged = np.zeros(R, dtype=bool)
    sweeps = np.zeros(R, dtype=int)
    for _ in range(max_sweeps):
        act = np.flatnonzero(~converged)
        if act.size == 0:
            break
        X1, X2 = b1[act] + b2[act], b1[act] - b2[act]
        na = _responses(rho, A, np.concatenate([X1, X2]))
        a1[act], a2[act] = na[: act.size], na[act.size:]
        half = values.copy()
        half[act] = 0.5 * (_traces(rho, a1[act] @ X1) + _traces(rho, a2[act] @ X2))
        xp, xm = 0.5 * (a1[act] + a2[act]), 0.5 * (a1[act] - a2[act])
        nb = _responses(rho, B, np.concatenate([xp, xm]))
        b1[act], b2[act] = nb[: act.size], nb[act.size:]
        new = half.copy()
        new[act] = _traces(rho, xp @ b1[act]) + _traces(rho, xm @ b2[act])
        history.extend([half, new.copy()])
        sweeps[act] += 1
        converged[act] = (new[act] - values[act]) < tol
        values = new
    cands = [BellCandidate(a1[r], a2[r], b1[r], b2[r]) for r in range(R)]
    return cands, values, sweeps, converged, np.array(history)


def maximize_bell(state: State, A: Algebra, B: Algebra, opts: OptimizerOptions | None = None) -> BellReport:
    """Multi-restart see-saw estimate of beta(state, A, B).

    The returned value is attained by the reported candidate, so it is a
    certified lower bound on the true supremum.
    """
    opts = opts or OptimizerOptions()
    if opts.restarts < 1:
        raise InputError("at least one restart is required")
    _check_pair(state, A, B)
    starts = initial_candidates(A, B, opts)
    cands, values, sweeps, converged, history = seesaw(state, A, B, starts, opts.max_sweeps, opts.tol)
    best = int(np.argmax(values))  # first maximum: lowest restart index wins ties
    cand = cands[best]
    return BellReport(
        beta=correlation_value(state, cand),
        candidate=cand,
        iterations=int(sweeps[best]),
        restarts_used=len(starts),
        converged=bool(converged[best]),
        history=list(history[:, best]),
        restart_values=values,
    )


# ---------------------------------------------------------------------------
# brute-force oracle for two qubits
# ---------------------------------------------------------------------------

def _qubit_layout(A: Algebra, B: Algebra):
    """Return the embedded Pauli operators for A and B, or raise."""
    if A.dim != 4 or B.dim != 4:
        raise InputError("brute_force_beta supports only a pair of qubit factors on C^4")
    M2 = full_algebra(2)
    left, right = tensor_embed(M2, right=2), tensor_embed(M2, left=2)
    paul_left = [np.kron(P, np.eye(2)) for P in PAULIS]
    paul_right = [np.kron(np.eye(2), P) for P in PAULIS]
    if same_algebra(A, left) and same_algebra(B, right):
        return paul_left, paul_right
    if same_algebra(A, right) and same_algebra(B, left):
        return paul_right, paul_left
    raise InputError("brute_force_beta supports only the (M2 x 1, 1 x M2) layout")


def bloch_grid(resolution: int) -> np.ndarray:
    """Upper-hemisphere unit vectors on a (polar, azimuth) grid of spacing 2 pi / resolution."""
    step = 2 * np.pi / resolution
    thetas = step * np.arange(resolution // 4 + 1)
    thetas = thetas[thetas <= np.pi / 2 + 1e-12]
    phis = step * np.arange(resolution)
    dirs = [np.array([0.0, 0.0, 1.0])]
    for t in thetas[1:]:
        for p in phis:
            dirs.append(np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)]))
    return np.array(dirs)


def brute_force_beta(state: State, A: Algebra, B: Algebra, resolution: int = 64) -> float:
    """Grid lower bound on beta for two qubits.

    Alice's two settings range over ``n . sigma`` for n on a spherical grid
    plus the identity; for each pair Bob's optimum over {+-I, m . sigma} is
    taken in closed form (a maximum of two absolute values).  Flipping the
    sign of either of Alice's settings only swaps Bob's two terms, so the
    upper hemisphere suffices.
    """
    if resolution < 8:
        raise InputError("resolution must be at least 8")
    pa, pb = _qubit_layout(A, B)
    if state.dim != 4:
        raise InputError("state must act on C^4")
    C = np.array([[np.trace(state.rho @ pa[i] @ pb[j]).real for j in range(4)] for i in range(4)])
    dirs = bloch_grid(resolution)
    alice = np.vstack([np.hstack([np.zeros((len(dirs), 1)), dirs]), [[1.0, 0.0, 0.0, 0.0]]])
    W = alice @ C  # row r: Bob-side coefficient vector for Alice option r
    w0, wv = W[:, 0], W[:, 1:]
    nrm = np.einsum("ij,ij->i", wv, wv)
    best = 1.0
    chunk = 1024
    for s in range(0, len(W), chunk):
        # the pair (r, q) is symmetric, so only q >= s is needed
        G = 2.0 * (wv[s:s + chunk] @ wv[s:].T)
        n2 = nrm[s:s + chunk, None] + nrm[None, s:]
        plus = np.add(n2, G)
        minus = np.subtract(n2, G, out=n2)
        np.maximum(plus, 0.0, out=plus)
        np.maximum(minus, 0.0, out=minus)
        np.sqrt(plus, out=plus)
        np.sqrt(minus, out=minus)
        if np.any(w0):
            np.maximum(plus, np.abs(w0[s:s + chunk, None] + w0[None, s:]), out=plus)
            np.maximum(minus, np.abs(w0[s:s + chunk, None] - w0[None, s:]), out=minus)
        plus += minus
        best = max(best, 0.5 * float(plus.max()))
    return best


def horodecki_beta(state: State) -> float:
    """Closed form max(1, sqrt(t1^2 + t2^2)) for two qubits (t_i top singular values)."""
    C = np.array([[np.trace(state.rho @ np.kron(PAULIS[i], PAULIS[j])).real for j in range(1, 4)]
                  for i in range(1, 4)])
    s = np.linalg.svd(C, compute_uv=False)
    return max(1.0, float(np.sqrt(s[0] ** 2 + s[1] ** 2)))


# ---------------------------------------------------------------------------
# structure at the optimum
# ---------------------------------------------------------------------------

def i2_residuals(X1, X2) -> tuple[float, float]:
    """(||N^2||, ||N N* + N* N - 1||) for N = (X1 + i X2)/2."""
    N = 0.5 * (X1 + 1j * X2)
    Nd = N.conj().T
    eye = np.eye(N.shape[0])
    return opnorm(N @ N), opnorm(N @ Nd + Nd @ N - eye)


def candidate_diagnostics(cand: BellCandidate) -> Diagnostics:
    a1, a2, b1, b2 = cand.operators()
    eye = np.eye(cand.dim)
    return Diagnostics(
        sq_residuals=tuple(opnorm(X @ X - eye) for X in (a1, a2, b1, b2)),
        anticomm_residuals=(opnorm(a1 @ a2 + a2 @ a1), opnorm(b1 @ b2 + b2 @ b1)),
        i2_residuals=(i2_residuals(a1, a2), i2_residuals(b1, b2)),
    )


def structural_diagnostics(state: State, report: BellReport) -> Diagnostics:
    """Residuals of the Pauli relations for the optimizer in ``report``.

    Only reports numbers; whether they should be small depends on the
    optimum being maximal and the state being faithful on both sides.
    """
    return candidate_diagnostics(report.candidate)
