"""Density matrices on C^d and the standard families used in the tests."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .algebra import as_operator
from .errors import InputError

STATE_TOL = 1e-10
FAITHFUL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class State:
    """A normal state, i.e. a density matrix ``rho`` on C^dim."""

    dim: int
    rho: np.ndarray

    def __post_init__(self):
        rho = as_operator(self.rho, self.dim)
        if np.max(np.abs(rho - rho.conj().T)) > STATE_TOL:
            raise InputError("density matrix is not Hermitian")
        rho = (rho + rho.conj().T) / 2
        if abs(np.trace(rho).real - 1) > STATE_TOL:
            raise InputError(f"density matrix has trace {np.trace(rho).real:.12g}")
        if np.linalg.eigvalsh(rho)[0] < -STATE_TOL:
            raise InputError("density matrix is not positive semidefinite")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_vector(cls, psi) -> "State":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(psi.size, np.outer(psi, psi.conj()))

    def expect(self, X) -> complex:
        return np.trace(self.rho @ X)

    def is_faithful(self, tol: float = FAITHFUL_TOL) -> bool:
        return bool(np.linalg.eigvalsh(self.rho)[0] >= tol)


SINGLET_VECTOR = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def singlet() -> State:
    """(|01> - |10>)/sqrt(2)."""
    return State.from_vector(SINGLET_VECTOR)


def werner(w: float) -> State:
    """w |psi-><psi-| + (1 - w) I/4."""
    if not 0.0 <= w <= 1.0:
        raise InputError(f"Werner parameter must lie in [0, 1], got {w}")
    return State(4, w * singlet().rho + (1 - w) * np.eye(4) / 4)


def maximally_mixed(dim: int) -> State:
    return State(dim, np.eye(dim, dtype=complex) / dim)


def product_state(*factors) -> State:
    """Tensor product of density matrices (``State`` objects or arrays)."""
    if not factors:
        raise InputError("product_state needs at least one factor")
    mats = [f.rho if isinstance(f, State) else as_operator(f) for f in factors]
    rho = reduce(np.kron, mats)
    return State(rho.shape[0], rho)


def mixture(weights, states) -> State:
    weights = np.asarray(weights, dtype=float)
    states = list(states)
    if len(weights) != len(states) or not states:
        raise InputError("weights and states must be non-empty and of equal length")
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise InputError("mixture weights must lie on the probability simplex")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise InputError("all mixed states must share a dimension")
    rho = sum(w * s.rho for w, s in zip(weights, states))
    return State(dims.pop(), rho)


def random_state(dim: int, seed: int, rank: int | None = None) -> State:
    """rho = G G^dagger / Tr(G G^dagger) for a seeded complex Gaussian dim x rank G."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise InputError(f"rank must lie in [1, {dim}], got {rank}")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = G @ G.conj().T
    return State(dim, rho / np.trace(rho).real)


def random_product_state(dims, seed: int) -> State:
    rng = np.random.default_rng(seed)
    factors = [random_state(d, int(rng.integers(2**63)), int(rng.integers(1, d + 1))) for d in dims]
    return product_state(*factors)


def trace_distance(phi: State, psi: State) -> float:
    """||rho_phi - rho_psi||_1 (sum of absolute eigenvalues, not halved)."""
    if phi.dim != psi.dim:
        raise InputError(f"dimension mismatch: {phi.dim} vs {psi.dim}")
    return float(np.sum(np.abs(np.linalg.eigvalsh(phi.rho - psi.rho))))


def reduced_state(state: State, dims, keep) -> State:
    """Partial trace onto the tensor factors listed in ``keep``."""
    dims = list(dims)
    if int(np.prod(dims)) != state.dim:
        raise InputError("factor dimensions do not multiply to the state dimension")
    keep = sorted(keep)
    n = len(dims)
    other = [k for k in range(n) if k not in keep]
    t = state.rho.reshape(dims + dims)
    t = np.transpose(t, keep + other + [n + k for k in keep] + [n + k for k in other])
    dk = int(np.prod([dims[k] for k in keep]))
    do = int(np.prod([dims[k] for k in other]))
    t = t.reshape(dk, do, dk, do)
    return State(dk, np.einsum("iaja->ij", t))


def make_state(spec: dict) -> State:
    """Build a state from a dictionary ``{"kind": ..., **params}``.

    Kinds: ``singlet``, ``werner`` (``w``), ``mixed`` (``dim``), ``product``
    (``factors``: list of specs or matrices), ``mixture`` (``weights``,
    ``states``), ``random`` (``dim``, ``seed``, optional ``rank``),
    ``matrix`` (``rho``), ``tfim_ground`` (``N``, ``J``, ``g``).
    """
    from .serialize import decode_matrix

    kind = spec.get("kind")
    if kind == "singlet":
        return singlet()
    if kind == "werner":
        return werner(float(spec["w"]))
    if kind == "mixed":
        return maximally_mixed(int(spec["dim"]))
    if kind == "product":
        return product_state(*[_state_or_matrix(f) for f in spec["factors"]])
    if kind == "mixture":
        return mixture(spec["weights"], [make_state(s) for s in spec["states"]])
    if kind == "random":
        return random_state(int(spec["dim"]), int(spec["seed"]), spec.get("rank"))
    if kind == "matrix":
        rho = decode_matrix(spec["rho"])
        return State(rho.shape[0], rho)
    if kind == "tfim_ground":
        from .lattice import build_chain, ground_state

        return ground_state(build_chain(int(spec["N"]), float(spec["J"]), float(spec["g"])))
    raise InputError(f"unknown state kind {kind!r}")


def _state_or_matrix(f):
    if isinstance(f, dict):
        return make_state(f)
    from .serialize import decode_matrix

    return decode_matrix(f)
