"""Finite-dimensional *-algebras of matrices acting on C^d.

An :class:`Algebra` is stored as a basis of Hermitian matrices that is
orthonormal for the normalized trace inner product

    <X, Y> = Tr(X^dagger Y) / d,

so the identity has unit norm whatever the ambient dimension.  Because the
basis is Hermitian, the expansion coefficients of a Hermitian matrix are
real, and the orthogonal projection onto the algebra (the trace-preserving
conditional expectation) maps Hermitian matrices to Hermitian matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
import scipy.linalg

from .errors import InputError

#: Largest ambient dimension accepted anywhere in the package.
MAX_DIM = 4096

#: Rank tolerance used when deciding whether a new element is independent.
RANK_TOL = 1e-10

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


# ---------------------------------------------------------------------------
# matrix predicates
# ---------------------------------------------------------------------------

def as_operator(M, dim=None) -> np.ndarray:
    """Return ``M`` as a square complex array, checking its size."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"expected a square matrix, got shape {M.shape}")
    if dim is not None and M.shape[0] != dim:
        raise InputError(f"expected a {dim}x{dim} matrix, got {M.shape[0]}x{M.shape[1]}")
    return M


def opnorm(M) -> float:
    """Operator (spectral) norm."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def is_hermitian(M, tol: float = 1e-10) -> bool:
    M = np.asarray(M)
    return bool(np.max(np.abs(M - M.conj().T), initial=0.0) <= tol)


def is_contraction(M, tol: float = 1e-9) -> bool:
    return opnorm(M) <= 1.0 + tol


def commutator(X, Y) -> np.ndarray:
    return X @ Y - Y @ X


def inner(X, Y) -> complex:
    """Normalized trace inner product Tr(X^dagger Y)/d."""
    return np.vdot(X, Y) / X.shape[0]


# ---------------------------------------------------------------------------
# the algebra container
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Algebra:
    """Unital *-subalgebra of M_d(C) given by a Hermitian orthonormal basis.

    ``basis`` has shape ``(k, d, d)`` where ``k`` is the linear dimension.
    """

    dim: int
    basis: np.ndarray
    contains_unit: bool = True

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 3 or b.shape[1:] != (self.dim, self.dim):
            raise InputError(f"basis must have shape (k, {self.dim}, {self.dim}), got {b.shape}")
        if not self.contains_unit:
            raise InputError("algebras must contain the identity")
        object.__setattr__(self, "basis", b)
        if self.membership_residual(np.eye(self.dim)) > 1e-8:
            raise InputError("identity is not in the span of the basis")

    @property
    def linear_dimension(self) -> int:
        return self.basis.shape[0]

    def __len__(self):
        return self.linear_dimension

    def coefficients(self, M) -> np.ndarray:
        """Expansion coefficients <E_i, M> of ``M`` (or a stack of matrices)."""
        return np.einsum("kij,...ij->...k", self.basis.conj(), M) / self.dim

    def project(self, M) -> np.ndarray:
        return np.einsum("...k,kij->...ij", self.coefficients(M), self.basis)

    def membership_residual(self, M) -> float:
        """Frobenius distance (normalized) from ``M`` to the algebra."""
        M = np.asarray(M, dtype=complex)
        r = M - self.project(M)
        return float(np.sqrt(np.abs(inner(r, r))))

    def element(self, coeffs) -> np.ndarray:
        return np.einsum("k,kij->ij", np.asarray(coeffs), self.basis)

    def closure_residuals(self) -> tuple[float, float]:
        """Largest adjoint-closure and product-closure residuals over the basis."""
        adj = max(self.membership_residual(E.conj().T) for E in self.basis)
        prod = 0.0
        for E in self.basis:
            P = np.einsum("ij,kjl->kil", E, self.basis)
            R = P - self.project(P)
            prod = max(prod, float(np.sqrt(np.max(np.abs(np.einsum("kij,kij->k", R.conj(), R)))) / np.sqrt(self.dim)))
        return adj, prod


class _HermitianBasisBuilder:
    """Incremental Gram-Schmidt over Hermitian matrices with rank detection."""

    def __init__(self, dim: int, tol: float = RANK_TOL):
        self.dim = dim
        self.tol = tol
        self.elements: list[np.ndarray] = []

    def _residual(self, H):
        # two passes of modified Gram-Schmidt keep the basis orthonormal to ~1e-15
        for _ in range(2):
            for E in self.elements:
                H = H - inner(E, H).real * E
        return H

    def add(self, M) -> int:
        """Add the Hermitian and anti-Hermitian parts of ``M``; return how many were new."""
        added = 0
        for H in ((M + M.conj().T) / 2, (M - M.conj().T) / 2j):
            scale = np.sqrt(abs(inner(H, H)))
            if scale <= self.tol:
                continue
            R = self._residual(H / scale)
            norm = np.sqrt(abs(inner(R, R)))
            if norm > self.tol:
                R = R / norm
                self.elements.append((R + R.conj().T) / 2)
                added += 1
        return added

    def algebra(self) -> Algebra:
        if not self.elements:
            basis = np.zeros((0, self.dim, self.dim), dtype=complex)
        else:
            basis = np.stack(self.elements)
        return Algebra(self.dim, basis)


def _check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 1:
        raise InputError(f"dimension must be a positive integer, got {dim!r}")
    if dim > MAX_DIM:
        raise InputError(f"dimension {dim} exceeds the configured cap {MAX_DIM}")
    return int(dim)


def generate_algebra(generators, dim: int) -> Algebra:
    """Smallest unital *-algebra containing ``generators``.

    Closure is reached by repeated pairwise products; a pass that adds no
    independent element ends the iteration.
    """
    dim = _check_dim(dim)
    gens = [as_operator(G, dim) for G in generators]
    builder = _HermitianBasisBuilder(dim)
    builder.add(np.eye(dim, dtype=complex))
    for G in gens:
        builder.add(G)
    done = 0  # products among elements[:done] have all been taken
    while True:
        n = len(builder.elements)
        if n == done:
            break
        for i, j in product(range(n), repeat=2):
            if i < done and j < done:
                continue
            builder.add(builder.elements[i] @ builder.elements[j])
        done = n
    return builder.algebra()


def hermitian_matrix_basis(k: int) -> np.ndarray:
    """Orthonormal Hermitian basis of M_k (identity plus generalized Gell-Mann).

    For ``k == 2`` this is exactly (I, sigma_x, sigma_y, sigma_z).
    """
    out = [np.eye(k, dtype=complex)]
    c = np.sqrt(k / 2)
    for i in range(k):
        for j in range(i + 1, k):
            S = np.zeros((k, k), dtype=complex)
            S[i, j] = S[j, i] = c
            out.append(S)
            A = np.zeros((k, k), dtype=complex)
            A[i, j], A[j, i] = -1j * c, 1j * c
            out.append(A)
    for m in range(1, k):
        D = np.zeros((k, k), dtype=complex)
        D[np.arange(m), np.arange(m)] = 1.0
        D[m, m] = -m
        D *= np.sqrt(k / (m * (m + 1)))
        out.append(D)
    return np.stack(out)


def full_algebra(k: int) -> Algebra:
    """All of M_k acting on C^k."""
    return Algebra(_check_dim(k), hermitian_matrix_basis(k))


def scalars(dim: int) -> Algebra:
    return Algebra(_check_dim(dim), np.eye(dim, dtype=complex)[None])


def diagonal_algebra(k: int) -> Algebra:
    """The maximal abelian algebra of diagonal matrices."""
    k = _check_dim(k)
    basis = np.zeros((k, k, k), dtype=complex)
    for i in range(k):
        basis[i, i, i] = np.sqrt(k)
    return Algebra(k, basis)


def tensor_embed(alg: Algebra, left: int = 1, right: int = 1) -> Algebra:
    """Embed ``alg`` as 1_left (x) alg (x) 1_right."""
    dim = _check_dim(left * alg.dim * right)
    basis = np.stack([np.kron(np.kron(np.eye(left), E), np.eye(right)) for E in alg.basis])
    return Algebra(dim, basis)


# ---------------------------------------------------------------------------
# structure
# ---------------------------------------------------------------------------

def _orthonormal_hermitian(mats, dim: int) -> Algebra:
    builder = _HermitianBasisBuilder(dim, tol=1e-8)
    for M in mats:
        builder.add(M)
    return builder.algebra()


def _stacked_null_space(blocks, n: int, rcond: float = 1e-10) -> np.ndarray:
    """Null space of the row-stacked blocks, folded into a running n x n QR factor.

    The R factor has the same singular values as the tall stack, so only an
    n x n SVD is needed however many blocks there are.
    """
    R = np.zeros((0, n), dtype=complex)
    for blk in blocks:
        R = np.linalg.qr(np.vstack([R, blk]), mode="r")
    if R.shape[0] == 0:
        R = np.zeros((1, n))
    return scipy.linalg.null_space(R, rcond=rcond)


def commutant(alg: Algebra) -> Algebra:
    """{X : XE = EX for every E in alg}, as the null space of the commutator map."""
    d = alg.dim
    eye = np.eye(d)
    # row-major vec: vec(EX - XE) = (E (x) I - I (x) E^T) vec(X)
    null = _stacked_null_space((np.kron(E, eye) - np.kron(eye, E.T) for E in alg.basis), d * d)
    mats = [null[:, i].reshape(d, d) for i in range(null.shape[1])]
    return _orthonormal_hermitian([np.eye(d, dtype=complex)] + mats, d)


def center(alg: Algebra) -> Algebra:
    """alg intersected with its commutant, computed in alg's own coordinates."""
    k, d = alg.linear_dimension, alg.dim
    # column j: stacked [E_j, E_i] over i
    cols = []
    for Ej in alg.basis:
        cols.append(np.concatenate([commutator(Ej, Ei).ravel() for Ei in alg.basis]))
    M = np.stack(cols, axis=1) / np.sqrt(d)
    null = scipy.linalg.null_space(M, rcond=1e-10)
    mats = [alg.element(null[:, i]) for i in range(null.shape[1])]
    return _orthonormal_hermitian([np.eye(d, dtype=complex)] + mats, d)


@dataclass(frozen=True)
class AlgebraStructure:
    is_abelian: bool
    is_factor: bool
    center_dimension: int
    linear_dimension: int


def structure_report(alg: Algebra) -> AlgebraStructure:
    cdim = center(alg).linear_dimension
    return AlgebraStructure(
        is_abelian=cdim == alg.linear_dimension,
        is_factor=cdim == 1,
        center_dimension=cdim,
        linear_dimension=alg.linear_dimension,
    )


def subspace_residual(small: Algebra, big: Algebra) -> float:
    """How far ``small`` is from being contained in ``big`` (0 when nested)."""
    if small.dim != big.dim:
        raise InputError("algebras act on different spaces")
    return max((big.membership_residual(E) for E in small.basis), default=0.0)


def same_algebra(A: Algebra, B: Algebra, tol: float = 1e-8) -> bool:
    return subspace_residual(A, B) <= tol and subspace_residual(B, A) <= tol


def conditional_expectation(alg: Algebra, M) -> np.ndarray:
    """Trace-preserving orthogonal projection of ``M`` onto ``alg``."""
    M = as_operator(M, alg.dim)
    return alg.project(M)


def spectral_sign(M, tol: float = 1e-12) -> np.ndarray:
    """sign(M) by functional calculus; eigenvalues with |lambda| <= tol map to +1."""
    M = as_operator(M)
    if not is_hermitian(M, 1e-10 * max(1.0, float(np.max(np.abs(M), initial=0.0)))):
        raise InputError("spectral_sign needs a Hermitian matrix")
    return _sign_stack(M[None], tol)[0]


def _sign_stack(Ms: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Batched spectral sign of a stack of Hermitian matrices (no input checks)."""
    Ms = (Ms + np.conj(np.swapaxes(Ms, -1, -2))) / 2
    w, V = np.linalg.eigh(Ms)
    s = np.where(w < -tol, -1.0, 1.0)
    return (V * s[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))


def direct_sum_pair(pairs) -> tuple[Algebra, Algebra]:
    """Block-diagonal pair (A_1 (+) A_2 (+) ..., B_1 (+) B_2 (+) ...)."""
    pairs = list(pairs)
    if not pairs:
        raise InputError("direct_sum_pair needs at least one pair")
    for A, B in pairs:
        if A.dim != B.dim:
            raise InputError("each pair must act on a common space")
    dims = [A.dim for A, _ in pairs]
    D = _check_dim(sum(dims))
    offsets = np.cumsum([0] + dims)

    def embed(side):
        out = []
        for (alg, off, d) in zip(side, offsets, dims):
            for E in alg.basis:
                big = np.zeros((D, D), dtype=complex)
                big[off:off + d, off:off + d] = E * np.sqrt(D / d)
                out.append(big)
        return Algebra(D, np.stack(out))

    return embed([A for A, _ in pairs]), embed([B for _, B in pairs])


def check_commuting(A: Algebra, B: Algebra) -> float:
    """max_{i,j} ||[E_i, F_j]|| over the two bases; 0 exactly for commuting pairs."""
    if A.dim != B.dim:
        raise InputError(f"dimension mismatch: {A.dim} vs {B.dim}")
    worst = 0.0
    for E in A.basis:
        C = np.einsum("ij,kjl->kil", E, B.basis) - np.einsum("kij,jl->kil", B.basis, E)
        if not np.any(C):
            continue
        worst = max(worst, float(np.max(np.linalg.norm(C, 2, axis=(1, 2)))))
    return worst


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def qudit_pair(k: int) -> tuple[Algebra, Algebra]:
    """(M_k (x) 1, 1 (x) M_k) on C^k (x) C^k."""
    M = full_algebra(k)
    return tensor_embed(M, right=k), tensor_embed(M, left=k)


def qubit_pair() -> tuple[Algebra, Algebra]:
    return qudit_pair(2)


def qutrit_pair() -> tuple[Algebra, Algebra]:
    return qudit_pair(3)


def diagonal_pair() -> tuple[Algebra, Algebra]:
    """(D_2 (x) 1, 1 (x) M_2): an abelian algebra against a full qubit factor."""
    return tensor_embed(diagonal_algebra(2), right=2), tensor_embed(full_algebra(2), left=2)
