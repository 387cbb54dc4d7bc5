"""Transverse-field Ising chain as a small stand-in for a massive local net.

    H = -J sum_i Z_i Z_{i+1} - g sum_i X_i      (open boundary)

Site 0 is the most significant tensor factor.  Region algebras are full
matrix algebras on a block of consecutive sites.  Disjoint blocks commute
(locality) and nested blocks give nested algebras (isotony).  For g well
above J the ground state is unique and gapped and its correlations decay
exponentially.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as sparse_linalg

from .algebra import MAX_DIM, PAULIS, Algebra, qudit_pair
from .bell import OptimizerOptions, maximize_bell
from .errors import DegenerateGroundError, FitError, InputError
from .states import State

MAX_SITES = 14

_X = sparse.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
_Z = sparse.csr_matrix(np.array([[1.0, 0.0], [0.0, -1.0]]))


def _site_op(N: int, ops: dict) -> sparse.csr_matrix:
    """Tensor product with ``ops[i]`` on site i and identity elsewhere."""
    factors = [ops.get(i, sparse.identity(2, format="csr")) for i in range(N)]
    return reduce(lambda x, y: sparse.kron(x, y, format="csr"), factors)


@dataclass(frozen=True, eq=False)
class ChainModel:
    N: int
    J: float
    g: float
    hamiltonian: sparse.csr_matrix
    boundary: str = "open"

    @property
    def dim(self) -> int:
        return 2 ** self.N


@dataclass(frozen=True)
class RegionSpec:
    start: int
    width: int

    def sites(self):
        return range(self.start, self.start + self.width)


def build_chain(N: int, J: float, g: float, max_sites: int = MAX_SITES) -> ChainModel:
    if int(N) != N or N < 2:
        raise InputError(f"chain needs at least two sites, got {N}")
    if N > max_sites:
        raise InputError(f"{N} sites exceeds the cap of {max_sites}")
    if not (np.isfinite(J) and np.isfinite(g)):
        raise InputError("couplings must be finite")
    N = int(N)
    H = sparse.csr_matrix((2 ** N, 2 ** N))
    for i in range(N - 1):
        H = H - J * _site_op(N, {i: _Z, i + 1: _Z})
    for i in range(N):
        H = H - g * _site_op(N, {i: _X})
    return ChainModel(N, float(J), float(g), H.tocsr())


def ground_vector(chain: ChainModel, tol: float = 1e-10):
    """(E0, E1, psi) from an iterative eigensolver using only H @ v products."""
    H = chain.hamiltonian
    n = H.shape[0]
    op = sparse_linalg.aslinearoperator(H)
    v0 = np.linspace(1.0, 2.0, n)  # fixed start vector for reproducibility
    w, V = sparse_linalg.eigsh(op, k=2, which="SA", v0=v0, tol=0)
    order = np.argsort(w)
    w, V = w[order], V[:, order]
    E0, E1 = float(w[0]), float(w[1])
    if E1 - E0 <= 100 * tol:
        raise DegenerateGroundError(f"ground level is degenerate (gap {E1 - E0:.3g})")
    psi = V[:, 0]
    psi = psi / np.linalg.norm(psi)
    k = int(np.argmax(np.abs(psi)))
    psi = psi * (np.abs(psi[k]) / psi[k])
    resid = np.linalg.norm(H @ psi - E0 * psi)
    if resid > max(tol, 1e-12) * max(1.0, abs(E0)):
        raise InputError(f"eigensolver residual {resid:.3g} above tolerance")
    return E0, E1, psi


def ground_state(chain: ChainModel, tol: float = 1e-10) -> State:
    """The vacuum analog: the unique ground state as a pure density matrix."""
    if chain.dim > MAX_DIM:
        raise InputError(f"dense state of dimension {chain.dim} exceeds the cap {MAX_DIM}")
    _, _, psi = ground_vector(chain, tol)
    return State.from_vector(psi)


def _check_region(chain: ChainModel, region: RegionSpec):
    if region.width < 1 or region.start < 0 or region.start + region.width > chain.N:
        raise InputError(f"region {region} does not fit in a chain of {chain.N} sites")


def region_algebra(chain: ChainModel, region: RegionSpec) -> Algebra:
    """Full matrix algebra on the region's sites, identity elsewhere."""
    _check_region(chain, region)
    if chain.dim > MAX_DIM:
        raise InputError(f"dimension {chain.dim} exceeds the cap {MAX_DIM}")
    left = np.eye(2 ** region.start)
    right = np.eye(2 ** (chain.N - region.start - region.width))
    basis = []
    for idx in product(range(4), repeat=region.width):
        P = reduce(np.kron, [PAULIS[i] for i in idx])
        basis.append(np.kron(np.kron(left, P), right))
    return Algebra(chain.dim, np.stack(basis))


def reduced_block_state(psi: np.ndarray, N: int, sites) -> State:
    """Density matrix of a pure chain state on the listed sites (in order)."""
    sites = list(sites)
    other = [k for k in range(N) if k not in sites]
    t = np.transpose(np.asarray(psi).reshape([2] * N), sites + other)
    m = t.reshape(2 ** len(sites), -1)
    return State(m.shape[0], m @ m.conj().T)


def zz_correlations(psi: np.ndarray, N: int, i: int = 0):
    """|<Z_i Z_j> - <Z_i><Z_j>| for j > i (Z is diagonal, so only |psi|^2 enters)."""
    p = np.abs(np.asarray(psi)) ** 2
    bits = (np.arange(2 ** N)[:, None] >> (N - 1 - np.arange(N))[None, :]) & 1
    z = 1.0 - 2.0 * bits
    mean = p @ z
    return [(j - i, float(abs(p @ (z[:, i] * z[:, j]) - mean[i] * mean[j]))) for j in range(i + 1, N)]


@dataclass(frozen=True)
class CurvePoint:
    a: int
    beta: float
    converged: bool


def separation_curve(chain: ChainModel, width: int, separations, opts: OptimizerOptions | None = None,
                     tol: float = 1e-10) -> list[CurvePoint]:
    """beta(ground, A[0, w), A[w + a, 2w + a)) for each separation a.

    Both region algebras act trivially outside L u R, so beta only depends
    on the reduced ground state there; the optimization runs on that
    2^(2w)-dimensional block with the pair (M_{2^w} x 1, 1 x M_{2^w}).
    """
    if width < 1:
        raise InputError("width must be at least 1")
    seps = sorted(int(a) for a in separations)
    if not seps or seps[0] < 0:
        raise InputError("separations must be non-negative integers")
    if 2 * width + seps[-1] > chain.N:
        raise InputError(f"regions of width {width} at separation {seps[-1]} overflow {chain.N} sites")
    _, _, psi = ground_vector(chain, tol)
    A, B = qudit_pair(2 ** width)
    out = []
    for a in seps:
        sites = list(range(width)) + list(range(width + a, 2 * width + a))
        rep = maximize_bell(reduced_block_state(psi, chain.N, sites), A, B, opts)
        out.append(CurvePoint(a, rep.beta, rep.converged))
    return out


@dataclass(frozen=True)
class DecayFit:
    m_hat: float
    amplitude: float
    residual: float
    points_used: int


def fit_decay(curve) -> DecayFit:
    """Least-squares fit of beta(a) = 1 + c exp(-m a) on log(beta - 1)."""
    pts = [(p.a, p.beta) if isinstance(p, CurvePoint) else (p[0], p[1]) for p in curve]
    if len(pts) < 3:
        raise InputError("fit_decay needs at least three points")
    a = np.array([p[0] for p in pts], dtype=float)
    beta = np.array([p[1] for p in pts], dtype=float)
    if np.any(beta < 1 - 1e-6):
        raise InputError("curve values must be at least 1")
    use = beta - 1 > 1e-9
    if use.sum() < 3:
        raise FitError(f"{int(use.sum())} usable points with beta - 1 > 1e-9, need 3")
    y = np.log(beta[use] - 1)
    X = np.column_stack([np.ones(use.sum()), a[use]])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = float(np.linalg.norm(X @ coef - y))
    return DecayFit(m_hat=float(-coef[1]), amplitude=float(np.exp(coef[0])), residual=resid,
                    points_used=int(use.sum()))
