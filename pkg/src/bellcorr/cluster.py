"""Clustering constants and the Bell-correlation bounds they imply.

For commuting algebras A, B and a state w, the clustering constant Gamma is
the smallest number with

    |w(AB) - w(A) w(B)| <= Gamma * (w(A*A) w(AA*) w(B*B) w(BB*))^(1/4)

for all A in A, B in B.  It caps the maximal Bell correlation through
:func:`clustering_bound`.  In a massive vacuum, Gamma decays like exp(-m d)
with the separation d, which gives :func:`exponential_cluster_bound` and
:func:`short_distance_bound`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, check_commuting
from .bell import COMMUTE_TOL, OptimizerOptions, maximize_bell
from .errors import EstimationError, InputError
from .states import State

SQRT2 = math.sqrt(2.0)
KAPPA = 7.0 + 4.0 * SQRT2


@dataclass(frozen=True)
class BoundParams:
    """Mass gap ``m`` (inverse length) and separation ``d`` (length)."""

    m: float
    d: float

    def __post_init__(self):
        if not self.m > 0:
            raise InputError(f"mass gap must be positive, got {self.m}")
        if not self.d >= 0:
            raise InputError(f"distance must be non-negative, got {self.d}")

    @property
    def kappa(self) -> float:
        return KAPPA


def clustering_bound(gamma: float) -> float:
    """min{ sqrt2 (6 + 4 sqrt2 + gamma)/(7 + 4 sqrt2), 1 + sqrt2 gamma }."""
    if not 0.0 <= gamma <= 1.0:
        raise InputError(f"clustering constant must lie in [0, 1], got {gamma}")
    return min(SQRT2 * (6.0 + 4.0 * SQRT2 + gamma) / KAPPA, 1.0 + SQRT2 * gamma)


#: gamma where the two branches of clustering_bound meet
BRANCH_CROSSOVER = (2.0 * SQRT2 + 1.0) / (SQRT2 * (6.0 + 4.0 * SQRT2))


def exponential_cluster_bound(m: float, d: float) -> float:
    """1 + 2 exp(-m d); exceeds sqrt2 (and is then vacuous) for small m d."""
    p = BoundParams(m, d)
    return 1.0 + 2.0 * math.exp(-p.m * p.d)


def short_distance_bound(m: float, d: float) -> float:
    """sqrt2 - sqrt2/(7 + 4 sqrt2) (1 - exp(-m d)); equals sqrt2 at contact."""
    p = BoundParams(m, d)
    return SQRT2 - SQRT2 / KAPPA * (-math.expm1(-p.m * p.d))


#: limit of short_distance_bound as m d -> infinity
SHORT_DISTANCE_LIMIT = SQRT2 * (6.0 + 4.0 * SQRT2) / KAPPA


def bound_table(m: float, distances) -> list[tuple[float, float, float]]:
    """Rows (d, exponential bound, short-distance bound) for plotting."""
    return [(float(d), exponential_cluster_bound(m, d), short_distance_bound(m, d)) for d in distances]


# ---------------------------------------------------------------------------
# sampling the clustering constant
# ---------------------------------------------------------------------------

@dataclass
class SamplerOptions:
    samples: int = 400
    refinement_passes: int = 3
    floor: float = 1e-8
    seed: int = 0


@dataclass
class ClusterEstimate:
    gamma_hat: float
    samples: int
    refinement_passes: int
    is_lower_estimate: bool = True
    #: coefficient vectors (in the algebra bases) of the best pair
    witness: tuple | None = None


class _RatioModel:
    """Evaluates the clustering ratio from coefficient vectors in the two bases."""

    def __init__(self, state: State, A: Algebra, B: Algebra, floor: float):
        rho = state.rho
        EA, EB = A.basis, B.basis
        self.floor = floor
        self.mA = np.einsum("ij,kji->k", rho, EA)
        self.mB = np.einsum("ij,kji->k", rho, EB)
        self.GA = np.einsum("ab,kbc,lca->kl", rho, EA, EA)  # w(E_k E_l)
        self.GB = np.einsum("ab,kbc,lca->kl", rho, EB, EB)
        self.M = np.einsum("ab,kbc,lca->kl", rho, EA, EB)   # w(E_k F_l)

    def ratio(self, a, b):
        """Vectorized over leading axes of a (..., kA) and b (..., kB)."""
        num = np.abs(np.einsum("...k,kl,...l->...", a, self.M, b)
                     - (a @ self.mA) * (b @ self.mB))
        ga1 = np.einsum("...k,kl,...l->...", a.conj(), self.GA, a).real
        ga2 = np.einsum("...k,kl,...l->...", a, self.GA, a.conj()).real
        gb1 = np.einsum("...k,kl,...l->...", b.conj(), self.GB, b).real
        gb2 = np.einsum("...k,kl,...l->...", b, self.GB, b.conj()).real
        den = np.maximum(ga1 * ga2 * gb1 * gb2, 0.0) ** 0.25
        ok = den >= self.floor
        return np.where(ok, num / np.where(ok, den, 1.0), -np.inf)


def _sample_stream(kA: int, kB: int, n: int, seed: int):
    """Basis pairs first, then seeded random pairs alternating Hermitian / general."""
    a_list, b_list = [], []
    for i in range(kA):
        for j in range(kB):
            if len(a_list) == n:
                break
            a_list.append(np.eye(kA)[i].astype(complex))
            b_list.append(np.eye(kB)[j].astype(complex))
    rng = np.random.default_rng(seed)
    for s in range(n - len(a_list)):
        a = rng.standard_normal(kA).astype(complex)
        b = rng.standard_normal(kB).astype(complex)
        if s % 2:
            a = a + 1j * rng.standard_normal(kA)
            b = b + 1j * rng.standard_normal(kB)
        a_list.append(a)
        b_list.append(b)
    return np.array(a_list), np.array(b_list)


def _refine(model: _RatioModel, a, b, passes: int):
    """Coordinate ascent on the real and imaginary parts of both coefficient vectors."""
    x = np.concatenate([a.real, a.imag, b.real, b.imag])
    kA, kB = len(a), len(b)

    def unpack(v):
        return (v[..., :kA] + 1j * v[..., kA:2 * kA],
                v[..., 2 * kA:2 * kA + kB] + 1j * v[..., 2 * kA + kB:])

    best = float(model.ratio(*unpack(x)))
    for p in range(passes):
        step = 0.5 * 0.5 ** p
        while step > 1e-7 * 0.5 ** p:
            improved = False
            for c in range(len(x)):
                trial = np.tile(x, (2, 1))
                trial[0, c] += step
                trial[1, c] -= step
                vals = model.ratio(*unpack(trial))
                i = int(np.argmax(vals))
                if vals[i] > best:
                    best, x, improved = float(vals[i]), trial[i], True
            if not improved:
                step *= 0.5
    a, b = unpack(x)
    return best, a, b


def clustering_coefficient(state: State, A: Algebra, B: Algebra,
                           opts: SamplerOptions | None = None) -> ClusterEstimate:
    """Sampled lower estimate of the clustering constant Gamma."""
    opts = opts or SamplerOptions()
    if opts.samples < 1:
        raise InputError("at least one sample is required")
    if not (state.dim == A.dim == B.dim):
        raise InputError("state and algebras act on different spaces")
    if check_commuting(A, B) > COMMUTE_TOL:
        raise InputError("algebras do not commute")
    model = _RatioModel(state, A, B, opts.floor)
    a, b = _sample_stream(A.linear_dimension, B.linear_dimension, opts.samples, opts.seed)
    vals = model.ratio(a, b)
    if not np.any(np.isfinite(vals)):
        raise EstimationError("every sampled pair fell below the denominator floor")
    i = int(np.argmax(vals))
    best, wa, wb = float(vals[i]), a[i], b[i]
    if opts.refinement_passes > 0:
        r, ra, rb = _refine(model, wa, wb, opts.refinement_passes)
        if r > best:
            best, wa, wb = r, ra, rb
    if best > 1.0 + 1e-9:
        warnings.warn(f"sampled clustering constant {best:.9g} exceeds 1", RuntimeWarning, stacklevel=2)
    return ClusterEstimate(best, opts.samples, opts.refinement_passes, True, (wa, wb))


@dataclass
class ClusterCheck:
    beta: float
    bound: float
    holds: bool


def verify_cluster_bound(state: State, A: Algebra, B: Algebra, gamma: float,
                         opts: OptimizerOptions | None = None, slack: float = 1e-6) -> ClusterCheck:
    """Compare beta(state, A, B) with the bound implied by a caller-supplied Gamma."""
    beta = maximize_bell(state, A, B, opts).beta
    bound = clustering_bound(gamma)
    return ClusterCheck(beta, bound, beta <= bound + slack)
