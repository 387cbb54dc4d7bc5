import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellcorr.algebra import full_algebra, qubit_pair, qutrit_pair
from bellcorr.cluster import (
    BRANCH_CROSSOVER, KAPPA, SHORT_DISTANCE_LIMIT, BoundParams, SamplerOptions, bound_table,
    clustering_bound, clustering_coefficient, exponential_cluster_bound, short_distance_bound,
    verify_cluster_bound,
)
from bellcorr.errors import EstimationError, InputError
from bellcorr.states import random_product_state, random_state, singlet, werner

SQRT2 = math.sqrt(2)
mp.mp.dps = 40


def mp_short(m, d):
    s = mp.sqrt(2)
    return s - s / (7 + 4 * s) * (1 - mp.exp(-mp.mpf(m) * mp.mpf(d)))


def mp_clustering(g):
    s, g = mp.sqrt(2), mp.mpf(g)
    return min(s * (6 + 4 * s + g) / (7 + 4 * s), 1 + s * g)


def test_kappa_and_params():
    assert BoundParams(1, 0).kappa == pytest.approx(7 + 4 * SQRT2, abs=1e-12)
    assert KAPPA == pytest.approx(float(7 + 4 * mp.sqrt(2)), abs=1e-12)
    with pytest.raises(InputError):
        BoundParams(0, 1)
    with pytest.raises(InputError):
        BoundParams(1, -1)


def test_clustering_bound_examples():
    assert clustering_bound(0.0) == 1.0
    assert clustering_bound(1.0) == pytest.approx(SQRT2, abs=1e-15)
    assert BRANCH_CROSSOVER == pytest.approx(0.2322330470336312, abs=1e-12)
    assert float(mp_clustering(BRANCH_CROSSOVER)) == pytest.approx(1 + SQRT2 * BRANCH_CROSSOVER, abs=1e-12)
    assert clustering_bound(BRANCH_CROSSOVER) == pytest.approx(1.3284271247, abs=1e-9)
    for g in (-0.1, 1.1):
        with pytest.raises(InputError):
            clustering_bound(g)


def test_clustering_bound_monotone_and_in_range():
    vals = np.array([clustering_bound(g) for g in np.linspace(0, 1, 1000)])
    assert np.all(np.diff(vals) >= 0)
    assert vals.min() >= 1 and vals.max() <= SQRT2 + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1))
def test_clustering_bound_matches_high_precision(g):
    assert clustering_bound(g) == pytest.approx(float(mp_clustering(g)), abs=1e-14)


def test_exponential_bound_examples():
    assert exponential_cluster_bound(1, 0) == 3
    assert exponential_cluster_bound(1, math.log(2)) == 2
    assert exponential_cluster_bound(2, 10) == pytest.approx(1 + 2 * math.exp(-20), abs=1e-15)
    assert exponential_cluster_bound(2, 10) - 1 == pytest.approx(4.122307e-9, rel=1e-6)


def test_short_distance_examples():
    for m in (0.1, 1, 7):
        assert short_distance_bound(m, 0) == pytest.approx(SQRT2, abs=1e-12)
    assert short_distance_bound(1, 1) == pytest.approx(float(mp_short(1, 1)), abs=1e-14)
    assert short_distance_bound(1, 1) == pytest.approx(1.343583574, abs=1e-9)
    assert short_distance_bound(1, 100) == pytest.approx(SHORT_DISTANCE_LIMIT, abs=1e-9)
    s = mp.sqrt(2)
    assert SHORT_DISTANCE_LIMIT == pytest.approx(float(s * (6 + 4 * s) / (7 + 4 * s)), abs=1e-15)
    # the commonly quoted 1.302477 is truncated, not rounded
    assert SHORT_DISTANCE_LIMIT == pytest.approx(1.302477, abs=2e-6)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 10), st.floats(0, 50))
def test_bounds_properties(m, d):
    short = short_distance_bound(m, d)
    expo = exponential_cluster_bound(m, d)
    assert short <= SQRT2 + 1e-15
    assert short >= SHORT_DISTANCE_LIMIT - 1e-15
    assert expo >= 1
    assert short == pytest.approx(float(mp_short(m, d)), abs=1e-14)
    assert short_distance_bound(m, d + 1) <= short
    assert exponential_cluster_bound(m, d + 1) <= expo


def test_bound_table():
    rows = bound_table(1.0, [0, 1, 2])
    assert rows[0] == (0.0, 3.0, pytest.approx(SQRT2))
    assert len(rows) == 3


def test_gamma_product_states_vanish():
    A, B = qubit_pair()
    for k in range(5):
        p = random_product_state((2, 2), k)
        est = clustering_coefficient(p, A, B, SamplerOptions(samples=100, refinement_passes=1, seed=k))
        assert est.gamma_hat <= 1e-10
        assert est.is_lower_estimate


def test_gamma_singlet_and_werner():
    A, B = qubit_pair()
    assert clustering_coefficient(singlet(), A, B).gamma_hat >= 1 - 1e-6
    for w in (0.2, 0.5, 0.9):
        assert clustering_coefficient(werner(w), A, B).gamma_hat >= w - 1e-6


def test_gamma_witness_reproduces_value():
    A, B = qutrit_pair()
    phi = random_state(9, 3, rank=2)
    est = clustering_coefficient(phi, A, B, SamplerOptions(samples=200, refinement_passes=1))
    a, b = est.witness
    X, Y = A.element(a), B.element(b)
    w = lambda M: np.trace(phi.rho @ M)
    num = abs(w(X @ Y) - w(X) * w(Y))
    den = (w(X.conj().T @ X) * w(X @ X.conj().T) * w(Y.conj().T @ Y) * w(Y @ Y.conj().T)).real ** 0.25
    assert num / den == pytest.approx(est.gamma_hat, rel=1e-9)


def test_gamma_nondecreasing_in_samples():
    A, B = qutrit_pair()
    phi = random_state(9, 5)
    vals = [clustering_coefficient(phi, A, B, SamplerOptions(samples=n, refinement_passes=0, seed=1)).gamma_hat
            for n in (1, 10, 50, 100, 200, 400)]
    assert all(x <= y for x, y in zip(vals, vals[1:]))


def test_gamma_errors():
    A, B = qubit_pair()
    with pytest.raises(InputError):
        clustering_coefficient(singlet(), A, B, SamplerOptions(samples=0))
    with pytest.raises(InputError):
        clustering_coefficient(singlet(), full_algebra(4), B)
    # every denominator is at most 1, so a floor of 10 rejects all samples
    with pytest.raises(EstimationError):
        clustering_coefficient(singlet(), A, B, SamplerOptions(samples=20, floor=10.0))


def test_verify_examples():
    A, B = qubit_pair()
    chk = verify_cluster_bound(singlet(), A, B, 1.0)
    assert chk.beta == pytest.approx(SQRT2, abs=1e-9) and chk.bound == pytest.approx(SQRT2) and chk.holds
    p = random_product_state((2, 2), 1)
    chk = verify_cluster_bound(p, A, B, 0.0)
    assert chk.beta == pytest.approx(1, abs=1e-9) and chk.bound == 1.0 and chk.holds
    chk = verify_cluster_bound(werner(0.8), A, B, 0.8)
    assert chk.beta == pytest.approx(0.8 * SQRT2, abs=1e-6)
    assert chk.bound == pytest.approx(float(mp_clustering(0.8)), abs=1e-14)
    assert chk.bound == pytest.approx(1.39187, abs=1e-5)
    assert chk.holds


def test_verify_werner_family():
    A, B = qubit_pair()
    for w in np.linspace(0, 1, 11):
        assert verify_cluster_bound(werner(w), A, B, w).holds
