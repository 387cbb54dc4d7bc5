import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellcorr.algebra import (
    PAULI_I, PAULI_X, PAULI_Z, diagonal_algebra, diagonal_pair, full_algebra, generate_algebra,
    qubit_pair, qutrit_pair, tensor_embed,
)
from bellcorr.bell import (
    BellCandidate, OptimizerOptions, bell_operator, best_response, brute_force_beta,
    candidate_diagnostics, correlation_value, horodecki_beta, i2_residuals, maximize_bell, seesaw,
    initial_candidates, structural_diagnostics,
)
from bellcorr.errors import InputError
from bellcorr.states import maximally_mixed, product_state, random_state, singlet, werner

SQRT2 = math.sqrt(2)
I2 = PAULI_I
Z1, X1 = np.kron(PAULI_Z, I2), np.kron(PAULI_X, I2)
Z2, X2 = np.kron(I2, PAULI_Z), np.kron(I2, PAULI_X)


def chsh_candidate():
    return BellCandidate(Z1, X1, (Z2 + X2) / SQRT2, (Z2 - X2) / SQRT2)


def test_bell_operator_examples():
    assert np.allclose(bell_operator(BellCandidate.identity(4)), np.eye(4))
    T = bell_operator(chsh_candidate())
    assert np.allclose(T, (np.kron(PAULI_Z, PAULI_Z) + np.kron(PAULI_X, PAULI_X)) / SQRT2)
    assert np.allclose(np.linalg.eigvalsh(T), [-SQRT2, 0, 0, SQRT2])
    zero = np.zeros((4, 4))
    assert np.allclose(bell_operator(BellCandidate(Z1, X1, zero, zero)), 0)


def test_bell_operator_rejects_bad_candidates():
    with pytest.raises(InputError):
        bell_operator(BellCandidate(2 * Z1, X1, Z2, X2))
    with pytest.raises(InputError):
        bell_operator(BellCandidate(Z1, X1, X1, Z2))  # a2 and b1 do not commute


def test_correlation_value_examples():
    assert correlation_value(random_state(4, 0), BellCandidate.identity(4)) == pytest.approx(1)
    c = chsh_candidate()
    assert correlation_value(singlet(), c) == pytest.approx(-SQRT2, abs=1e-14)
    assert correlation_value(singlet(), c.negate_a()) == pytest.approx(SQRT2, abs=1e-14)
    assert correlation_value(maximally_mixed(4), c) == pytest.approx(0, abs=1e-15)


def test_best_response_examples():
    A, B = qubit_pair()
    assert np.allclose(best_response(singlet(), A, np.zeros((4, 4))), np.eye(4))
    a = best_response(singlet(), A, Z2)
    assert np.allclose(a, -Z1)
    assert np.trace(singlet().rho @ a @ Z2).real == pytest.approx(1)
    with pytest.raises(InputError):
        best_response(singlet(), A, X1)


def test_best_response_diagonal():
    D = diagonal_algebra(3)
    rng = np.random.default_rng(0)
    rho = random_state(3, 1)
    X = np.diag(rng.standard_normal(3))
    H = 0.5 * (X @ rho.rho + rho.rho @ X)
    expected = np.diag(np.where(np.diag(H).real < -1e-12, -1.0, 1.0))
    assert np.allclose(best_response(rho, D, X), expected)


def test_best_response_beats_random_contractions():
    A, B = qutrit_pair()
    rng = np.random.default_rng(3)
    phi = random_state(9, 4)
    Y = B.element(rng.standard_normal(B.linear_dimension))
    Y = (Y + Y.conj().T) / 2
    a = best_response(phi, A, Y)
    top = np.trace(phi.rho @ a @ Y).real
    for _ in range(100):
        H = A.element(rng.standard_normal(A.linear_dimension))
        w, V = np.linalg.eigh((H + H.conj().T) / 2)
        U = (V * np.clip(w, -1, 1)) @ V.conj().T
        assert np.trace(phi.rho @ U @ Y).real <= top + 1e-12


def test_singlet_reaches_tsirelson():
    A, B = qubit_pair()
    rep = maximize_bell(singlet(), A, B)
    assert rep.beta == pytest.approx(SQRT2, abs=1e-6)
    assert rep.converged
    assert rep.restarts_used == 20
    assert rep.beta == pytest.approx(correlation_value(singlet(), rep.candidate), abs=1e-9)
    rep.candidate.check(A, B)


def test_werner_matches_oracles():
    A, B = qubit_pair()
    phi = werner(0.9)
    rep = maximize_bell(phi, A, B)
    assert rep.beta == pytest.approx(0.9 * SQRT2, abs=1e-5)
    assert brute_force_beta(phi, A, B, 64) == pytest.approx(0.9 * SQRT2, abs=1e-5)
    assert horodecki_beta(phi) == pytest.approx(0.9 * SQRT2, abs=1e-12)


def test_classical_cases():
    A, B = qubit_pair()
    DA, DB = diagonal_pair()
    for k in range(10):
        p = product_state(random_state(2, k), random_state(2, 100 + k))
        assert maximize_bell(p, A, B).beta == pytest.approx(1, abs=1e-9)
        assert maximize_bell(random_state(4, k), DA, DB).beta == pytest.approx(1, abs=1e-9)


def test_brute_force_examples():
    A, B = qubit_pair()
    assert brute_force_beta(singlet(), A, B, 64) >= SQRT2 - 0.01
    assert brute_force_beta(maximally_mixed(4), A, B, 64) == pytest.approx(1, abs=1e-9)
    assert brute_force_beta(werner(0.5), A, B, 64) == pytest.approx(1, abs=1e-3)
    with pytest.raises(InputError):
        brute_force_beta(singlet(), A, B, 4)
    with pytest.raises(InputError):
        brute_force_beta(random_state(9, 0), *qutrit_pair())
    # the oracle accepts the two factors in either order
    assert brute_force_beta(singlet(), B, A, 32) == pytest.approx(brute_force_beta(singlet(), A, B, 32))


def test_seesaw_agrees_with_closed_form_and_grid():
    A, B = qubit_pair()
    for k in range(12):
        phi = random_state(4, 1000 + k, rank=1 + k % 4)
        beta = maximize_bell(phi, A, B).beta
        assert beta == pytest.approx(horodecki_beta(phi), abs=1e-8)
        assert abs(beta - brute_force_beta(phi, A, B, 128)) <= 5e-3


def test_seesaw_monotone_half_steps():
    A, B = qutrit_pair()
    phi = random_state(9, 7, rank=1)
    starts = initial_candidates(A, B, OptimizerOptions(restarts=8, seed=5))
    _, _, _, _, history = seesaw(phi, A, B, starts, 200, 1e-12)
    assert np.all(np.diff(history, axis=0) >= -1e-12)


def test_sign_symmetry():
    A, B = qubit_pair()
    for k in range(20):
        phi = random_state(4, k)
        rep = maximize_bell(phi, A, B, OptimizerOptions(restarts=3, seed=k))
        c = rep.candidate
        assert correlation_value(phi, c.negate_a()) == pytest.approx(-correlation_value(phi, c), abs=1e-12)


def test_monotone_in_algebra():
    small_A = tensor_embed(diagonal_algebra(2), 1, 2)
    mid_A = tensor_embed(generate_algebra([PAULI_X], 2), 1, 2)
    A, B = qubit_pair()
    for k in range(20):
        phi = random_state(4, 50 + k, rank=1)
        b_small = maximize_bell(phi, small_A, B).beta
        b_mid = maximize_bell(phi, mid_A, B).beta
        b_full = maximize_bell(phi, A, B).beta
        assert b_small <= b_full + 1e-9 and b_mid <= b_full + 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["qubit", "qutrit", "diag"]), st.integers(1, 4))
def test_bound_sandwich(seed, pair, rank):
    A, B = {"qubit": qubit_pair, "qutrit": qutrit_pair, "diag": diagonal_pair}[pair]()
    phi = random_state(A.dim, seed, rank=rank)
    rep = maximize_bell(phi, A, B, OptimizerOptions(restarts=5, seed=seed))
    assert 1 - 1e-9 <= rep.beta <= SQRT2 + 1e-9
    assert np.linalg.norm(bell_operator(rep.candidate), 2) <= SQRT2 + 1e-9


def test_options_and_errors():
    A, B = qubit_pair()
    with pytest.raises(InputError):
        maximize_bell(singlet(), A, B, OptimizerOptions(restarts=0))
    with pytest.raises(InputError):
        maximize_bell(singlet(), full_algebra(4), B)
    with pytest.raises(InputError):
        maximize_bell(random_state(9, 0), A, B)
    rep = maximize_bell(random_state(4, 3, 1), A, B, OptimizerOptions(max_sweeps=1, tol=1e-10))
    assert rep.iterations == 1


def test_same_seed_same_report():
    A, B = qutrit_pair()
    phi = random_state(9, 2, rank=1)
    r1 = maximize_bell(phi, A, B, OptimizerOptions(seed=4))
    r2 = maximize_bell(phi, A, B, OptimizerOptions(seed=4))
    assert r1.beta == r2.beta
    assert np.array_equal(r1.restart_values, r2.restart_values)


def test_diagnostics():
    A, B = qubit_pair()
    rep = maximize_bell(singlet(), A, B)
    d = structural_diagnostics(singlet(), rep)
    assert d.max_residual() <= 1e-4
    d = candidate_diagnostics(BellCandidate.identity(4))
    assert max(d.sq_residuals) == 0
    assert d.anticomm_residuals == pytest.approx((2.0, 2.0))
    assert i2_residuals(PAULI_Z, PAULI_X) == (0.0, 0.0)
