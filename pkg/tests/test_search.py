"""Adversarial search: parametrization, analytic gradient, and end-to-end runs."""

import numpy as np
import pytest

from qcompare import Operator, adversarial_search, one_sided_violation, orthogonal_qubit_map
from qcompare.machines import build_k_comparison_machine
from qcompare.search import (
    _output_bit_mask,
    _PenaltyObjective,
    hermitian_from_params,
    params_from_hermitian,
    params_from_unitary,
    unitary_from_params,
)
from qcompare.verifier import build_probe_set

from conftest import random_antilinear


# ---------------------------------------------------------------------------
# Parametrization round-trips


def test_hermitian_packing_round_trip():
    rng = np.random.default_rng(0)
    for n in (2, 4, 8):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = (g + g.conj().T) / 2
        theta = params_from_hermitian(h)
        assert theta.shape == (n * n,)
        np.testing.assert_allclose(hermitian_from_params(theta, n), h, atol=1e-14)


def test_unitary_from_params_is_unitary():
    rng = np.random.default_rng(1)
    for n in (2, 4, 8):
        theta = rng.standard_normal(n * n)
        u, lam, v = unitary_from_params(theta, n)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(n), atol=1e-12)
        np.testing.assert_allclose(v @ np.diag(np.exp(1j * lam)) @ v.conj().T, u, atol=1e-12)


def test_params_from_unitary_inverts_the_exponential():
    rng = np.random.default_rng(2)
    for n in (2, 4, 8):
        theta = rng.standard_normal(n * n) * 0.3
        u, _, _ = unitary_from_params(theta, n)
        theta_back = params_from_unitary(u)
        u_back, _, _ = unitary_from_params(theta_back, n)
        np.testing.assert_allclose(u_back, u, atol=1e-10)


def test_witness_unitary_is_representable():
    # The swap-comparison witness must survive a params round-trip exactly,
    # otherwise seeding the optimizer with it would be pointless.
    machine = build_k_comparison_machine(Operator(np.eye(2)))
    u = np.kron(machine.unitary.entries, np.eye(2))
    u_back, _, _ = unitary_from_params(params_from_unitary(u), 16)
    np.testing.assert_allclose(u_back, u, atol=1e-10)


# ---------------------------------------------------------------------------
# Analytic gradient


def test_penalty_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    k = random_antilinear(rng)
    pset = build_probe_set(k)
    dims = (2, 2, 2)
    n = 8
    anc = np.array([1.0, 0.0])
    constraint = np.stack(
        [np.kron(pset.unit[name].amplitudes, anc) for name in ("00", "11")], axis=1
    )
    samples = np.stack(
        [
            (lambda v: v / np.linalg.norm(v))(
                rng.standard_normal(n) + 1j * rng.standard_normal(n)
            )
            for _ in range(8)
        ],
        axis=1,
    )
    mask = _output_bit_mask(dims, 2, 1)
    objective = _PenaltyObjective(
        constraint_probes=constraint,
        sample_pairs=samples,
        wrong_mask=mask,
        want_mask=mask,
        n=n,
    )
    objective.weight = 10.0
    theta = rng.standard_normal(n * n) * 0.2
    _, grad = objective(theta)

    eps = 1e-6
    for idx in rng.choice(n * n, size=12, replace=False):
        bump = np.zeros(n * n)
        bump[idx] = eps
        hi, _ = objective(theta + bump)
        lo, _ = objective(theta - bump)
        fd = (hi - lo) / (2 * eps)
        assert grad[idx] == pytest.approx(fd, rel=1e-4, abs=1e-7)


# ---------------------------------------------------------------------------
# End-to-end searches (small budgets keep the regular suite fast; the
# acceptance suite runs the full-budget version)


def test_search_finds_nothing_for_orthogonalizing_map_case2():
    k = orthogonal_qubit_map()
    result = adversarial_search(k, case_id=2, budget=4, seed=0)
    assert result.best_nontriviality <= 1e-3
    assert result.achieved_violation <= result.epsilon
    assert result.feasible_candidates >= 1


def test_search_finds_nothing_for_orthogonalizing_map_case1():
    k = orthogonal_qubit_map()
    result = adversarial_search(k, case_id=1, budget=4, seed=0)
    assert result.best_nontriviality <= 1e-3


def test_search_recovers_useful_machine_for_unitary_map_case2():
    k = Operator(np.eye(2))
    result = adversarial_search(k, case_id=2, budget=3, seed=0)
    assert result.best_nontriviality >= 0.2
    assert result.achieved_violation <= result.epsilon


def test_search_result_violation_agrees_with_verifier():
    k = orthogonal_qubit_map()
    result = adversarial_search(k, case_id=2, budget=2, seed=1)
    v = one_sided_violation(result.best_machine, k, 2)
    assert v == pytest.approx(result.achieved_violation, abs=1e-12)
    assert v <= result.epsilon


def test_search_is_deterministic_per_seed():
    k = orthogonal_qubit_map()
    a = adversarial_search(k, case_id=2, budget=2, seed=5)
    b = adversarial_search(k, case_id=2, budget=2, seed=5)
    assert a.best_nontriviality == b.best_nontriviality
    assert a.achieved_violation == b.achieved_violation
    np.testing.assert_array_equal(
        a.best_machine.unitary.entries, b.best_machine.unitary.entries
    )


def test_search_validates_arguments():
    k = orthogonal_qubit_map()
    with pytest.raises(ValueError):
        adversarial_search(k, case_id=3, budget=1)
    with pytest.raises(ValueError):
        adversarial_search(k, case_id=1, budget=0)
    with pytest.raises(ValueError):
        adversarial_search(k, case_id=1, budget=1, epsilon=0.0)


def test_search_records_run_metadata():
    k = orthogonal_qubit_map()
    result = adversarial_search(k, case_id=1, budget=2, seed=7)
    assert result.restarts == 2
    assert result.case_id == 1
    assert result.seed == 7
    assert result.best_machine.dims == (2, 2, 2, 2)
