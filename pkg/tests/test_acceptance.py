"""Acceptance gate: one test (and one printed pass/fail line) per criterion.

Every criterion pins its tolerance and a runtime cap.  Criteria are ordered
from plumbing (closed form vs circuit) to the headline result (the
linear/anti-linear search asymmetry) and the cloning-game equivalence.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from qcompare import (
    Cloner,
    Operator,
    adversarial_search,
    build_k_comparison_machine,
    build_swap_test_machine,
    evaluate,
    exactly_constrained_machine,
    haar_state,
    haar_unitary,
    orthogonal_qubit_map,
    perturbed_machine,
    run_game,
    sample_matched_pair,
    swap_test_probability,
    universal_cloner,
    verify_case1,
    verify_case2,
)

from conftest import random_antilinear


class _Criterion:
    """Times a criterion body and prints its pass/fail line."""

    def __init__(self, number: int, name: str, cap_seconds: float):
        self.number = number
        self.name = name
        self.cap = cap_seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        status = "PASS" if exc_type is None and elapsed < self.cap else "FAIL"
        print(
            f"ACCEPTANCE {self.number} {self.name}: {status} "
            f"({elapsed:.2f}s / cap {self.cap:.0f}s)"
        )
        if exc_type is None:
            assert elapsed < self.cap, (
                f"criterion {self.number} exceeded its {self.cap}s runtime cap "
                f"({elapsed:.2f}s)"
            )
        return False


def test_criterion_1_swap_test_formula_reproduction():
    with _Criterion(1, "swap-test formula vs circuit", 1.0):
        machine = build_swap_test_machine(2)
        rng = np.random.default_rng(101)
        worst = 0.0
        for _ in range(1000):
            phi, psi = haar_state(2, rng), haar_state(2, rng)
            worst = max(
                worst,
                abs(evaluate(machine, phi, psi).p_yes - swap_test_probability(phi, psi)),
            )
        assert worst <= 1e-10, f"worst dual-path gap {worst}"


def test_criterion_2_perfect_completeness():
    with _Criterion(2, "matched pairs never answer NO", 1.0):
        rng = np.random.default_rng(102)
        worst = 0.0
        for _ in range(100):
            k = haar_unitary(2, rng)
            machine = build_k_comparison_machine(k)
            phi, psi = sample_matched_pair(k, rng)
            worst = max(worst, evaluate(machine, phi, psi).p_no)
        assert worst <= 1e-12, f"worst matched p_no {worst}"


def test_criterion_3_exact_constraint_collapse():
    with _Criterion(3, "zero violation forces zero gap", 5.0):
        rng = np.random.default_rng(103)
        maps = [orthogonal_qubit_map()] + [random_antilinear(rng) for _ in range(19)]
        for trial, k in enumerate(maps):
            m1 = exactly_constrained_machine(k, 1, seed=trial)
            r1 = verify_case1(m1, k)
            assert r1.amplitudes["a00"] <= 1e-10, f"map {trial}: a00 {r1.amplitudes}"
            assert r1.amplitudes["a11"] <= 1e-10, f"map {trial}: a11 {r1.amplitudes}"

            m2 = exactly_constrained_machine(k, 2, seed=trial)
            r2 = verify_case2(m2, k)
            assert r2.amplitudes["b01"] <= 1e-10, f"map {trial}: b01 {r2.amplitudes}"
            assert r2.amplitudes["b10"] <= 1e-10, f"map {trial}: b10 {r2.amplitudes}"


def test_criterion_4_quantitative_robustness():
    with _Criterion(4, "gap <= C * violation on perturbed machines", 60.0):
        rng = np.random.default_rng(104)
        per_case = 10_000
        machines_per_base = 100
        for case_id in (1, 2):
            verify = verify_case1 if case_id == 1 else verify_case2
            counterexamples = 0
            produced = 0
            base_index = 0
            while produced < per_case:
                k = (
                    orthogonal_qubit_map()
                    if base_index == 0
                    else random_antilinear(rng)
                )
                base = exactly_constrained_machine(k, case_id, seed=base_index)
                for _ in range(machines_per_base):
                    scale = 10.0 ** rng.uniform(-6.0, -0.3)
                    machine = perturbed_machine(base, scale, seed=int(rng.integers(2**31)))
                    report = verify(machine, k)
                    if report.verdict != "pass":
                        counterexamples += 1
                    produced += 1
                    if produced >= per_case:
                        break
                base_index += 1
            assert counterexamples == 0, (
                f"case {case_id}: {counterexamples} counterexamples out of {produced}"
            )


def test_criterion_5_adversarial_search_asymmetry():
    with _Criterion(5, "search asymmetry, anti-unitary vs unitary", 600.0):
        k_anti = orthogonal_qubit_map()
        for case_id in (1, 2):
            result = adversarial_search(
                k_anti, case_id, ancilla_dims=(2, 2), epsilon=1e-6, budget=50, seed=105
            )
            assert result.restarts >= 50
            assert result.achieved_violation <= 1e-6
            assert result.best_nontriviality <= 1e-3, (
                f"anti-unitary case {case_id}: search found usefulness "
                f"{result.best_nontriviality}"
            )

        k_lin = Operator(np.eye(2))
        control = adversarial_search(
            k_lin, 2, ancilla_dims=(2, 2), epsilon=1e-6, budget=50, seed=105
        )
        assert control.best_nontriviality >= 0.2, (
            f"unitary control collapsed too: {control.best_nontriviality}"
        )


def test_criterion_6_cloning_game_equivalence():
    with _Criterion(6, "expected payoff equals clone fidelity", 5.0):
        rng = np.random.default_rng(106)
        worst = 0.0
        for _ in range(100):
            n_factors = int(rng.integers(2, 5))
            pair = rng.choice(n_factors, size=2, replace=False)
            cloner = Cloner(
                unitary=haar_unitary(2**n_factors, rng),
                dims=(2,) * n_factors,
                clone_indices=(int(pair[0]), int(pair[1])),
            )
            result = run_game(cloner, haar_state(2, rng), int(rng.integers(1, 3)))
            worst = max(worst, abs(result.expected_payoff - result.fidelity))
        assert worst <= 1e-10, f"worst payoff/fidelity gap {worst}"

        ucl = universal_cloner()
        payoffs = [
            run_game(ucl, haar_state(2, rng), clone).expected_payoff
            for _ in range(50)
            for clone in (1, 2)
        ]
        assert abs(payoffs[0] - 5.0 / 6.0) <= 1e-10
        assert max(abs(p - 5.0 / 6.0) for p in payoffs) <= 1e-10
        assert float(np.var(payoffs)) <= 1e-16


def test_criterion_7_cli_determinism():
    with _Criterion(7, "byte-identical CLI output per seed", 120.0):
        k_orth = "[[[0,0],[-1,0]],[[1,0],[0,0]]]"
        zero = "[[1,0],[0,0]]"
        plus = "[[0.7071067811865476,0],[0.7071067811865476,0]]"
        cases = [
            ("swap-test", "--phi", zero, "--psi", plus, "--seed", "9"),
            ("classify", "--k", k_orth, "--swap-test", "--samples", "20", "--seed", "9"),
            ("verify", "--k", k_orth, "--case", "2", "--exact-construction", "--seed", "9"),
            ("search", "--k", k_orth, "--case", "1", "--budget", "2", "--seed", "9"),
            ("cloning-game", "--psi", zero, "--sample", "1000", "--seed", "9"),
        ]
        for argv in cases:
            runs = [
                subprocess.run(
                    [sys.executable, "-m", "qcompare.cli", *argv],
                    capture_output=True,
                    check=True,
                ).stdout
                for _ in range(2)
            ]
            assert runs[0] == runs[1], f"non-deterministic output for {argv[0]}"
            json.loads(runs[0])
