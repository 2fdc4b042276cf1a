"""The cloning game: graded by a swap test against a fresh reference copy.

A cloner is any unitary acting on an input register plus blank/work
factors.  One round prepares the input state, runs the cloner, swap-tests a
chosen clone factor against a fresh copy of the input, and pays +1 if the
test passes, -1 if it fails.  The expected payoff equals the clone's
fidelity with the input, because the swap test passes a mixed clone rho
against a pure reference psi with probability (1 + <psi|rho|psi>) / 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .core import (
    DimensionMismatchError,
    NormalizationError,
    Operator,
    StateVector,
    apply,
    apply_to_factors,
    basis_state,
    cnot,
    controlled,
    hadamard,
    measure_qubit,
    partial_trace,
    ry,
    swap_operator,
    tensor,
    zero_state,
)

PAYOFF_FIDELITY_ATOL = 1e-10


@dataclass(frozen=True)
class Cloner:
    """A unitary cloner with two designated clone factors.

    Attributes:
        unitary: operator on the product of dims.
        dims: factor dimensions, input register first by convention.
        clone_indices: the two factors holding clone 1 and clone 2.
        input_index: factor receiving the input state; others start at |0>.
    """

    unitary: Operator
    dims: tuple[int, ...]
    clone_indices: tuple[int, int]
    input_index: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "clone_indices", tuple(int(i) for i in self.clone_indices))
        if not self.unitary.is_unitary:
            raise ValueError(
                f"cloner matrix is not unitary (defect {self.unitary.unitarity_defect:.3e})"
            )
        if self.unitary.dim != prod(self.dims):
            raise DimensionMismatchError(
                f"unitary dim {self.unitary.dim} does not match dims {self.dims}"
            )
        n = len(self.dims)
        i, j = self.clone_indices
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"clone_indices must be two distinct factors, got {(i, j)}")
        if not 0 <= self.input_index < n:
            raise ValueError(f"input_index {self.input_index} out of range")
        d_in = self.dims[self.input_index]
        if self.dims[i] != d_in or self.dims[j] != d_in:
            raise DimensionMismatchError(
                "clone factors must have the input dimension, got "
                f"{(self.dims[i], self.dims[j])} vs {d_in}"
            )


@dataclass(frozen=True)
class GameResult:
    """One analytic round: pass probability, expected payoff, clone fidelity."""

    p_pass: float
    expected_payoff: float
    fidelity: float

    def __post_init__(self) -> None:
        if abs(self.p_pass - (1.0 + self.fidelity) / 2.0) > PAYOFF_FIDELITY_ATOL:
            raise ValueError(
                f"p_pass {self.p_pass!r} inconsistent with fidelity {self.fidelity!r}"
            )
        if abs(self.expected_payoff - (2.0 * self.p_pass - 1.0)) > PAYOFF_FIDELITY_ATOL:
            raise ValueError("expected_payoff must equal 2 p_pass - 1")


def universal_cloner() -> Cloner:
    """The symmetric qubit cloner: both clones reach fidelity 5/6 on any input.

    Built as a gate circuit on (input, clone ancilla, work ancilla): the two
    ancillas are prepared by rotations and CNOTs, then entangled with the
    input by a CNOT cascade.  Clones come out on factors 0 and 1.
    """
    theta1 = np.arccos(1.0 / np.sqrt(5.0))
    theta2 = np.arccos(np.sqrt(5.0) / 3.0)
    theta3 = np.arccos(2.0 / np.sqrt(5.0))
    dims = (2, 2, 2)
    u = Operator(np.eye(8))

    def step(gate: Operator, factors: tuple[int, ...]) -> None:
        nonlocal u
        lifted = np.column_stack(
            [
                apply_to_factors(basis_state(col, dims), gate, factors).amplitudes
                for col in range(8)
            ]
        )
        u = Operator(lifted) @ u

    step(ry(theta1), (1,))
    step(cnot(), (1, 2))
    step(ry(theta2), (2,))
    step(cnot(), (2, 1))
    step(ry(theta3), (1,))
    step(cnot(), (0, 1))
    step(cnot(), (0, 2))
    step(cnot(), (1, 0))
    step(cnot(), (2, 0))
    return Cloner(unitary=u, dims=dims, clone_indices=(0, 1))


def trivial_cloner() -> Cloner:
    """Keep the input as clone 1 and hand out a blank |0> as clone 2."""
    return Cloner(unitary=Operator(np.eye(4)), dims=(2, 2), clone_indices=(0, 1))


def run_game(cloner: Cloner, psi: StateVector, clone_index: int) -> GameResult:
    """Play one round analytically.

    Simulates the cloner on psi with all other factors at |0>, appends a
    fresh reference copy of psi and an answer qubit, applies the swap-test
    circuit between the chosen clone factor and the reference, and reads the
    pass probability off the answer qubit.  The clone fidelity is computed
    independently from the clone's reduced density matrix and cross-checked
    against the circuit.
    """
    if clone_index not in (1, 2):
        raise ValueError(f"clone_index must be 1 or 2, got {clone_index}")
    d_in = cloner.dims[cloner.input_index]
    if psi.dim != d_in:
        raise DimensionMismatchError(f"input dim {psi.dim} does not match cloner dim {d_in}")
    if not psi.is_normalized:
        raise NormalizationError("run_game requires a normalized input")

    parts = [
        psi if i == cloner.input_index else zero_state(d)
        for i, d in enumerate(cloner.dims)
    ]
    out = apply(cloner.unitary, tensor(*parts))

    clone_factor = cloner.clone_indices[clone_index - 1]
    rho = partial_trace(out, (clone_factor,))
    fidelity = float(np.real(np.vdot(psi.amplitudes, rho @ psi.amplitudes)))

    n = len(cloner.dims)
    ref_index, answer_index = n, n + 1
    state = tensor(out, psi, basis_state(0, 2))
    state = apply_to_factors(state, hadamard(), (answer_index,))
    state = apply_to_factors(
        state, controlled(swap_operator(d_in)), (answer_index, clone_factor, ref_index)
    )
    state = apply_to_factors(state, hadamard(), (answer_index,))
    p_pass = measure_qubit(state, answer_index).p0

    if abs(p_pass - (1.0 + fidelity) / 2.0) > PAYOFF_FIDELITY_ATOL:
        raise RuntimeError(
            f"circuit pass probability {p_pass!r} disagrees with fidelity {fidelity!r}"
        )
    return GameResult(
        p_pass=p_pass, expected_payoff=2.0 * p_pass - 1.0, fidelity=fidelity
    )


def sample_game(
    cloner: Cloner, psi: StateVector, clone_index: int, n_rounds: int, seed: int = 0
) -> float:
    """Empirical mean payoff over Bernoulli rounds; deterministic per seed."""
    if n_rounds < 1:
        raise ValueError(f"n_rounds must be >= 1, got {n_rounds}")
    p = run_game(cloner, psi, clone_index).p_pass
    rng = np.random.default_rng(seed)
    passes = rng.random(n_rounds) < p
    return float(2.0 * np.mean(passes) - 1.0)
