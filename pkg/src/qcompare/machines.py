"""Unitary decision machines that compare two quantum states.

A machine acts on probe tensor target tensor ancilla, with the register
order fixed as (probe, target, ancilla factors).  One designated dim-2
factor is the answer qubit: measuring it in the computational basis reads
the verdict, |0> meaning YES ("the states match") and |1> meaning NO.
The default answer qubit is the first ancilla factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .core import (
    AntiLinearMap,
    DimensionMismatchError,
    NormalizationError,
    Operator,
    StateVector,
    apply,
    hadamard,
    haar_state,
    inner,
    k_image,
    measure_qubit,
    swap_operator,
    tensor,
    zero_state,
)

MISMATCH_OVERLAP_CAP = 0.999  # sampled mismatched pairs must overlap below this


@dataclass(frozen=True)
class DecisionMachine:
    """A unitary comparison machine with a designated answer qubit.

    Attributes:
        unitary: operator on probe tensor target tensor ancilla.
        probe_dim: dimension of the probe register (factor 0).
        target_dim: dimension of the target register (factor 1).
        ancilla_dims: dims of the ancilla factors (factors 2, 3, ...).
        ancilla_init: initial ancilla state, default all-zeros basis state.
        output_qubit: factor index of the answer qubit; must have dim 2.
    """

    unitary: Operator
    probe_dim: int
    target_dim: int
    ancilla_dims: tuple[int, ...] = (2,)
    ancilla_init: StateVector | None = None
    output_qubit: int = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "ancilla_dims", tuple(int(d) for d in self.ancilla_dims))
        if self.ancilla_init is None:
            object.__setattr__(self, "ancilla_init", zero_state(self.ancilla_dims))
        if not self.unitary.is_unitary:
            raise ValueError(
                f"machine matrix is not unitary (defect {self.unitary.unitarity_defect:.3e})"
            )
        if self.unitary.dim != prod(self.dims):
            raise DimensionMismatchError(
                f"unitary dim {self.unitary.dim} does not match register dims {self.dims}"
            )
        if self.ancilla_init.dims != self.ancilla_dims:
            raise DimensionMismatchError(
                f"ancilla_init dims {self.ancilla_init.dims} != {self.ancilla_dims}"
            )
        if not self.ancilla_init.is_normalized:
            raise NormalizationError("ancilla_init must be normalized")
        if not 0 <= self.output_qubit < len(self.dims):
            raise ValueError(f"output_qubit {self.output_qubit} out of range")
        if self.dims[self.output_qubit] != 2:
            raise ValueError(
                f"output factor {self.output_qubit} has dim "
                f"{self.dims[self.output_qubit]}, not a qubit"
            )

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.probe_dim, self.target_dim) + self.ancilla_dims


@dataclass(frozen=True)
class OutcomeDistribution:
    """Answer-qubit statistics for one evaluation.

    post_yes / post_no keep the full register with the answer qubit collapsed;
    a branch of probability <= 1e-14 is None.
    """

    p_yes: float
    p_no: float
    post_yes: StateVector | None
    post_no: StateVector | None

    def __post_init__(self) -> None:
        if abs(self.p_yes + self.p_no - 1.0) > 1e-12:
            raise ValueError(
                f"outcome probabilities must sum to one, got {self.p_yes + self.p_no!r}"
            )


def swap_test_probability(phi: StateVector, psi: StateVector) -> float:
    """Closed-form YES probability of the swap test: (1 + |<phi|psi>|^2) / 2."""
    if phi.dim != psi.dim:
        raise DimensionMismatchError(f"state dims differ: {phi.dim} vs {psi.dim}")
    if not (phi.is_normalized and psi.is_normalized):
        raise NormalizationError("swap test requires normalized states")
    delta = abs(inner(phi, psi))
    return (1.0 + delta * delta) / 2.0


def _swap_test_unitary(state_dim: int) -> Operator:
    """Answer-qubit Hadamard, controlled swap of probe and target, Hadamard."""
    d2 = state_dim * state_dim
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    cswap = np.kron(np.eye(d2), p0) + np.kron(swap_operator(state_dim).entries, p1)
    h_last = np.kron(np.eye(d2), hadamard().entries)
    return Operator(h_last @ cswap @ h_last)


def build_swap_test_machine(state_dim: int) -> DecisionMachine:
    """Swap-test comparison machine on two registers of the given dimension.

    Says YES with probability (1 + delta^2) / 2 where delta is the overlap
    magnitude; identical inputs always pass, so NO answers are never wrong.
    """
    if state_dim < 1:
        raise ValueError(f"state_dim must be positive, got {state_dim}")
    return DecisionMachine(
        unitary=_swap_test_unitary(state_dim),
        probe_dim=state_dim,
        target_dim=state_dim,
        ancilla_dims=(2,),
        output_qubit=2,
    )


def build_k_comparison_machine(k: Operator) -> DecisionMachine:
    """Swap test preceded by applying a unitary k to the probe register.

    Decides whether the target equals k applied to the probe; on matched
    input (phi, k phi) the YES probability is exactly one.
    """
    if not k.is_unitary:
        raise ValueError(
            f"comparison map must be unitary (defect {k.unitarity_defect:.3e})"
        )
    d = k.dim
    pre = np.kron(np.kron(k.entries, np.eye(d)), np.eye(2))
    return DecisionMachine(
        unitary=Operator(_swap_test_unitary(d).entries @ pre),
        probe_dim=d,
        target_dim=d,
        ancilla_dims=(2,),
        output_qubit=2,
    )


def evaluate(machine: DecisionMachine, phi: StateVector, psi: StateVector) -> OutcomeDistribution:
    """Run the machine on a normalized pair and measure the answer qubit."""
    if phi.dim != machine.probe_dim or psi.dim != machine.target_dim:
        raise DimensionMismatchError(
            f"input dims ({phi.dim}, {psi.dim}) do not match machine "
            f"({machine.probe_dim}, {machine.target_dim})"
        )
    if not (phi.is_normalized and psi.is_normalized):
        raise NormalizationError("evaluate requires normalized inputs")
    state = apply(machine.unitary, tensor(phi, psi, machine.ancilla_init))
    m = measure_qubit(state, machine.output_qubit)
    return OutcomeDistribution(
        p_yes=m.p0, p_no=m.p1, post_yes=m.collapsed0, post_no=m.collapsed1
    )


def always_no_machine(
    probe_dim: int, target_dim: int, ancilla_dims: tuple[int, ...] = (2,)
) -> DecisionMachine:
    """Machine that flips the answer qubit and does nothing else."""
    ancilla_dims = tuple(ancilla_dims)
    rest = prod(ancilla_dims) // 2
    x_at_answer = np.kron(
        np.kron(np.eye(probe_dim * target_dim), np.array([[0.0, 1.0], [1.0, 0.0]])),
        np.eye(rest),
    )
    return DecisionMachine(
        unitary=Operator(x_at_answer),
        probe_dim=probe_dim,
        target_dim=target_dim,
        ancilla_dims=ancilla_dims,
        output_qubit=2,
    )


def always_yes_machine(
    probe_dim: int, target_dim: int, ancilla_dims: tuple[int, ...] = (2,)
) -> DecisionMachine:
    """Identity machine; the answer qubit stays on YES."""
    ancilla_dims = tuple(ancilla_dims)
    return DecisionMachine(
        unitary=Operator(np.eye(probe_dim * target_dim * prod(ancilla_dims))),
        probe_dim=probe_dim,
        target_dim=target_dim,
        ancilla_dims=ancilla_dims,
        output_qubit=2,
    )


def matched_partner(k: AntiLinearMap | Operator, phi: StateVector) -> StateVector:
    """Normalized image of phi under k; the target that makes (phi, psi) match."""
    return k_image(k, phi).normalized()


def is_matched_pair(
    k: AntiLinearMap | Operator, phi: StateVector, psi: StateVector, tol: float = 1e-10
) -> bool:
    """Ray equality test: |<normalized k phi | psi>| >= 1 - tol."""
    return abs(inner(matched_partner(k, phi), psi)) >= 1.0 - tol


def sample_matched_pair(
    k: AntiLinearMap | Operator, rng
) -> tuple[StateVector, StateVector]:
    phi = haar_state(k.dim, rng)
    return phi, matched_partner(k, phi)


def sample_mismatched_pair(
    k: AntiLinearMap | Operator, rng, overlap_cap: float = MISMATCH_OVERLAP_CAP
) -> tuple[StateVector, StateVector]:
    """Independent Haar pair, rejecting targets nearly matched to the probe."""
    phi = haar_state(k.dim, rng)
    ref = matched_partner(k, phi)
    while True:
        psi = haar_state(k.dim, rng)
        if abs(inner(ref, psi)) <= overlap_cap:
            return phi, psi


@dataclass(frozen=True)
class OneSidednessReport:
    """Sampled one-sidedness classification of a comparison machine."""

    n_samples: int
    tol: float
    max_matched_p_no: float
    max_matched_p_yes: float
    max_mismatched_p_yes: float
    max_mismatched_p_no: float
    yes_certain_on_match: bool
    no_certain_on_mismatch: bool
    label: str


def classify_one_sidedness(
    machine: DecisionMachine,
    k: AntiLinearMap | Operator,
    n_samples: int = 200,
    seed: int = 0,
    tol: float = 1e-9,
) -> OneSidednessReport:
    """Estimate which answer of the machine is reliable, by sampling.

    Draws n_samples matched and n_samples mismatched pairs for the map k.
    YES-certain-on-match means no matched pair ever produced a NO answer
    (beyond tol); NO-certain-on-mismatch means no mismatched pair ever
    produced a YES answer.  A machine may satisfy both, one, or neither.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    rng = np.random.default_rng(seed)
    matched_p_no = matched_p_yes = 0.0
    for _ in range(n_samples):
        phi, psi = sample_matched_pair(k, rng)
        out = evaluate(machine, phi, psi)
        matched_p_no = max(matched_p_no, out.p_no)
        matched_p_yes = max(matched_p_yes, out.p_yes)
    mis_p_yes = mis_p_no = 0.0
    for _ in range(n_samples):
        phi, psi = sample_mismatched_pair(k, rng)
        out = evaluate(machine, phi, psi)
        mis_p_yes = max(mis_p_yes, out.p_yes)
        mis_p_no = max(mis_p_no, out.p_no)
    yes_certain = matched_p_no <= tol
    no_certain = mis_p_yes <= tol
    if yes_certain and no_certain:
        label = "both"
    elif yes_certain:
        label = "yes-certain-on-match"
    elif no_certain:
        label = "no-certain-on-mismatch"
    else:
        label = "neither"
    return OneSidednessReport(
        n_samples=n_samples,
        tol=tol,
        max_matched_p_no=matched_p_no,
        max_matched_p_yes=matched_p_yes,
        max_mismatched_p_yes=mis_p_yes,
        max_mismatched_p_no=mis_p_no,
        yes_certain_on_match=yes_certain,
        no_certain_on_mismatch=no_certain,
        label=label,
    )
