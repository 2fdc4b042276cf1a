"""Numerical verification that one-sided comparison machines are trivial.

A comparison machine for a target map k is one-sided in one of two senses:

* case 1: it never answers YES on a mismatched pair (YES answers are
  certain, errors only ever excuse a matched pair);
* case 2: it never answers NO on a matched pair (NO answers are certain).

For a non-singular anti-linear k, either constraint forces the machine to
be constant.  The argument is linear-algebraic: the machine's action on a
handful of probe states recombines, through linearity over the probe
register and anti-linearity of k, into an exact cancellation of the
amplitudes that would make the machine useful.  This module builds those
probes, extracts YES/NO branch amplitudes, and turns the cancellation into
a quantitative bound: the triviality gap of any machine is at most a
derived constant times its one-sidedness violation.

Amplitude conventions: violations and gaps are measured as branch norms
(amplitudes, not probabilities) of normalized inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod, sqrt

import numpy as np
import scipy.linalg

from .core import (
    AntiLinearMap,
    DimensionMismatchError,
    Operator,
    SingularMapError,
    StateVector,
    ABSENT_BRANCH_ATOL,
    basis_state,
    haar_unitary,
    k_image,
    tensor,
)
from .machines import (
    DecisionMachine,
    evaluate,
    sample_matched_pair,
    sample_mismatched_pair,
)

# Bound constants, from recombining the probe images by triangle inequality.
#
# Case 1 (all probes normalized): the forbidden YES branch of a matched
# basis probe equals sqrt(2) times the YES branch of the (|0>+|1>)/sqrt(2)
# superposition probe minus the YES branch of the complementary mismatched
# basis probe, so its norm is at most (sqrt(2) + 1) times the largest
# per-probe violation.
CASE1_BOUND_CONSTANT = 1.0 + sqrt(2.0)

VERDICT_ATOL = 1e-10
DEFAULT_PREMISE_TOL = 1e-6
RECOMBINATION_ATOL = 1e-10

PROBE_KEYS = (
    "00",
    "01",
    "10",
    "11",
    "plus_phi1",
    "plus_phi0",
    "matched_plus",
    "matched_imag",
)


@dataclass(frozen=True)
class BranchDecomposition:
    """YES/NO branch norms and directions of a machine output.

    Branch vectors live in the machine's full register with the answer qubit
    projected; they are normalized, and None when the branch carries
    probability weight <= 1e-14.
    """

    yes_amplitude: float
    yes_vector: StateVector | None
    no_amplitude: float
    no_vector: StateVector | None


@dataclass(frozen=True)
class ProbeSet:
    """The probe states whose images decide one-sidedness.

    raw holds the probes exactly as constructed (generally unnormalized,
    since phi_j = k|j> need not be a unit vector); unit holds normalized
    copies for feeding to machines.  Keys:

        "00", "01", "10", "11"   basis probes |i> tensor phi_j
        "plus_phi1", "plus_phi0" mismatched probes (|0>+|1>)/sqrt(2) tensor phi_j
        "matched_plus"           (|0>+|1>)(phi0+phi1)/2, matched for any k
        "matched_imag"           (|0>+i|1>)(phi0-i.phi1)/2 for anti-linear k,
                                 (|0>+i|1>)(phi0+i.phi1)/2 for linear k;
                                 matched either way
    """

    kind: str  # "antilinear" or "linear"
    phi0: StateVector
    phi1: StateVector
    raw: dict[str, StateVector]
    unit: dict[str, StateVector]


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of checking the triviality bound on one machine.

    verdict is "pass" when triviality_gap <= bound_constant * violation
    + 1e-10, "fail" otherwise, and "no-bound" when no constant exists (the
    case-2 recombination needs k anti-linear).  premise_met records whether
    the violation is small enough for the machine to count as one-sided at
    all; the bound itself holds regardless.
    """

    case_id: int
    violation: float
    amplitudes: dict[str, float]
    triviality_gap: float
    bound_constant: float | None
    verdict: str
    premise_met: bool


def _require_nonsingular(k: AntiLinearMap | Operator) -> None:
    if isinstance(k, AntiLinearMap):
        if not k.is_nonsingular:
            raise SingularMapError(
                f"anti-linear map is singular (|det| = {abs(k.determinant):.3e})"
            )
    else:
        det = abs(np.linalg.det(k.entries))
        if det <= 1e-9:
            raise SingularMapError(f"linear map is singular (|det| = {det:.3e})")


def build_probe_set(k: AntiLinearMap | Operator) -> ProbeSet:
    """Construct the probe states for a qubit-probe comparison against k.

    Requires k non-singular on a dim-2 space.  Asserts the (anti-)linearity
    identities the recombination relies on: k(|0>+|1>) = phi0 + phi1 and
    k(|0>+i|1>) = phi0 -+ i.phi1 within 1e-12.
    """
    _require_nonsingular(k)
    if k.dim != 2:
        raise DimensionMismatchError(f"probe construction requires a qubit map, dim {k.dim}")
    kind = "antilinear" if isinstance(k, AntiLinearMap) else "linear"
    ket0, ket1 = basis_state(0, 2), basis_state(1, 2)
    phi0, phi1 = k_image(k, ket0), k_image(k, ket1)

    plus_raw = StateVector([1.0, 1.0], (2,))
    imag_raw = StateVector([1.0, 1.0j], (2,))
    img_plus = k_image(k, plus_raw)
    img_imag = k_image(k, imag_raw)
    sgn = -1.0 if kind == "antilinear" else 1.0
    if (img_plus - (phi0 + phi1)).norm > 1e-12:
        raise AssertionError("identity k(|0>+|1>) = phi0 + phi1 failed")
    if (img_imag - (phi0 + sgn * 1j * phi1)).norm > 1e-12:
        raise AssertionError("identity for k(|0>+i|1>) failed")

    plus_unit = plus_raw * (1.0 / sqrt(2.0))
    raw = {
        "00": tensor(ket0, phi0),
        "01": tensor(ket0, phi1),
        "10": tensor(ket1, phi0),
        "11": tensor(ket1, phi1),
        "plus_phi1": tensor(plus_unit, phi1),
        "plus_phi0": tensor(plus_unit, phi0),
        "matched_plus": 0.5 * tensor(plus_raw, phi0 + phi1),
        "matched_imag": 0.5 * tensor(imag_raw, phi0 + sgn * 1j * phi1),
    }
    unit = {name: s.normalized() for name, s in raw.items()}
    return ProbeSet(kind=kind, phi0=phi0, phi1=phi1, raw=raw, unit=unit)


def _branch_arrays(machine: DecisionMachine, probe: StateVector) -> tuple[np.ndarray, np.ndarray]:
    """Raw YES/NO projected output arrays for a probe on probe tensor target.

    The probe may be unnormalized; the machine acts by linear extension.
    The ancilla is appended internally.
    """
    if probe.dim != machine.probe_dim * machine.target_dim:
        raise DimensionMismatchError(
            f"probe dim {probe.dim} does not match machine input dim "
            f"{machine.probe_dim * machine.target_dim}"
        )
    full = np.kron(probe.amplitudes, machine.ancilla_init.amplitudes)
    out = machine.unitary.entries @ full
    shaped = np.moveaxis(out.reshape(machine.dims), machine.output_qubit, 0)
    yes = np.zeros_like(shaped)
    no = np.zeros_like(shaped)
    yes[0] = shaped[0]
    no[1] = shaped[1]
    back = lambda arr: np.moveaxis(arr, 0, machine.output_qubit).reshape(-1)
    return back(yes), back(no)


def extract_branches(machine: DecisionMachine, probe: StateVector) -> BranchDecomposition:
    """Decompose the machine output on a probe into YES and NO branches."""
    yes, no = _branch_arrays(machine, probe)
    ya, na = float(np.linalg.norm(yes)), float(np.linalg.norm(no))
    yvec = StateVector(yes / ya, machine.dims) if ya > sqrt(ABSENT_BRANCH_ATOL) else None
    nvec = StateVector(no / na, machine.dims) if na > sqrt(ABSENT_BRANCH_ATOL) else None
    return BranchDecomposition(
        yes_amplitude=ya, yes_vector=yvec, no_amplitude=na, no_vector=nvec
    )


def _case_probe_names(case_id: int, which: str) -> tuple[str, ...]:
    """Probe names for a case: 'constraint' probes carry the one-sidedness
    premise, 'gap' probes carry the amplitudes the theorem forces to zero."""
    if case_id == 1:
        return (
            ("01", "10", "plus_phi1", "plus_phi0")
            if which == "constraint"
            else ("00", "11")
        )
    if case_id == 2:
        return (
            ("00", "11", "matched_plus", "matched_imag")
            if which == "constraint"
            else ("01", "10")
        )
    raise ValueError(f"case_id must be 1 or 2, got {case_id}")


def _wrong_amplitude(machine: DecisionMachine, probe: StateVector, case_id: int) -> float:
    b = extract_branches(machine, probe)
    return b.yes_amplitude if case_id == 1 else b.no_amplitude


def one_sided_violation(
    machine: DecisionMachine, k: AntiLinearMap | Operator, case_id: int
) -> float:
    """Largest forbidden-branch amplitude over the case's constraint probes."""
    pset = build_probe_set(k)
    return max(
        _wrong_amplitude(machine, pset.unit[name], case_id)
        for name in _case_probe_names(case_id, "constraint")
    )


def case2_bound_constant(pset: ProbeSet) -> float:
    """Triangle-inequality constant for the case-2 recombination.

    Recombining the NO branches of the two matched superposition probes with
    those of the matched basis probes isolates each mismatched-probe NO
    branch, with coefficients set by the probe norms.  For an anti-unitary k
    this evaluates to 2 + sqrt(2).
    """
    r0, r1 = pset.phi0.norm, pset.phi1.norm
    u2, u3 = pset.raw["matched_plus"].norm, pset.raw["matched_imag"].norm
    return (u2 + u3 + (r0 + r1) / sqrt(2.0)) / min(r0, r1)


def verify_case1(
    machine: DecisionMachine,
    k: AntiLinearMap | Operator,
    premise_tol: float = DEFAULT_PREMISE_TOL,
) -> VerificationReport:
    """Check the case-1 bound: YES amplitudes on matched basis probes are
    at most (1 + sqrt(2)) times the largest YES amplitude on mismatched
    probes.  Holds for linear k as well, since the recombination only needs
    real superpositions."""
    pset = build_probe_set(k)
    violation = max(
        _wrong_amplitude(machine, pset.unit[name], 1)
        for name in _case_probe_names(1, "constraint")
    )
    a00 = extract_branches(machine, pset.unit["00"]).yes_amplitude
    a11 = extract_branches(machine, pset.unit["11"]).yes_amplitude
    gap = max(a00, a11)
    ok = gap <= CASE1_BOUND_CONSTANT * violation + VERDICT_ATOL
    return VerificationReport(
        case_id=1,
        violation=violation,
        amplitudes={"a00": a00, "a11": a11},
        triviality_gap=gap,
        bound_constant=CASE1_BOUND_CONSTANT,
        verdict="pass" if ok else "fail",
        premise_met=violation <= premise_tol,
    )


def verify_case2(
    machine: DecisionMachine,
    k: AntiLinearMap | Operator,
    premise_tol: float = DEFAULT_PREMISE_TOL,
) -> VerificationReport:
    """Check the case-2 bound: NO amplitudes on mismatched basis probes are
    bounded by the largest NO amplitude on matched probes.

    For anti-linear k the NO branches of the two matched superposition
    probes recombine as (sum) and i*(difference) of the mismatched-probe NO
    branches, which isolates each of them; the recombination identity is
    recomputed here and enforced to 1e-10.  For linear k both probes yield
    the same combination, nothing isolates, and no bound exists: the report
    carries verdict "no-bound".
    """
    pset = build_probe_set(k)
    violation = max(
        _wrong_amplitude(machine, pset.unit[name], 2)
        for name in _case_probe_names(2, "constraint")
    )
    b01 = extract_branches(machine, pset.unit["01"]).no_amplitude
    b10 = extract_branches(machine, pset.unit["10"]).no_amplitude
    gap = max(b01, b10)

    if pset.kind != "antilinear":
        return VerificationReport(
            case_id=2,
            violation=violation,
            amplitudes={"b01": b01, "b10": b10},
            triviality_gap=gap,
            bound_constant=None,
            verdict="no-bound",
            premise_met=violation <= premise_tol,
        )

    # Recombination identity on the unnormalized probes: with rho_jj the NO
    # branch of |j> phi_j and omega_ij that of |i> phi_j (i != j),
    #   2 NO(matched_plus) - rho00 - rho11 = omega01 + omega10
    #   i (2 NO(matched_imag) - rho00 - rho11) = omega01 - omega10
    _, rho00 = _branch_arrays(machine, pset.raw["00"])
    _, rho11 = _branch_arrays(machine, pset.raw["11"])
    _, omega01 = _branch_arrays(machine, pset.raw["01"])
    _, omega10 = _branch_arrays(machine, pset.raw["10"])
    _, no_plus = _branch_arrays(machine, pset.raw["matched_plus"])
    _, no_imag = _branch_arrays(machine, pset.raw["matched_imag"])
    sum_branch = 2.0 * no_plus - rho00 - rho11
    diff_branch = 1j * (2.0 * no_imag - rho00 - rho11)
    recombined01 = (sum_branch + diff_branch) / 2.0
    recombined10 = (sum_branch - diff_branch) / 2.0
    defect = max(
        float(np.linalg.norm(recombined01 - omega01)),
        float(np.linalg.norm(recombined10 - omega10)),
    )
    if defect > RECOMBINATION_ATOL:
        raise RuntimeError(
            f"branch recombination identity violated (defect {defect:.3e})"
        )

    constant = case2_bound_constant(pset)
    ok = gap <= constant * violation + VERDICT_ATOL
    return VerificationReport(
        case_id=2,
        violation=violation,
        amplitudes={"b01": b01, "b10": b10},
        triviality_gap=gap,
        bound_constant=constant,
        verdict="pass" if ok else "fail",
        premise_met=violation <= premise_tol,
    )


def nontriviality(
    machine: DecisionMachine,
    k: AntiLinearMap | Operator,
    case_id: int,
    n_samples: int = 200,
    seed: int = 0,
) -> float:
    """How useful the machine is, given its case's trivial fallback.

    Case 1's trivial machine always says NO, so usefulness is the largest
    YES probability over sampled matched pairs.  Case 2's trivial machine
    always says YES, so usefulness is the largest NO probability over
    sampled mismatched pairs.
    """
    if case_id not in (1, 2):
        raise ValueError(f"case_id must be 1 or 2, got {case_id}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(n_samples):
        if case_id == 1:
            phi, psi = sample_matched_pair(k, rng)
            best = max(best, evaluate(machine, phi, psi).p_yes)
        else:
            phi, psi = sample_mismatched_pair(k, rng)
            best = max(best, evaluate(machine, phi, psi).p_no)
    return best


def _orthonormal_columns(columns: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Sequential Gram-Schmidt, dropping dependent columns."""
    kept: list[np.ndarray] = []
    for j in range(columns.shape[1]):
        v = columns[:, j].copy()
        for q in kept:
            v -= q * np.vdot(q, v)
        n = np.linalg.norm(v)
        if n > tol:
            kept.append(v / n)
    return np.stack(kept, axis=1)


def _orthonormal_complement(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the column span."""
    d, r = basis.shape
    if r == d:
        return np.zeros((d, 0), dtype=complex)
    u, _, _ = np.linalg.svd(basis, full_matrices=True)
    return u[:, r:]


def exactly_constrained_machine(
    k: AntiLinearMap | Operator,
    case_id: int,
    ancilla_dims: tuple[int, ...] = (2,),
    seed: int = 0,
) -> DecisionMachine:
    """Machine whose constraint probes map exactly into the forced subspace.

    The case's constraint probes (with the ancilla attached) are
    orthonormalized and sent to a seeded orthonormal frame inside the output
    subspace the premise demands: the NO half-space for case 1, the YES
    half-space for case 2.  The remaining directions are completed with a
    seeded Haar frame, so the result is unitary and has violation zero up to
    rounding.
    """
    pset = build_probe_set(k)
    ancilla_dims = tuple(int(d) for d in ancilla_dims)
    anc = basis_state(0, ancilla_dims)
    dims = (2, k.dim) + ancilla_dims
    d_total = prod(dims)
    output_qubit = 2

    names = _case_probe_names(case_id, "constraint")
    cols = np.stack(
        [np.kron(pset.unit[n].amplitudes, anc.amplitudes) for n in names], axis=1
    )
    q_in = _orthonormal_columns(cols)
    rank = q_in.shape[1]

    forced_bit = 1 if case_id == 1 else 0
    factor_index = np.unravel_index(np.arange(d_total), dims)[output_qubit]
    forced_rows = np.flatnonzero(factor_index == forced_bit)
    if rank > forced_rows.size:
        raise ValueError(
            f"forced subspace of dim {forced_rows.size} cannot hold {rank} probe images;"
            " enlarge the ancilla"
        )

    rng = np.random.default_rng(seed)
    frame = haar_unitary(forced_rows.size, rng).entries[:, :rank]
    images = np.zeros((d_total, rank), dtype=complex)
    images[forced_rows, :] = frame

    q_rest = _orthonormal_complement(q_in)
    w_rest = _orthonormal_complement(images)
    if q_rest.shape[1]:
        w_rest = w_rest @ haar_unitary(q_rest.shape[1], rng).entries
    u = np.hstack([images, w_rest]) @ np.hstack([q_in, q_rest]).conj().T
    return DecisionMachine(
        unitary=Operator(u),
        probe_dim=2,
        target_dim=k.dim,
        ancilla_dims=ancilla_dims,
        ancilla_init=anc,
        output_qubit=output_qubit,
    )


def perturbed_machine(machine: DecisionMachine, scale: float, seed) -> DecisionMachine:
    """Compose the machine with exp(i * scale * H) for a seeded random H.

    H is a Gaussian Hermitian matrix normalized to unit spectral norm, so
    scale controls the perturbation strength directly.
    """
    rng = np.random.default_rng(seed)
    d = machine.unitary.dim
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (g + g.conj().T) / 2.0
    h /= np.max(np.abs(np.linalg.eigvalsh(h)))
    u = machine.unitary.entries @ scipy.linalg.expm(1j * scale * h)
    return DecisionMachine(
        unitary=Operator(u),
        probe_dim=machine.probe_dim,
        target_dim=machine.target_dim,
        ancilla_dims=machine.ancilla_dims,
        ancilla_init=machine.ancilla_init,
        output_qubit=machine.output_qubit,
    )
