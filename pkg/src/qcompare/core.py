"""Dense state-vector primitives for small quantum registers.

Values are immutable: amplitude and matrix buffers are frozen numpy arrays,
and every operation returns a new object.  Registers are explicit tensor
products of finite-dimensional factors; unnormalized vectors are legal
algebraic intermediates, but any operation that produces probabilities
insists on normalization.  All randomness flows through explicit seeds.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import NamedTuple

import numpy as np

NORM_ATOL = 1e-12           # tolerance for "physically normalized"
UNITARY_ATOL = 1e-10        # max-norm tolerance for U†U = I
SINGULAR_DET_TOL = 1e-9     # |det| at or below this counts as singular
ABSENT_BRANCH_ATOL = 1e-14  # branches below this probability are absent


class DimensionMismatchError(ValueError):
    """Operands act on registers of incompatible dimension."""


class NormalizationError(ValueError):
    """A probability-producing operation received an unnormalized state."""


class SingularMapError(ValueError):
    """An anti-linear map with a singular linear part was rejected."""


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over a register of tensor factors.

    Attributes:
        amplitudes: flat complex vector, length = product of dims.
        dims: dimension of each tensor factor, in order.
    """

    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1).copy()
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be positive, got {dims}")
        if amp.size != prod(dims):
            raise DimensionMismatchError(
                f"{amp.size} amplitudes do not fill factors of dims {dims}"
            )
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm - 1.0) <= NORM_ATOL

    def normalized(self) -> "StateVector":
        n = self.norm
        if n == 0.0:
            raise NormalizationError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n, self.dims)

    def reshaped(self, dims: tuple[int, ...]) -> "StateVector":
        """Reinterpret the same amplitudes with a different factor split."""
        return StateVector(self.amplitudes, tuple(dims))

    def __add__(self, other: "StateVector") -> "StateVector":
        _require_same_register(self, other)
        return StateVector(self.amplitudes + other.amplitudes, self.dims)

    def __sub__(self, other: "StateVector") -> "StateVector":
        _require_same_register(self, other)
        return StateVector(self.amplitudes - other.amplitudes, self.dims)

    def __mul__(self, scalar: complex) -> "StateVector":
        return StateVector(self.amplitudes * scalar, self.dims)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Operator:
    """A linear operator as a dense square matrix."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=complex).copy()
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def unitarity_defect(self) -> float:
        gram = self.entries.conj().T @ self.entries
        return float(np.max(np.abs(gram - np.eye(self.dim))))

    @property
    def is_unitary(self) -> bool:
        return self.unitarity_defect <= UNITARY_ATOL

    def dagger(self) -> "Operator":
        return Operator(self.entries.conj().T)

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"cannot compose operators of dims {self.dim} and {other.dim}"
            )
        return Operator(self.entries @ other.entries)


@dataclass(frozen=True)
class AntiLinearMap:
    """An anti-linear map: conjugate in the computational basis, then apply a matrix.

    The action is v -> A conj(v), so scalars come out conjugated:
    K(a x + b y) = conj(a) K x + conj(b) K y.
    """

    linear_part: Operator

    @property
    def dim(self) -> int:
        return self.linear_part.dim

    @property
    def determinant(self) -> complex:
        return complex(np.linalg.det(self.linear_part.entries))

    @property
    def is_nonsingular(self) -> bool:
        return abs(self.determinant) > SINGULAR_DET_TOL

    @property
    def is_antiunitary(self) -> bool:
        return self.linear_part.is_unitary


def _require_same_register(a: StateVector, b: StateVector) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"register dims differ: {a.dim} vs {b.dim}")


def basis_state(index: int, dims: tuple[int, ...] | int) -> StateVector:
    """Computational basis state |index> over the given factor dims."""
    dims = (dims,) if isinstance(dims, int) else tuple(dims)
    total = prod(dims)
    if not 0 <= index < total:
        raise ValueError(f"basis index {index} out of range for dimension {total}")
    amp = np.zeros(total, dtype=complex)
    amp[index] = 1.0
    return StateVector(amp, dims)


def zero_state(dims: tuple[int, ...] | int) -> StateVector:
    """All-zeros basis state |0...0>."""
    return basis_state(0, dims)


def tensor(a: StateVector, b: StateVector, *rest: StateVector) -> StateVector:
    """Tensor product; factor dims concatenate in order."""
    out = StateVector(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    for s in rest:
        out = StateVector(np.kron(out.amplitudes, s.amplitudes), out.dims + s.dims)
    return out


def inner(a: StateVector, b: StateVector) -> complex:
    """Inner product <a|b>, conjugate-linear in the first argument."""
    _require_same_register(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def apply(op: Operator, s: StateVector) -> StateVector:
    """Apply a full-register operator; factor structure is preserved."""
    if op.dim != s.dim:
        raise DimensionMismatchError(
            f"operator dim {op.dim} does not match register dim {s.dim}"
        )
    return StateVector(op.entries @ s.amplitudes, s.dims)


def apply_to_factors(s: StateVector, op: Operator, factors: tuple[int, ...]) -> StateVector:
    """Apply an operator to a subset of factors, identity elsewhere.

    Args:
        s: input state.
        op: operator on the product of the selected factors, in the order given.
        factors: distinct factor indices the operator acts on.
    """
    factors = tuple(int(f) for f in factors)
    n = len(s.dims)
    if len(set(factors)) != len(factors):
        raise ValueError(f"factor indices must be distinct, got {factors}")
    if any(not 0 <= f < n for f in factors):
        raise ValueError(f"factor index out of range in {factors} for {n} factors")
    d_op = prod(s.dims[f] for f in factors)
    if op.dim != d_op:
        raise DimensionMismatchError(
            f"operator dim {op.dim} does not match selected factors of dim {d_op}"
        )
    others = [i for i in range(n) if i not in factors]
    perm = list(factors) + others
    block = s.amplitudes.reshape(s.dims).transpose(perm).reshape(d_op, -1)
    block = op.entries @ block
    shaped = block.reshape([s.dims[p] for p in perm])
    out = shaped.transpose(np.argsort(perm)).reshape(-1)
    return StateVector(out, s.dims)


def apply_antilinear(k: AntiLinearMap, s: StateVector) -> StateVector:
    """Apply an anti-linear map: conjugate amplitudes, then the linear part.

    The result may be unnormalized when the linear part is not unitary.
    """
    if k.dim != s.dim:
        raise DimensionMismatchError(
            f"map dim {k.dim} does not match register dim {s.dim}"
        )
    return StateVector(k.linear_part.entries @ s.amplitudes.conj(), s.dims)


def k_image(k: AntiLinearMap | Operator, s: StateVector) -> StateVector:
    """Image of s under k, dispatching on linear vs anti-linear."""
    if isinstance(k, AntiLinearMap):
        return apply_antilinear(k, s)
    return apply(k, s)


class QubitMeasurement(NamedTuple):
    """Outcome probabilities and collapsed states of a single-qubit measurement.

    Collapsed states keep the full register, with the measured qubit projected
    and the vector renormalized; a branch of probability <= 1e-14 is None.
    """

    p0: float
    p1: float
    collapsed0: StateVector | None
    collapsed1: StateVector | None


def measure_qubit(s: StateVector, qubit_index: int) -> QubitMeasurement:
    """Projective measurement of one dim-2 factor in the computational basis."""
    if not s.is_normalized:
        raise NormalizationError(
            f"measurement requires a normalized state, norm = {s.norm!r}"
        )
    if not 0 <= qubit_index < len(s.dims):
        raise ValueError(
            f"factor index {qubit_index} out of range for {len(s.dims)} factors"
        )
    if s.dims[qubit_index] != 2:
        raise ValueError(
            f"factor {qubit_index} has dimension {s.dims[qubit_index]}, not a qubit"
        )
    psi = np.moveaxis(s.amplitudes.reshape(s.dims), qubit_index, 0)
    probs = []
    collapsed: list[StateVector | None] = []
    for outcome in (0, 1):
        branch = np.zeros_like(psi)
        branch[outcome] = psi[outcome]
        p = float(np.linalg.norm(branch) ** 2)
        probs.append(p)
        if p <= ABSENT_BRANCH_ATOL:
            collapsed.append(None)
        else:
            back = np.moveaxis(branch, 0, qubit_index).reshape(-1)
            collapsed.append(StateVector(back / np.sqrt(p), s.dims))
    return QubitMeasurement(probs[0], probs[1], collapsed[0], collapsed[1])


def partial_trace(s: StateVector, keep: tuple[int, ...]) -> np.ndarray:
    """Reduced density matrix over the kept factors (in ascending index order).

    Returns a dense (Dk, Dk) complex matrix, Hermitian and trace one.
    """
    if not s.is_normalized:
        raise NormalizationError(
            f"partial trace requires a normalized state, norm = {s.norm!r}"
        )
    kept = sorted({int(i) for i in keep})
    n = len(s.dims)
    if not kept or any(not 0 <= i < n for i in kept):
        raise ValueError(f"invalid factor set {tuple(keep)} for {n} factors")
    others = [i for i in range(n) if i not in kept]
    d_keep = prod(s.dims[i] for i in kept)
    a = s.amplitudes.reshape(s.dims).transpose(kept + others).reshape(d_keep, -1)
    return a @ a.conj().T


def haar_state(dim: int, seed) -> StateVector:
    """Haar-random pure state: normalized complex Gaussian vector.

    Args:
        dim: register dimension (single factor).
        seed: integer seed or numpy Generator.
    """
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(v / np.linalg.norm(v), (dim,))


def haar_unitary(dim: int, seed) -> Operator:
    """Haar-random unitary via QR of a complex Gaussian matrix.

    The R diagonal is rephased to unit modulus, which removes the QR gauge
    and leaves the Haar distribution.
    """
    rng = np.random.default_rng(seed)
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return Operator(q * (d / np.abs(d)))


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim))


def pauli_x() -> Operator:
    return Operator(np.array([[0.0, 1.0], [1.0, 0.0]]))


def hadamard() -> Operator:
    return Operator(np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0))


def ry(theta: float) -> Operator:
    """Rotation about Y: [[cos t/2, -sin t/2], [sin t/2, cos t/2]]."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return Operator(np.array([[c, -s], [s, c]]))


def cnot() -> Operator:
    """Controlled-X on (control, target)."""
    return controlled(pauli_x())


def swap_operator(dim: int) -> Operator:
    """SWAP on two factors of equal dimension: x tensor y -> y tensor x."""
    m = np.zeros((dim * dim, dim * dim))
    for i in range(dim):
        for j in range(dim):
            m[j * dim + i, i * dim + j] = 1.0
    return Operator(m)


def controlled(u: Operator) -> Operator:
    """Controlled-u with the control qubit first: |0><0| I + |1><1| u."""
    d = u.dim
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    return Operator(np.kron(p0, np.eye(d)) + np.kron(p1, u.entries))


def conjugation_map(dim: int) -> AntiLinearMap:
    """Plain computational-basis conjugation (identity linear part)."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return AntiLinearMap(identity(dim))


def orthogonal_qubit_map() -> AntiLinearMap:
    """The anti-unitary qubit map sending every state to an orthogonal one.

    Its linear part is [[0, -1], [1, 0]], so a|0> + b|1> maps to
    conj(a)|1> - conj(b)|0>, which is always orthogonal to the input.
    """
    return AntiLinearMap(Operator(np.array([[0.0, -1.0], [1.0, 0.0]])))
