import numpy as np
import pytest

from qcompare import AntiLinearMap, Operator, orthogonal_qubit_map


@pytest.fixture
def k_orth() -> AntiLinearMap:
    return orthogonal_qubit_map()


@pytest.fixture
def k_identity() -> Operator:
    return Operator(np.eye(2))


def random_antilinear(rng, min_det: float = 0.1) -> AntiLinearMap:
    """Random non-singular anti-linear qubit map with a normalized linear part."""
    while True:
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        a *= np.sqrt(2.0) / np.linalg.norm(a)
        if abs(np.linalg.det(a)) >= min_det:
            return AntiLinearMap(Operator(a))
