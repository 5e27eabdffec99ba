"""Shared fixtures: reference systems and seeded model builders."""

import numpy as np
import pytest

from holv import lv
from holv.polysolve import PolySystem
from holv.tensor import CubicalTensor


@pytest.fixture
def cubic_system_symmetric():
    """Two-species system: 11 x_i^2 - x_j^2 + 2 x_i - x_j = 1 per row.

    Per-row closed form 10 x^2 + x = 1 at the symmetric point, so the positive
    root is (-1 + sqrt(41)) / 20 in both components.
    """
    A3 = np.zeros((2, 2, 2))
    A3[0, 0, 0] = A3[1, 1, 1] = 11.0
    A3[0, 1, 1] = A3[1, 0, 0] = -1.0
    A2 = np.array([[2.0, -1.0], [-1.0, 2.0]])
    system = PolySystem(
        terms=(CubicalTensor.from_matrix(A2), CubicalTensor.from_array(A3)),
        rhs=np.ones(2),
    )
    root = (-1.0 + np.sqrt(41.0)) / 20.0
    return system, root


@pytest.fixture
def cubic_system_asymmetric():
    """Two-species system with mixed-sign off-diagonals and certificate (0.1117, 1)."""
    A3 = np.zeros((2, 2, 2))
    A3[0, 0, 0] = A3[1, 1, 1] = 11.0
    A3[0, 0, 1] = A3[0, 1, 1] = A3[1, 0, 0] = A3[1, 0, 1] = -1.0
    A3[0, 1, 0] = 10.0
    A3[1, 1, 0] = 5.0
    A2 = np.array([[0.8883, 1.0], [0.0, 1.0]])
    cert = np.array([0.1117, 1.0])
    system = PolySystem(
        terms=(CubicalTensor.from_matrix(A2), CubicalTensor.from_array(A3)),
        rhs=np.ones(2),
    )
    return system, cert


@pytest.fixture
def wta_model():
    """Competitive n=3 model meeting the reciprocal dominance conditions."""
    a = np.array([[2.0, 1.0, 1.0], [3.0, 2.0, 1.0], [3.0, 3.0, 2.0]])
    b = np.zeros((3, 3, 3))
    b[0, 0, 0] = 1.0
    b[1, 1, 1] = 0.5
    b[2, 2, 2] = 0.5
    b[0, 1, 1] = 0.2
    b[1, 2, 2] = 0.2
    b[2, 0, 0] = 0.2
    model = lv.LVModel(
        r=np.ones(3), A=-a, B=CubicalTensor.from_array(-b), scenario="competitive"
    )
    limit = np.array([np.sqrt(2.0) - 1.0, 0.0, 0.0])
    return model, limit


def make_two_faction(
    cross1=0.5,
    cross2=0.8,
    cross_f2=0.5,
    coop12=0.5,
    coop21=1.0,
    coop_f2=0.3,
    self_a=3.0,
    self_b=0.5,
    c=0.05,
    d=0.1,
    d1_factor=1.0,
) -> lv.LVModel:
    """Hand-tuned (2, 3)-faction model with bounded dynamics.

    ``d1_factor`` scales species 1's incoming competitive three-body terms.
    """
    n = 5
    fac = np.array([0, 0, 1, 1, 1])
    A = np.zeros((n, n))
    B = np.zeros((n, n, n))
    for i in range(n):
        A[i, i] = -self_a
        B[i, i, i] = -self_b
        for j in range(n):
            if j == i:
                continue
            if fac[i] == fac[j]:
                if i < 2:
                    A[i, j] = coop12 if i == 0 else coop21
                else:
                    A[i, j] = coop_f2
            else:
                A[i, j] = -(cross1 if i == 0 else (cross2 if i == 1 else cross_f2))
        for j in range(n):
            for k in range(n):
                if fac[j] != fac[k] or (i == j == k):
                    continue
                B[i, j, k] = c if fac[j] == fac[i] else -d
    B[0, 2:, 2:] *= d1_factor
    return lv.LVModel(
        r=np.ones(n),
        A=A,
        B=CubicalTensor.from_array(B),
        scenario="two_faction",
        blocks=(2, 3),
    )


def make_bistable_two_faction() -> lv.LVModel:
    """Symmetric (2, 3)-faction model with cross-competition above self-limitation."""
    n = 5
    fac = np.array([0, 0, 1, 1, 1])
    A = np.zeros((n, n))
    B = np.zeros((n, n, n))
    for i in range(n):
        A[i, i] = -3.0
        B[i, i, i] = -0.5
        for j in range(n):
            if j == i:
                continue
            A[i, j] = 0.3 if fac[i] == fac[j] else -4.0
        for j in range(n):
            for k in range(n):
                if fac[j] != fac[k] or (i == j == k):
                    continue
                B[i, j, k] = 0.05 if fac[j] == fac[i] else -0.1
    return lv.LVModel(
        r=np.ones(n),
        A=A,
        B=CubicalTensor.from_array(B),
        scenario="two_faction",
        blocks=(2, 3),
    )


def bounded_cooperative(n: int, seed: int, margin_a=2.0, margin_b=0.5) -> lv.LVModel:
    """Random cooperative model whose strengthened diagonals bound the flow.

    Off-diagonal magnitudes are drawn uniformly; each diagonal is then set
    below the negated off-diagonal row sum so every row is strictly
    diagonally dominant and trajectories stay bounded.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    A = rng.uniform(0.1, 1.0, size=(n, n))
    B = rng.uniform(0.01, 0.2, size=(n, n, n))
    idx = np.arange(n)
    A[idx, idx] = 0.0
    B[idx, idx, idx] = 0.0
    r = rng.uniform(0.5, 2.0, size=n)
    for i in range(n):
        A[i, i] = -(A[i].sum() + margin_a + rng.uniform(0, 1))
        B[i, i, i] = -(np.abs(B[i]).sum() + margin_b + rng.uniform(0, 0.5))
    return lv.LVModel(
        r=r, A=A, B=CubicalTensor.from_array(B), scenario="cooperative"
    )
