"""Classification ladder, spectral radius, certificates, irreducibility."""

import numpy as np
import pytest

from holv.classify import (
    NotNonnegativeError,
    classify,
    is_generalized_row_sdd_pos_diag,
    is_irreducible,
    s_tensor_certificate,
    spectral_radius_nonneg,
)
from holv.tensor import CubicalTensor, identity_tensor, tvp


def tensor_from(arr):
    return CubicalTensor.from_array(np.asarray(arr, dtype=float))


class TestSpectralRadius:
    def test_all_ones(self):
        # Perron vector is the ones vector; the value is n**(m-1)
        for m in (2, 3):
            for n in (2, 3, 4):
                t = CubicalTensor(m, n, np.ones((n,) * m))
                assert spectral_radius_nonneg(t) == pytest.approx(
                    float(n ** (m - 1)), abs=1e-8
                )

    def test_zero_tensor(self):
        t = CubicalTensor(3, 2, np.zeros((2, 2, 2)))
        assert spectral_radius_nonneg(t) == 0.0

    def test_diagonal_tensor(self):
        arr = np.zeros((2, 2, 2))
        arr[0, 0, 0] = 3.0
        arr[1, 1, 1] = 5.0
        assert spectral_radius_nonneg(tensor_from(arr)) == pytest.approx(5.0, abs=1e-6)

    def test_negative_entry_rejected(self):
        with pytest.raises(NotNonnegativeError):
            spectral_radius_nonneg(tensor_from(-np.ones((2, 2))))

    def test_matrix_case_matches_eig(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            M = rng.uniform(0.1, 2.0, size=(4, 4))
            t = CubicalTensor.from_matrix(M)
            rho = max(abs(np.linalg.eigvals(M)))
            assert spectral_radius_nonneg(t) == pytest.approx(rho, rel=1e-7)

    def test_collatz_bracket(self):
        # independent re-run of the quotient iteration: the bracket must
        # always contain the returned value and tighten monotonically
        rng = np.random.default_rng(1)
        arr = rng.uniform(0.1, 1.0, size=(3, 3, 3))
        t = tensor_from(arr)
        rho = spectral_radius_nonneg(t)
        x = np.ones(3)
        prev_lo, prev_hi = 0.0, np.inf
        for _ in range(200):
            y = tvp(t, x)
            quot = y / x**2
            lo, hi = quot.min(), quot.max()
            assert lo - 1e-9 <= rho <= hi + 1e-9
            assert lo >= prev_lo - 1e-9 and hi <= prev_hi + 1e-9
            prev_lo, prev_hi = lo, hi
            x = np.sqrt(y)
            x /= x.max()
        assert hi - lo < 1e-8

    def test_reducible_block_diagonal(self):
        # two decoupled blocks: the radius is the max of the block radii
        # per block, the symmetric eigenproblem c (x_a + x_b)^2 = lambda x_a^2
        # gives lambda = 4 c, so the radii are 4 and 12
        arr = np.zeros((4, 4, 4))
        arr[:2, :2, :2] = 1.0
        arr[2:, 2:, 2:] = 3.0
        t = tensor_from(arr)
        assert not is_irreducible(t)
        assert spectral_radius_nonneg(t) == pytest.approx(12.0, rel=1e-6)


class TestIrreducibility:
    def test_identity_reducible(self):
        assert not is_irreducible(identity_tensor(3, 2))

    def test_all_ones_irreducible(self):
        assert is_irreducible(CubicalTensor(3, 3, np.ones((3, 3, 3))))

    def test_block_diagonal_reducible(self):
        arr = np.zeros((4, 4))
        arr[:2, :2] = 1.0
        arr[2:, 2:] = 1.0
        assert not is_irreducible(tensor_from(arr))

    def test_cycle_irreducible(self):
        arr = np.zeros((3, 3))
        arr[0, 1] = arr[1, 2] = arr[2, 0] = 1.0
        assert is_irreducible(tensor_from(arr))

    def test_one_way_chain_reducible(self):
        arr = np.zeros((3, 3))
        arr[0, 1] = arr[1, 2] = 1.0
        assert not is_irreducible(tensor_from(arr))


class TestCertificates:
    def test_identity_ones(self):
        v = s_tensor_certificate(identity_tensor(3, 2))
        assert v is not None and np.allclose(v, 1.0)

    def test_negated_identity_uncertified(self):
        assert s_tensor_certificate(-identity_tensor(3, 2)) is None

    def test_hint_accepted(self):
        arr = np.zeros((2, 2, 2))
        arr[0, 0, 0] = arr[1, 1, 1] = 11.0
        arr[0, 0, 1] = arr[0, 1, 1] = arr[1, 0, 0] = arr[1, 0, 1] = -1.0
        arr[0, 1, 0] = 10.0
        arr[1, 1, 0] = 5.0
        t = tensor_from(arr)
        hint = np.array([0.1117, 1.0])
        v = s_tensor_certificate(t, hint=hint)
        assert v is not None and np.array_equal(v, hint)
        assert np.all(tvp(t, v) > 0)

    def test_search_finds_nontrivial_certificate(self):
        # ones fails for this tensor but a skewed positive vector works:
        # row 1 is v1^2 - 3 v2^2, row 2 is v2^2 - 0.1 v1^2
        arr = np.zeros((2, 2, 2))
        arr[0, 0, 0] = 1.0
        arr[0, 1, 1] = -3.0
        arr[1, 1, 1] = 1.0
        arr[1, 0, 0] = -0.1
        t = tensor_from(arr)
        assert not np.all(tvp(t, np.ones(2)) > 0)
        v = s_tensor_certificate(t)
        assert v is not None
        assert np.all(v > 0) and np.all(tvp(t, v) > 0)


class TestClassify:
    def test_identity(self):
        rep = classify(identity_tensor(3, 2))
        assert rep.is_nonsingular_m and rep.is_m_tensor
        assert rep.is_h_plus and rep.is_h_tensor
        assert rep.s_certificate is not None
        assert rep.is_generalized_row_sdd_pos_diag
        assert rep.spectral_radius_of_majorant == pytest.approx(0.0, abs=1e-8)

    def test_diag11_offdiag_minus_one(self):
        arr = -np.ones((2, 2, 2))
        arr[0, 0, 0] = arr[1, 1, 1] = 11.0
        rep = classify(tensor_from(arr))
        # majorant: zero diagonal, off-diagonal ones -> radius 3 at the ones vector
        assert rep.spectral_radius_of_majorant == pytest.approx(3.0, abs=1e-6)
        assert rep.is_nonsingular_m and rep.is_h_plus
        assert rep.s_certificate is not None
        assert rep.is_diag_dominant and rep.is_strictly_diag_dominant

    def test_mixed_sign_tensor_definitional(self):
        # the asymmetric reference tensor: its comparison-tensor majorant has
        # Perron value given by the quartic t^4 + 6 t^3 - 11 t - 1 = 0 via
        # lambda = t^2 + 6 t, which lies below the diagonal 11, so the
        # comparison tensor passes the nonsingular M test
        arr = np.zeros((2, 2, 2))
        arr[0, 0, 0] = arr[1, 1, 1] = 11.0
        arr[0, 0, 1] = arr[0, 1, 1] = arr[1, 0, 0] = arr[1, 0, 1] = -1.0
        arr[0, 1, 0] = 10.0
        arr[1, 1, 0] = 5.0
        rep = classify(tensor_from(arr))
        roots = np.roots([1.0, 6.0, 0.0, -11.0, -1.0])
        t_star = max(r.real for r in roots if abs(r.imag) < 1e-12 and r.real > 0)
        rho_expected = t_star**2 + 6 * t_star
        assert rho_expected < 11.0
        assert rep.spectral_radius_of_majorant == pytest.approx(rho_expected, rel=1e-6)
        assert rep.is_h_plus  # definitional: nonsingular comparison + positive diagonal
        assert not rep.is_m_tensor  # positive off-diagonal entries break the M test
        assert rep.s_certificate is not None
        assert not rep.is_strictly_diag_dominant

    def test_sdd_positive_diag_implies_h_plus_and_certificate(self):
        rng = np.random.default_rng(42)
        count = 0
        while count < 200:
            m = int(rng.integers(2, 4))
            n = int(rng.integers(2, 5))
            arr = rng.uniform(-1.0, 1.0, size=(n,) * m)
            idx = np.arange(n)
            # force strict dominance with positive diagonal
            for i in range(n):
                row = arr[i].ravel().copy()
                row[sum(i * n**k for k in range(m - 1))] = 0.0
                arr[(i,) * m] = np.abs(row).sum() + rng.uniform(0.1, 1.0)
            rep = classify(tensor_from(arr))
            assert rep.is_strictly_diag_dominant
            assert rep.is_h_plus, (m, n)
            assert rep.s_certificate is not None
            assert rep.is_generalized_row_sdd_pos_diag
            count += 1

    def test_not_m_when_positive_offdiag(self):
        arr = np.array([[2.0, 1.0], [0.0, 2.0]])
        rep = classify(tensor_from(arr))
        assert not rep.is_m_tensor

    def test_singular_m_boundary(self):
        # majorant radius equals the diagonal: M but not nonsingular M
        arr = np.array([[1.0, -1.0], [-1.0, 1.0]])
        rep = classify(tensor_from(arr))
        assert rep.is_m_tensor
        assert not rep.is_nonsingular_m

    def test_generalized_row_sdd(self):
        # positive off-diagonal entries do not count against dominance
        arr = np.array([[1.0, 5.0], [-0.5, 1.0]])
        assert is_generalized_row_sdd_pos_diag(tensor_from(arr))
        arr2 = np.array([[1.0, -2.0], [0.0, 1.0]])
        assert not is_generalized_row_sdd_pos_diag(tensor_from(arr2))
        arr3 = np.array([[-1.0, 0.0], [0.0, 1.0]])
        assert not is_generalized_row_sdd_pos_diag(tensor_from(arr3))

    def test_report_serializes(self):
        rep = classify(identity_tensor(2, 2))
        obj = rep.to_json_obj()
        assert obj["is_h_plus"] is True
        assert isinstance(obj["s_certificate"], list)
