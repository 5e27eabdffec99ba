"""Monotone fixed-point solver: splitting, bracketing, iteration, oracles."""

import numpy as np
import pytest

from holv.pcp import QcpProblem, brute_force_solve
from holv.polysolve import (
    CertificateNotFoundError,
    NotApplicableError,
    PolySystem,
    bracket_scalars,
    invert_f,
    normalize_rhs,
    picard_map,
    shared_certificate,
    solve_m_tensor,
    solve_s_tensor,
    split_term,
)
from holv.tensor import CubicalTensor, identity_tensor


def ident_system(orders, rhs):
    return PolySystem(
        terms=tuple(identity_tensor(m, len(rhs)) for m in orders),
        rhs=np.asarray(rhs, dtype=float),
    )


class TestPolySystem:
    def test_validation(self):
        with pytest.raises(ValueError):
            PolySystem(terms=(), rhs=np.ones(2))
        with pytest.raises(ValueError):
            PolySystem(
                terms=(identity_tensor(2, 2), identity_tensor(2, 2)), rhs=np.ones(2)
            )
        with pytest.raises(ValueError):
            PolySystem(terms=(identity_tensor(2, 2),), rhs=np.array([1.0, 0.0]))
        with pytest.raises(ValueError):
            PolySystem(
                terms=(identity_tensor(2, 2), identity_tensor(3, 3)), rhs=np.ones(2)
            )

    def test_terms_sorted_by_order(self):
        s = PolySystem(
            terms=(identity_tensor(3, 2), identity_tensor(2, 2)), rhs=np.ones(2)
        )
        assert [t.order for t in s.terms] == [2, 3]

    def test_json_roundtrip(self):
        s = ident_system((2, 3), [1.0, 2.0])
        back = PolySystem.from_json_obj(s.to_json_obj())
        assert np.array_equal(back.rhs, s.rhs)
        assert [t.order for t in back.terms] == [2, 3]


class TestNormalize:
    def test_identity_when_rhs_is_one(self):
        s = ident_system((2,), [1.0, 1.0])
        assert normalize_rhs(s) is s

    def test_row_scaling(self):
        A2 = CubicalTensor.from_matrix(np.diag([2.0, 4.0]))
        s = PolySystem(terms=(A2,), rhs=np.array([2.0, 4.0]))
        n = normalize_rhs(s)
        assert np.allclose(n.terms[0].entries, np.eye(2))
        assert np.allclose(n.rhs, 1.0)

    def test_idempotent(self):
        s = ident_system((2, 3), [2.0, 5.0])
        once = normalize_rhs(s)
        twice = normalize_rhs(once)
        for a, b in zip(once.terms, twice.terms):
            assert np.allclose(a.entries, b.entries)

    def test_solution_preserved(self, cubic_system_symmetric):
        system, root = cubic_system_symmetric
        scaled = PolySystem(terms=system.terms, rhs=np.array([1.0, 1.0]))
        bumped = PolySystem(
            terms=tuple(
                CubicalTensor(t.order, t.dim, t.entries * 2.0) for t in system.terms
            ),
            rhs=np.array([2.0, 2.0]),
        )
        x1 = solve_s_tensor(scaled).solution
        x2 = solve_s_tensor(bumped).solution
        assert np.abs(x1 - x2).max() < 1e-9


class TestSplit:
    def test_identity(self):
        s = split_term(identity_tensor(3, 2))
        assert s.alpha == 1.0
        assert not s.B_part.entries.any()
        assert not s.N_part.entries.any()

    def test_negative_offdiag(self):
        arr = -np.ones((2, 2, 2))
        arr[0, 0, 0] = arr[1, 1, 1] = 11.0
        s = split_term(CubicalTensor.from_array(arr))
        assert s.alpha == 11.0
        assert np.allclose(s.B_part.diagonal(), 0.0)
        assert s.B_part.entries[0, 0, 1] == 1.0
        assert not s.N_part.entries.any()

    def test_positive_offdiag_goes_to_n(self):
        arr = np.zeros((2, 2, 2))
        arr[0, 0, 0] = arr[1, 1, 1] = 11.0
        arr[0, 1, 0] = 10.0
        arr[0, 1, 1] = -1.0
        s = split_term(CubicalTensor.from_array(arr))
        assert s.N_part.entries[0, 1, 0] == 10.0
        assert s.B_part.entries[0, 1, 0] == 0.0
        assert s.B_part.entries[0, 1, 1] == 1.0

    def test_reconstruction_exact(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            t = CubicalTensor.from_array(rng.normal(size=(3, 3, 3)))
            s = split_term(t)
            recon = (
                s.alpha * identity_tensor(3, 3).entries
                - s.B_part.entries
                + s.N_part.entries
            )
            # diagonal reconstructs as alpha - (alpha - d), exact only up to
            # one floating-point rounding
            assert np.allclose(recon, t.entries, rtol=0, atol=1e-15)
            assert s.B_part.is_nonnegative() and s.N_part.is_nonnegative()
            # disjoint off-diagonal supports
            assert not np.any((s.B_part.entries != 0) & (s.N_part.entries != 0))


class TestBracketScalars:
    def test_single_identity(self):
        s = ident_system((3,), [1.0, 1.0])
        t, w = bracket_scalars(s, np.ones(2))
        assert t == pytest.approx(1.0, abs=1e-12)
        assert w == pytest.approx(1.0, abs=1e-12)

    def test_two_identities(self):
        s = ident_system((2, 3), [1.0, 1.0])
        t, w = bracket_scalars(s, np.ones(2))
        golden = (-1.0 + np.sqrt(5.0)) / 2.0  # w^2 + w = 1
        assert t == pytest.approx(golden, abs=1e-12)
        assert w == pytest.approx(golden, abs=1e-12)

    def test_ordering_and_hypothesis(self, cubic_system_asymmetric):
        system, cert = cubic_system_asymmetric
        t, w = bracket_scalars(system, cert)
        assert 0 < t <= w < np.inf
        with pytest.raises(NotApplicableError):
            bracket_scalars(system, np.array([1.0, 1e-9]))

    def test_requires_normalized_rhs(self):
        s = ident_system((2,), [2.0, 2.0])
        with pytest.raises(NotApplicableError):
            bracket_scalars(s, np.ones(2))


class TestInvertF:
    def test_linear_identity(self):
        splits = [(2, split_term(identity_tensor(2, 2)))]
        assert np.allclose(invert_f(splits, np.array([3.0, 4.0])), [3.0, 4.0])

    def test_quadratic_plus_linear(self):
        splits = [
            (2, split_term(identity_tensor(2, 2))),
            (3, split_term(identity_tensor(3, 2))),
        ]
        x = invert_f(splits, np.array([2.0, 2.0]))
        assert np.abs(x - 1.0).max() < 1e-9

    def test_roundtrip_with_n_part(self):
        arr = np.zeros((2, 2, 2))
        arr[0, 0, 0] = arr[1, 1, 1] = 5.0
        arr[0, 1, 0] = 2.0  # positive off-diagonal lands in N
        splits = [(3, split_term(CubicalTensor.from_array(arr)))]
        y = np.array([3.0, 7.0])
        x = invert_f(splits, y)
        s = splits[0][1]
        val = s.alpha * x**2 + np.array(
            [2.0 * x[1] * x[0], 0.0]
        )  # alpha x^2 + N x^2
        assert np.abs(val - y).max() < 1e-8


class TestSolveS:
    def test_symmetric_reference(self, cubic_system_symmetric):
        system, root = cubic_system_symmetric
        res = solve_s_tensor(system)
        assert np.abs(res.solution - root).max() < 5e-5
        assert res.residual_inf < 1e-8
        assert res.unique_certified

    def test_monotone_traces(self, cubic_system_symmetric):
        system, _ = cubic_system_symmetric
        res = solve_s_tensor(system)
        lo = np.asarray(res.lower_trace)
        hi = np.asarray(res.upper_trace)
        # monotone up to the inner-solve tolerance
        assert np.all(np.diff(lo, axis=0) >= -1e-9)
        assert np.all(np.diff(hi, axis=0) <= 1e-9)
        assert np.all(lo[-1] <= res.solution + 1e-9)
        assert np.all(hi[-1] >= res.solution - 1e-9)

    def test_identity_cube(self):
        res = solve_s_tensor(ident_system((3,), [1.0, 1.0]))
        assert np.abs(res.solution - 1.0).max() < 1e-9

    def test_asymmetric_reference_vs_oracle(self, cubic_system_asymmetric):
        system, cert = cubic_system_asymmetric
        res = solve_s_tensor(system, v=cert)
        assert res.residual_inf < 1e-8
        A3 = system.terms[1]
        A2 = np.asarray(system.terms[0].entries)
        oracle = brute_force_solve(QcpProblem(B=A3, A=A2, q=-np.ones(2)))
        positive = [s for s in oracle if s.support == frozenset({1, 2})]
        assert len(positive) == 1
        assert np.abs(positive[0].x - res.solution).max() < 1e-6

    def test_no_certificate(self):
        bad = PolySystem(terms=(-identity_tensor(3, 2),), rhs=np.ones(2))
        with pytest.raises((CertificateNotFoundError, ValueError)):
            solve_s_tensor(bad)

    def test_result_serializes(self, cubic_system_symmetric):
        system, _ = cubic_system_symmetric
        obj = solve_s_tensor(system).to_json_obj()
        assert obj["unique_certified"] is True
        assert len(obj["solution"]) == 2


class TestSolveM:
    def test_identity_pair(self):
        res = solve_m_tensor(ident_system((2, 3), [2.0, 2.0]))
        assert np.abs(res.solution - 1.0).max() < 1e-9
        assert res.tag == "positive"

    def test_linear_identity(self):
        res = solve_m_tensor(ident_system((2,), [3.0, 5.0]))
        assert np.allclose(res.solution, [3.0, 5.0], atol=1e-9)

    def test_cross_solver_agreement(self, cubic_system_symmetric):
        system, _ = cubic_system_symmetric
        xs = solve_s_tensor(system).solution
        xm = solve_m_tensor(system).solution
        assert np.abs(xs - xm).max() < 1e-9

    def test_rejects_non_m(self, cubic_system_asymmetric):
        system, _ = cubic_system_asymmetric
        with pytest.raises(NotApplicableError):
            solve_m_tensor(system)


class TestUniquenessStress:
    def _random_s_system(self, rng):
        n = int(rng.integers(2, 4))
        A2 = rng.uniform(-0.3, 0.3, size=(n, n))
        A3 = rng.uniform(-0.1, 0.1, size=(n, n, n))
        for i in range(n):
            A2[i, i] = np.abs(A2[i]).sum() + rng.uniform(0.5, 1.5)
            A3[i, i, i] = np.abs(A3[i]).sum() + rng.uniform(0.5, 1.5)
        return PolySystem(
            terms=(CubicalTensor.from_matrix(A2), CubicalTensor.from_array(A3)),
            rhs=rng.uniform(0.5, 2.0, size=n),
        )

    def test_picard_from_random_starts(self):
        rng = np.random.default_rng(2024)
        for _ in range(40):
            system = self._random_s_system(rng)
            res = solve_s_tensor(system)
            T = picard_map(system)
            # the iteration map is guaranteed well-defined on the order
            # interval below the upper bracket, so draw starts inside it
            x_hi = res.bracket[1]
            for _ in range(6):
                x = x_hi * rng.uniform(0.01, 1.0, size=system.dim)
                for _ in range(300):
                    x = T(x, tol=1e-9)
                    if np.abs(x - res.solution).max() < 1e-7:
                        break
                assert np.abs(x - res.solution).max() < 1e-6

    def test_oracle_equivalence_random(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            system = self._random_s_system(rng)
            norm = normalize_rhs(system)
            res = solve_s_tensor(system)
            A2 = np.asarray(norm.terms[0].entries)
            oracle = brute_force_solve(
                QcpProblem(B=norm.terms[1], A=A2, q=-np.ones(system.dim))
            )
            full = [
                s for s in oracle if s.support == frozenset(range(1, system.dim + 1))
            ]
            assert len(full) == 1
            assert np.abs(full[0].x - res.solution).max() < 1e-6


class TestSharedCertificate:
    def test_hint_priority(self):
        t = identity_tensor(3, 2)
        hint = np.array([2.0, 3.0])
        v = shared_certificate([t], hint=hint)
        assert np.array_equal(v, hint)

    def test_joint_requirement(self):
        good = identity_tensor(3, 2)
        bad = -identity_tensor(2, 2)
        assert shared_certificate([good, bad]) is None
