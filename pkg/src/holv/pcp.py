"""Quadratic complementarity problems: bounds and a support-enumeration oracle.

The problem: find x >= 0 with B x^2 + A x + q >= 0 and x'(B x^2 + A x + q) = 0.
The brute-force solver enumerates all supports (n <= 12) and Newton-solves the
square equality system on each; it serves as the independent oracle for the
equilibrium machinery.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .classify import is_generalized_row_sdd_pos_diag
from .tensor import CubicalTensor, tvp, tvp_jacobian

MAX_ENUM_DIM = 12
DEDUP_RADIUS = 1e-6


class HypothesisError(ValueError):
    """A stated precondition of a bound fails."""


@dataclass(frozen=True)
class QcpProblem:
    B: CubicalTensor
    A: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        if self.B.order != 3:
            raise ValueError("B must have order 3")
        A = np.asarray(self.A, dtype=float)
        q = np.asarray(self.q, dtype=float)
        n = self.B.dim
        if A.shape != (n, n) or q.shape != (n,):
            raise ValueError("dimension mismatch between B, A, q")
        A = A.copy()
        q = q.copy()
        A.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "q", q)

    @property
    def dim(self) -> int:
        return self.B.dim

    def F(self, x: np.ndarray) -> np.ndarray:
        return self.A @ x + tvp(self.B, x)

    def slack(self, x: np.ndarray) -> np.ndarray:
        return self.F(x) + self.q

    def F_jacobian(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.A) + tvp_jacobian(self.B, x)

    def to_json_obj(self) -> dict:
        return {
            "B": self.B.to_json_obj(),
            "A": np.asarray(self.A).tolist(),
            "q": np.asarray(self.q).tolist(),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "QcpProblem":
        return cls(
            B=CubicalTensor.from_json_obj(obj["B"]),
            A=np.asarray(obj["A"], dtype=float),
            q=np.asarray(obj["q"], dtype=float),
        )


@dataclass
class PcpSolution:
    x: np.ndarray
    slack: np.ndarray
    support: frozenset  # 1-based indices with x_i > 0

    def to_json_obj(self) -> dict:
        return {
            "x": self.x.tolist(),
            "slack": self.slack.tolist(),
            "support": sorted(self.support),
        }


@dataclass
class NormBounds:
    lower: float
    upper: float
    per_index: list  # (k 1-based, s_A, s_B, delta_A, delta_B)

    def to_json_obj(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "per_index": [
                {"k": k, "s_A": sa, "s_B": sb, "delta_A": da, "delta_B": db}
                for (k, sa, sb, da, db) in self.per_index
            ],
        }


def omega(q: np.ndarray) -> set[int]:
    """1-based indices where q is strictly negative."""
    q = np.asarray(q, dtype=float)
    return {i + 1 for i in range(len(q)) if q[i] < 0}


def _row_parts(entries_row: np.ndarray, diag_flat: int) -> tuple[float, float]:
    row = entries_row.ravel().copy()
    row[diag_flat] = 0.0
    return float(row[row > 0].sum()), float(-row[row < 0].sum())


def norm_bounds(problem: QcpProblem) -> NormBounds:
    """Infinity-norm bracket for every solution, from per-row quadratic formulas."""
    B, A, q = problem.B, np.asarray(problem.A), np.asarray(problem.q)
    n = problem.dim
    A_t = CubicalTensor.from_matrix(A)
    if not is_generalized_row_sdd_pos_diag(B):
        raise HypothesisError("B fails the generalized row SDD / positive diagonal test")
    if not is_generalized_row_sdd_pos_diag(A_t):
        raise HypothesisError("A fails the generalized row SDD / positive diagonal test")
    idx_set = omega(q)
    if not idx_set:
        raise HypothesisError("q has no negative component")
    per_index = []
    lowers, uppers = [], []
    for k in sorted(idx_set):
        i = k - 1
        rbp, rbm = _row_parts(B.entries[i], i * n + i)
        rap, ram = _row_parts(A[i], i)
        s_B = B.entries[i, i, i] + rbp
        s_A = A[i, i] + rap
        d_B = B.entries[i, i, i] - rbm
        d_A = A[i, i] - ram
        per_index.append((k, float(s_A), float(s_B), float(d_A), float(d_B)))
        lowers.append((-s_A + np.sqrt(s_A**2 - 4 * s_B * q[i])) / (2 * s_B))
        uppers.append((-d_A + np.sqrt(d_A**2 - 4 * d_B * q[i])) / (2 * d_B))
    return NormBounds(lower=float(min(lowers)), upper=float(max(uppers)), per_index=per_index)


def _newton_on_support(problem, support, start, tol, max_iter=100):
    """Damped Newton for (F(x)+q)_S = 0 with x fixed to 0 off S."""
    n = problem.dim
    S = list(support)
    x = np.zeros(n)
    x[S] = start
    res = problem.slack(x)[S]
    best = np.abs(res).max() if len(S) else 0.0
    for _ in range(max_iter):
        if best < tol:
            return x, True
        J = problem.F_jacobian(x)[np.ix_(S, S)]
        try:
            dz = np.linalg.solve(J, res)
        except np.linalg.LinAlgError:
            return x, False
        damp = 1.0
        stepped = False
        while damp >= 2**-24:
            cand = x.copy()
            cand[S] = x[S] - damp * dz
            cand_res = problem.slack(cand)[S]
            cand_norm = np.abs(cand_res).max()
            if cand_norm < best:
                x, res, best, stepped = cand, cand_res, cand_norm, True
                break
            damp *= 0.5
        if not stepped:
            return x, best < tol
    return x, best < tol


def support_enumeration(
    problem: QcpProblem,
    tol: float = 1e-9,
    newton_starts: Optional[int] = None,
    seed: int = 0,
) -> dict:
    """Solve the complementarity problem on every support.

    Returns {"solutions": [PcpSolution...], "undetermined": [supports]}.
    Output order is deterministic: supports in lexicographic order.
    """
    n = problem.dim
    if n > MAX_ENUM_DIM:
        raise ValueError(f"support enumeration limited to n <= {MAX_ENUM_DIM}")
    rng = np.random.default_rng(seed)
    solutions: list[PcpSolution] = []
    undetermined = []
    if np.all(problem.q >= 0):
        zero = np.zeros(n)
        solutions.append(PcpSolution(x=zero, slack=problem.slack(zero), support=frozenset()))
    for size in range(1, n + 1):
        for support in itertools.combinations(range(n), size):
            k = len(support)
            starts = [np.ones(k) / k]
            for i in range(k):
                e = np.full(k, 1e-3)
                e[i] = 1.0
                starts.append(e)
            extra = (newton_starts or (2 * k + 1)) - len(starts)
            for _ in range(max(0, extra) + k):
                starts.append(rng.uniform(0.05, 2.0, size=k))
            found_any = False
            singular_all = True
            for start in starts:
                x, ok = _newton_on_support(problem, support, start, tol)
                if not ok:
                    continue
                singular_all = False
                if np.any(x[list(support)] <= tol):
                    continue
                slack = problem.slack(x)
                off = [i for i in range(n) if i not in support]
                if off and np.any(slack[off] < -tol):
                    continue
                if any(
                    sol.support == frozenset(i + 1 for i in support)
                    and np.abs(sol.x - x).max() < DEDUP_RADIUS
                    for sol in solutions
                ):
                    found_any = True
                    continue
                solutions.append(
                    PcpSolution(
                        x=x, slack=slack, support=frozenset(i + 1 for i in support)
                    )
                )
                found_any = True
            if not found_any and singular_all:
                undetermined.append(tuple(i + 1 for i in support))
    return {"solutions": solutions, "undetermined": undetermined}


def brute_force_solve(
    problem: QcpProblem,
    tol: float = 1e-9,
    newton_starts: Optional[int] = None,
) -> list[PcpSolution]:
    """All complementarity solutions found by exhaustive support enumeration."""
    return support_enumeration(problem, tol=tol, newton_starts=newton_starts)["solutions"]


def verify_solution(problem: QcpProblem, sol: PcpSolution, tol: float = 1e-7) -> bool:
    """Re-check the three complementarity conditions independently of the solver."""
    x = sol.x
    slack = problem.slack(x)
    return (
        bool(np.all(x >= -tol))
        and bool(np.all(slack >= -tol))
        and abs(float(x @ slack)) < tol * max(1.0, np.abs(x).max() * np.abs(slack).max())
    )


def leading_sol_zero(B: CubicalTensor, tol: float = 1e-9, seed: int = 0) -> bool:
    """True iff the homogeneous problem (F = B x^2, q = 0) only has the zero solution.

    By degree-2 homogeneity a nonzero solution can be rescaled onto the unit
    simplex, so each support is scanned there with a Gauss-Newton solve of
    {(B x^2)_S = 0, sum x_S = 1}.
    """
    n = B.dim
    if n > MAX_ENUM_DIM:
        raise ValueError(f"support enumeration limited to n <= {MAX_ENUM_DIM}")
    rng = np.random.default_rng(seed)
    for size in range(1, n + 1):
        for support in itertools.combinations(range(n), size):
            S = list(support)
            k = len(S)
            starts = [np.ones(k) / k]
            for i in range(k):
                e = np.full(k, 0.1 / max(1, k - 1)) if k > 1 else np.array([1.0])
                e[i] = 0.9 if k > 1 else 1.0
                starts.append(e)
            for _ in range(2 * k + 1):
                z = rng.uniform(0.01, 1.0, size=k)
                starts.append(z / z.sum())
            for start in starts:
                z = np.asarray(start, dtype=float)
                ok = False
                for _ in range(100):
                    x = np.zeros(n)
                    x[S] = z
                    r = np.concatenate([tvp(B, x)[S], [z.sum() - 1.0]])
                    if np.abs(r).max() < tol:
                        ok = True
                        break
                    J = np.vstack([tvp_jacobian(B, x)[np.ix_(S, S)], np.ones((1, k))])
                    dz, *_ = np.linalg.lstsq(J, r, rcond=None)
                    if not np.all(np.isfinite(dz)):
                        break
                    z = z - dz
                    if np.abs(z).max() > 1e6:
                        break
                if not ok:
                    continue
                x = np.zeros(n)
                x[S] = z
                if np.any(z <= tol):
                    continue
                off = [i for i in range(n) if i not in support]
                if off and np.any(tvp(B, x)[off] < -tol):
                    continue
                return False
    return True


def lv_to_pcp(model, orientation: str = "stable-side") -> QcpProblem:
    """Complementarity problem whose solutions are the model's equilibria.

    ``model`` needs attributes A (matrix) and B (order-3 CubicalTensor) of the
    growth form 1 + A x + B x^2. "stable-side" selects equilibria with
    nonpositive per-capita growth; "unstable-side" the nonnegative ones.
    """
    n = model.B.dim
    if orientation == "stable-side":
        return QcpProblem(B=-model.B, A=-np.asarray(model.A), q=-np.ones(n))
    if orientation == "unstable-side":
        return QcpProblem(B=model.B, A=np.asarray(model.A), q=np.ones(n))
    raise ValueError(f"unknown orientation {orientation!r}")


def solutions_to_json(solutions: Sequence[PcpSolution]) -> str:
    return json.dumps([s.to_json_obj() for s in solutions])
