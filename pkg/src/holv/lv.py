"""Higher-order Lotka-Volterra models and equilibrium analysis.

A model is dx_i/dt = r_i x_i (1 + (A x)_i + (B x^2)_i) with the interaction
signs baked into A (pairwise) and B (three-body). Scenario constructors and
validators cover the general, cooperative, two-faction, and purely
competitive sign patterns. Equilibria are found through the complementarity
oracle plus the monotone polynomial solver and classified against the
stability conditions of each scenario.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import pcp as _pcp
from . import polysolve as _poly
from .classify import is_irreducible, classify as classify_tensor
from .tensor import CubicalTensor, tvp, tvp_jacobian

HURWITZ_TOL = 1e-8
SUPPORT_TOL = 1e-8

SCENARIOS = ("general", "cooperative", "two_faction", "competitive")


class ScenarioError(ValueError):
    """Sign pattern or block structure violates the declared scenario."""


@dataclass(frozen=True)
class LVModel:
    r: np.ndarray
    A: np.ndarray
    B: CubicalTensor
    scenario: str = "general"
    blocks: Optional[tuple[int, int]] = None  # (m, n) for two_faction

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        A = np.asarray(self.A, dtype=float)
        n = self.B.dim
        if self.B.order != 3:
            raise ValueError("B must have order 3")
        if r.shape != (n,) or A.shape != (n, n):
            raise ValueError("dimension mismatch between r, A, B")
        if np.any(r <= 0):
            raise ScenarioError("intrinsic rates r must be strictly positive")
        r, A = r.copy(), A.copy()
        r.setflags(write=False)
        A.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "A", A)
        if self.scenario not in SCENARIOS:
            raise ScenarioError(f"unknown scenario {self.scenario!r}")
        self._validate_signs()

    # -- scenario validation -----------------------------------------

    def _validate_signs(self):
        A, B = np.asarray(self.A), self.B
        n = B.dim
        diag_a = np.diag(A)
        diag_b = B.diagonal()
        if np.any(diag_a > 0) or np.any(diag_b > 0):
            raise ScenarioError("self-interaction entries must be nonpositive")
        if self.scenario == "cooperative":
            if not (_is_metzler_matrix(A) and B.is_metzler()):
                raise ScenarioError("cooperative scenario needs nonnegative off-diagonals")
            if not _matrix_irreducible(A):
                raise ScenarioError("cooperative scenario needs an irreducible A")
        elif self.scenario == "two_faction":
            if self.blocks is None:
                raise ScenarioError("two_faction scenario needs blocks=(m, n)")
            m, k = self.blocks
            if m + k != n or m < 1 or k < 1:
                raise ScenarioError("blocks must partition the species")
            fac = np.zeros(n, dtype=int)
            fac[m:] = 1
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    if fac[i] == fac[j] and A[i, j] < 0:
                        raise ScenarioError("intra-faction pairwise terms must be >= 0")
                    if fac[i] != fac[j] and A[i, j] > 0:
                        raise ScenarioError("cross-faction pairwise terms must be <= 0")
            for i in range(n):
                for j in range(n):
                    for kk in range(n):
                        v = B.entries[i, j, kk]
                        if v == 0:
                            continue
                        if fac[j] != fac[kk]:
                            raise ScenarioError("no mixed-faction head pairs allowed")
                        if (i, j, kk) == (i, i, i) and j == i and kk == i:
                            continue
                        if fac[j] == fac[i] and v < 0 and not (j == i and kk == i):
                            raise ScenarioError("intra-faction three-body terms must be >= 0")
                        if fac[j] != fac[i] and v > 0:
                            raise ScenarioError("cross-faction three-body terms must be <= 0")
            if not _matrix_irreducible(A):
                raise ScenarioError("assembled pairwise matrix must be irreducible")
        elif self.scenario == "competitive":
            if np.any(A > 0) or np.any(B.entries > 0):
                raise ScenarioError("competitive scenario stores nonpositive A and B")
            if np.any(np.diag(A) >= 0):
                raise ScenarioError("competitive scenario needs strictly negative A diagonal")

    @property
    def dim(self) -> int:
        return self.B.dim

    # -- dynamics ----------------------------------------------------

    def growth(self, x: np.ndarray) -> np.ndarray:
        """Per-capita growth 1 + A x + B x^2."""
        x = np.asarray(x, dtype=float)
        return 1.0 + self.A @ x + tvp(self.B, x)

    def to_json_obj(self) -> dict:
        obj = {
            "scenario": self.scenario,
            "r": self.r.tolist(),
            "A": np.asarray(self.A).tolist(),
            "B": self.B.to_json_obj(),
        }
        if self.blocks is not None:
            obj["blocks"] = {"m": self.blocks[0], "n": self.blocks[1]}
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "LVModel":
        blocks = None
        if obj.get("blocks"):
            blocks = (int(obj["blocks"]["m"]), int(obj["blocks"]["n"]))
        return cls(
            r=np.asarray(obj["r"], dtype=float),
            A=np.asarray(obj["A"], dtype=float),
            B=CubicalTensor.from_json_obj(obj["B"]),
            scenario=obj.get("scenario", "general"),
            blocks=blocks,
        )

    @classmethod
    def from_json(cls, text: str) -> "LVModel":
        return cls.from_json_obj(json.loads(text))


def _is_metzler_matrix(A: np.ndarray) -> bool:
    off = A - np.diag(np.diag(A))
    return bool(np.all(off >= 0))


def _matrix_irreducible(A: np.ndarray) -> bool:
    return is_irreducible(CubicalTensor.from_matrix(A))


def rhs(model: LVModel, x: np.ndarray) -> np.ndarray:
    """dx/dt = r * x * (1 + A x + B x^2)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dim,):
        raise ValueError(f"x has shape {x.shape}, expected ({model.dim},)")
    return model.r * x * model.growth(x)


def jacobian(model: LVModel, x: np.ndarray) -> np.ndarray:
    """Closed-form Jacobian of ``rhs`` at x."""
    x = np.asarray(x, dtype=float)
    L = model.growth(x)
    JB = tvp_jacobian(model.B, x)
    return np.diag(model.r * L) + (model.r * x)[:, None] * (np.asarray(model.A) + JB)


@dataclass
class EquilibriumReport:
    x_star: np.ndarray
    residual: float
    jacobian_eigs: np.ndarray
    hurwitz: bool
    kind: str  # origin | interior | boundary
    support: tuple  # 1-based winner indices
    verdicts: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    refined: bool = True

    def to_json_obj(self) -> dict:
        return {
            "x_star": self.x_star.tolist(),
            "residual": self.residual,
            "jacobian_eigs": [[float(e.real), float(e.imag)] for e in self.jacobian_eigs],
            "hurwitz": self.hurwitz,
            "kind": self.kind,
            "support": list(self.support),
            "verdicts": self.verdicts,
            "witnesses": {k: _jsonable(v) for k, v in self.witnesses.items()},
            "refined": self.refined,
        }


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return float(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    return v


def metzler_hurwitz_certificate(M: np.ndarray, tol: float = 1e-9) -> Optional[np.ndarray]:
    """z > 0 with M z = -1, which certifies Hurwitz for irreducible Metzler M."""
    M = np.asarray(M, dtype=float)
    off = M - np.diag(np.diag(M))
    if np.any(off < -tol):
        raise ValueError("matrix is not Metzler")
    try:
        z = np.linalg.solve(M, -np.ones(M.shape[0]))
    except np.linalg.LinAlgError:
        return None
    if np.all(z > 0):
        return z
    return None


def permute_two_faction(J: np.ndarray, m: int, n: int, check_metzler: bool = True) -> np.ndarray:
    """Similarity transform P J P with P = diag(I_m, -I_n)."""
    J = np.asarray(J, dtype=float)
    if J.shape != (m + n, m + n):
        raise ValueError("J must be (m+n) x (m+n)")
    p = np.ones(m + n)
    p[m:] = -1.0
    Jt = J * np.outer(p, p)
    if check_metzler:
        off = Jt - np.diag(np.diag(Jt))
        if np.any(off < -1e-9):
            raise ValueError(
                "permuted Jacobian is not Metzler; sign pattern violated"
            )
    return Jt


def classify_equilibrium(
    model: LVModel, x_star: np.ndarray, tol: float = 1e-7
) -> EquilibriumReport:
    """Spectrum, kind, and scenario-applicable stability condition verdicts."""
    x_star = np.asarray(x_star, dtype=float)
    res = float(np.abs(rhs(model, x_star)).max())
    if res > tol:
        raise ValueError(f"residual {res:.3e} exceeds tolerance; not an equilibrium")
    n = model.dim
    support = tuple(i + 1 for i in range(n) if x_star[i] > SUPPORT_TOL)
    if not support:
        kind = "origin"
    elif len(support) == n:
        kind = "interior"
    else:
        kind = "boundary"
    J = jacobian(model, x_star)
    eigs = np.linalg.eigvals(J)
    max_re = float(eigs.real.max())
    hurwitz = max_re < -HURWITZ_TOL
    verdicts: dict = {}
    witnesses: dict = {}
    if abs(max_re) <= HURWITZ_TOL:
        verdicts["spectrum_marginal"] = "holds"
    witnesses["max_real_part"] = max_re

    if kind == "origin":
        verdicts["origin_unstable"] = "holds" if max_re > 0 else "fails"
        witnesses["origin_eigs"] = model.r
        return EquilibriumReport(
            x_star=x_star, residual=res, jacobian_eigs=eigs, hurwitz=hurwitz,
            kind=kind, support=support, verdicts=verdicts, witnesses=witnesses,
        )

    winners = [i - 1 for i in support]
    losers = [i for i in range(n) if i + 1 not in support]
    growth = model.growth(x_star)
    if losers:
        D = model.r[losers] * growth[losers]
        witnesses["loser_diagonal"] = D
        verdicts["loser_growth_negative"] = "holds" if np.all(D < 0) else "fails"
        sub_eigs = np.linalg.eigvals(J[np.ix_(winners, winners)])
        witnesses["winner_subjacobian_max_real"] = float(sub_eigs.real.max())
        verdicts["winner_subjacobian_hurwitz"] = (
            "holds" if sub_eigs.real.max() < -HURWITZ_TOL else "fails"
        )
    else:
        verdicts["loser_growth_negative"] = "not-applicable"
        verdicts["winner_subjacobian_hurwitz"] = "not-applicable"

    if model.scenario == "cooperative":
        if kind == "boundary":
            verdicts["boundary_instability_expected"] = (
                "holds" if max_re > 0 else "fails"
            )
        if kind == "interior":
            jx = J @ x_star
            witnesses["weighted_jacobian"] = jx
            verdicts["weighted_jacobian_negative"] = (
                "holds" if np.all(jx < 0) else "fails"
            )
    elif model.scenario == "two_faction" and model.blocks is not None:
        m, k = model.blocks
        fac1 = set(range(1, m + 1))
        fac2 = set(range(m + 1, m + k + 1))
        sup = set(support)
        if kind == "interior":
            Jt = permute_two_faction(J, m, k, check_metzler=False)
            jx = Jt @ x_star
            witnesses["permuted_weighted_jacobian"] = jx
            verdicts["permuted_weighted_jacobian_negative"] = (
                "holds" if np.all(jx < 0) else "fails"
            )
        elif sup == fac1 or sup == fac2:
            verdicts["one_faction_wins"] = "holds"
        elif sup < fac1 or sup < fac2:
            # winners form a strict subset of a single faction
            verdicts["same_faction_subset_unstable"] = (
                "holds" if max_re > 0 else "fails"
            )
        else:
            verdicts["mixed_boundary"] = "holds"
    elif model.scenario == "competitive":
        if kind == "boundary":
            verdicts["competitive_boundary_stable_candidate"] = (
                "holds"
                if verdicts.get("loser_growth_negative") == "holds"
                and verdicts.get("winner_subjacobian_hurwitz") == "holds"
                else "fails"
            )

    return EquilibriumReport(
        x_star=x_star, residual=res, jacobian_eigs=eigs, hurwitz=hurwitz,
        kind=kind, support=support, verdicts=verdicts, witnesses=witnesses,
    )


def refine_on_support(model: LVModel, x0: np.ndarray, tol: float = 1e-12,
                      max_iter: int = 100) -> Optional[np.ndarray]:
    """Newton-refine the growth equations on the numerical support of x0."""
    x0 = np.asarray(x0, dtype=float)
    S = [i for i in range(model.dim) if x0[i] > SUPPORT_TOL]
    x = np.where(x0 > SUPPORT_TOL, x0, 0.0)
    if not S:
        return np.zeros(model.dim)
    for _ in range(max_iter):
        g = model.growth(x)[S]
        if np.abs(g).max() < tol:
            return x
        J = (np.asarray(model.A) + tvp_jacobian(model.B, x))[np.ix_(S, S)]
        try:
            dz = np.linalg.solve(J, g)
        except np.linalg.LinAlgError:
            return None
        x[S] = x[S] - dz
        if not np.all(np.isfinite(x)) or np.abs(x).max() > 1e9:
            return None
    return x if np.abs(model.growth(x)[S]).max() < 1e-8 else None


def find_equilibria(model: LVModel, tol: float = 1e-9) -> list[EquilibriumReport]:
    """Origin, complementarity-oracle roots, and the monotone-solver root."""
    candidates = [np.zeros(model.dim)]
    for orientation in ("stable-side", "unstable-side"):
        problem = _pcp.lv_to_pcp(model, orientation)
        for sol in _pcp.brute_force_solve(problem, tol=tol):
            candidates.append(sol.x)
    neg_a = CubicalTensor.from_matrix(-np.asarray(model.A))
    cert = _poly.shared_certificate([neg_a, -model.B])
    if cert is not None:
        try:
            system = _poly.PolySystem(terms=(neg_a, -model.B), rhs=np.ones(model.dim))
            candidates.append(_poly.solve_s_tensor(system, v=cert).solution)
        except (_poly.ConvergenceError, _poly.NotApplicableError):
            pass
    reports: list[EquilibriumReport] = []
    seen: list[np.ndarray] = []
    for cand in candidates:
        refined = refine_on_support(model, cand)
        flagged = refined is None
        x = cand if flagged else refined
        if np.any(x < -1e-9):
            continue
        x = np.clip(x, 0.0, None)
        if any(np.abs(x - s).max() < 1e-6 for s in seen):
            continue
        if float(np.abs(rhs(model, x)).max()) > max(tol, 1e-7):
            continue
        seen.append(x)
        report = classify_equilibrium(model, x, tol=max(tol, 1e-7))
        report.refined = not flagged
        reports.append(report)
    reports.sort(key=lambda rep: (len(rep.support), rep.support, rep.x_star.tolist()))
    return reports


# -- global stability condition battery -------------------------------


def _leading_minors_positive(M: np.ndarray) -> tuple[bool, list]:
    """Leading principal minors; cofactor expansion up to 8, LU above."""
    n = M.shape[0]
    minors = []
    for k in range(1, n + 1):
        sub = M[:k, :k]
        minors.append(_det(sub) if k <= 8 else float(np.linalg.det(sub)))
    return all(m > 0 for m in minors), minors


def _det(M: np.ndarray) -> float:
    n = M.shape[0]
    if n == 1:
        return float(M[0, 0])
    total = 0.0
    for j in range(n):
        if M[0, j] == 0.0:
            continue
        sub = np.delete(np.delete(M, 0, axis=0), j, axis=1)
        total += ((-1.0) ** j) * M[0, j] * _det(sub)
    return total


def global_stability_conditions(
    model: LVModel,
    R_hat: float,
    eps: float,
    d: Optional[np.ndarray] = None,
    x_star: Optional[np.ndarray] = None,
) -> dict:
    """Verdict map for the sufficient global-stability condition battery.

    All verdicts are conditional on the stated bounded positively invariant
    box (radius ``R_hat``, lower corner ``eps``); that geometric premise is
    declared, not checked.
    """
    if not (R_hat > eps > 0):
        raise ValueError("need R_hat > eps > 0")
    A, B, r = np.asarray(model.A), model.B, model.r
    n = model.dim
    d = np.ones(n) if d is None else np.asarray(d, dtype=float)
    verdicts: dict = {"invariant_box": "conditional"}
    witnesses: dict = {}

    # envelope matrix from pairwise diagonal + HOI-magnitude off-diagonal rows
    G = np.zeros((n, n))
    hoi_rowsum = np.zeros((n, n))  # per (i, j): sum_k |b_ijk| + |b_ikj|
    for i in range(n):
        for j in range(n):
            hoi_rowsum[i, j] = np.abs(B.entries[i, j, :]).sum() + np.abs(
                B.entries[i, :, j]
            ).sum()
    for i in range(n):
        G[i, i] = r[i] * A[i, i]
        for j in range(n):
            if j != i:
                G[i, j] = r[i] * (abs(A[i, j]) + R_hat * hoi_rowsum[i, j])
    ok_diag = bool(np.all(np.diag(A) < 0))
    minors_ok, minors = _leading_minors_positive(-G) if ok_diag else (False, [])
    witnesses["envelope_minors"] = minors
    verdicts["pairwise_dominance_minors"] = "holds" if ok_diag and minors_ok else "fails"

    # weighted row inequality with user weights d
    rows_ok = True
    failing = []
    for i in range(n):
        lhs = -d[i] * A[i, i]
        rhsv = sum(d[j] * abs(A[i, j]) for j in range(n) if j != i) + R_hat * sum(
            d[j] * hoi_rowsum[i, j] for j in range(n) if j != i
        )
        if lhs <= rhsv:
            rows_ok = False
            failing.append(i + 1)
    verdicts["weighted_row_dominance"] = "holds" if rows_ok else "fails"
    if failing:
        witnesses["weighted_row_dominance_failing_rows"] = failing

    # sharper variant keeping the three-body self term on the diagonal
    G2 = G.copy()
    ok2 = True
    for i in range(n):
        pos_self = sum(max(B.entries[i, i, k], 0.0) for k in range(n) if k != i) + sum(
            max(B.entries[i, k, i], 0.0) for k in range(n) if k != i
        )
        G2[i, i] = r[i] * (A[i, i] + B.entries[i, i, i] * eps + R_hat * pos_self)
        if G2[i, i] >= 0:
            ok2 = False
    minors2_ok, minors2 = _leading_minors_positive(-G2) if ok2 else (False, [])
    witnesses["envelope_minors_with_hoi_diagonal"] = minors2
    verdicts["hoi_diagonal_dominance_minors"] = (
        "holds" if ok2 and minors2_ok else "fails"
    )

    # tensor-class hypotheses on the negated interaction pair
    neg_a_t = CubicalTensor.from_matrix(-A)
    neg_b = -B
    rep_a = classify_tensor(neg_a_t)
    rep_b = classify_tensor(neg_b)
    shared = _poly.shared_certificate([neg_a_t, neg_b])
    m_pair = (
        rep_a.is_m_tensor
        and rep_b.is_m_tensor
        and is_irreducible(neg_a_t)
        and is_irreducible(neg_b)
        and shared is not None
    )
    verdicts["m_tensor_pair_shared_certificate"] = "holds" if m_pair else "fails"
    if shared is not None:
        witnesses["shared_certificate"] = shared
    h_pair = (
        rep_a.is_h_plus
        and rep_b.is_h_plus
        and neg_a_t.is_nonnegative()
        and neg_b.is_nonnegative()
        and is_irreducible(neg_a_t)
        and is_irreducible(neg_b)
    )
    verdicts["h_plus_pair"] = "holds" if h_pair else "fails"

    if x_star is not None:
        xs = np.asarray(x_star, dtype=float)
        cond = np.all(-A @ xs > 0) and np.all(-tvp(B, xs) > 0)
        witnesses["equilibrium_direction"] = {"neg_Ax": (-A @ xs), "neg_Bx2": (-tvp(B, xs))}
        verdicts["equilibrium_direction_positive"] = "holds" if cond else "fails"

    return {"verdicts": verdicts, "witnesses": witnesses}


def wta_check(model: LVModel) -> Optional[np.ndarray]:
    """Winner-take-all prediction for the competitive scenario.

    Checks the reciprocal dominance conditions on the pairwise magnitudes;
    when both hold, returns the closed-form single-species limit.
    """
    if model.scenario != "competitive":
        raise ScenarioError("winner-take-all check needs the competitive scenario")
    a = -np.asarray(model.A)  # stored negated magnitudes
    n = model.dim

    def inv(v):
        return np.inf if v == 0 else 1.0 / v

    for j in range(n):
        for i in range(j):
            if not inv(a[j, j]) < inv(a[i, j]):  # condition on upper pairs
                return None
    for j in range(n):
        for i in range(j + 1, n):
            if not inv(a[j, j]) > inv(a[i, j]):  # condition on lower pairs
                return None
    a11 = a[0, 0]
    b111 = -model.B.entries[0, 0, 0]
    limit = np.zeros(n)
    if b111 < 1e-14:
        limit[0] = 1.0 / a11
    else:
        limit[0] = (-a11 + np.sqrt(a11**2 + 4 * b111)) / (2 * b111)
    return limit


@dataclass
class ContinuationResult:
    points: list  # (epsilon, equilibrium, hurwitz)
    truncated: bool = False
    reason: str = ""


def continuation(
    model: LVModel,
    epsilon_grid: Sequence[float],
    tol: float = 1e-10,
) -> ContinuationResult:
    """Track the interior equilibrium of 1 + A x + eps B x^2 = 0 along eps."""
    eps_grid = list(epsilon_grid)
    if not eps_grid or eps_grid[0] != 0.0 or any(
        b <= a for a, b in zip(eps_grid, eps_grid[1:])
    ):
        raise ValueError("epsilon grid must be sorted ascending and start at 0")
    A = np.asarray(model.A)
    try:
        x = np.linalg.solve(-A, np.ones(model.dim))
    except np.linalg.LinAlgError:
        raise ValueError("unperturbed pairwise system is singular")
    points = []
    for eps in eps_grid:
        scaled = LVModel(
            r=model.r, A=model.A, B=model.B.scale(eps) if eps != 1.0 else model.B,
            scenario="general",
        )
        converged = False
        for _ in range(100):
            g = 1.0 + A @ x + eps * tvp(model.B, x)
            if np.abs(g).max() < tol:
                converged = True
                break
            J = A + eps * tvp_jacobian(model.B, x)
            try:
                dx = np.linalg.solve(J, g)
            except np.linalg.LinAlgError:
                converged = False
                break
            x = x - dx
            if not np.all(np.isfinite(x)):
                converged = False
                break
        if not converged:
            return ContinuationResult(points, truncated=True, reason=f"newton diverged at eps={eps}")
        eigs = np.linalg.eigvals(jacobian(scaled, x))
        max_re = float(eigs.real.max())
        points.append((eps, x.copy(), max_re < -HURWITZ_TOL))
        if abs(max_re) <= HURWITZ_TOL:
            return ContinuationResult(points, truncated=True, reason=f"hyperbolicity lost at eps={eps}")
    return ContinuationResult(points)


# -- random scenario generation --------------------------------------


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def random_scenario(kind: str, dims, seed: int, scale: float = 10.0) -> LVModel:
    """Deterministic scenario sampler; magnitudes uniform on [0, scale]."""
    rng = _rng(seed)
    if kind == "two_faction":
        m, k = dims
        n = m + k
    else:
        n = int(dims)
    for _ in range(100):
        r = rng.uniform(0.1, scale, size=n)
        mag_a = rng.uniform(0.0, scale, size=(n, n))
        mag_b = rng.uniform(0.0, scale, size=(n, n, n))
        if kind == "general":
            sign_a = rng.choice([-1.0, 1.0], size=(n, n))
            sign_b = rng.choice([-1.0, 1.0], size=(n, n, n))
            A = mag_a * sign_a
            Bx = mag_b * sign_b
            np.fill_diagonal(A, -np.abs(np.diag(A)))
            idx = np.arange(n)
            Bx[idx, idx, idx] = -np.abs(Bx[idx, idx, idx])
        elif kind == "cooperative":
            A = mag_a.copy()
            Bx = mag_b.copy()
            np.fill_diagonal(A, -mag_a.diagonal())
            idx = np.arange(n)
            Bx[idx, idx, idx] = -mag_b[idx, idx, idx]
        elif kind == "competitive":
            A = -mag_a
            Bx = -mag_b
            np.fill_diagonal(A, -np.clip(mag_a.diagonal(), 1e-3, None))
        elif kind == "two_faction":
            fac = np.zeros(n, dtype=int)
            fac[m:] = 1
            A = np.zeros((n, n))
            Bx = np.zeros((n, n, n))
            for i in range(n):
                for j in range(n):
                    if i == j:
                        A[i, i] = -mag_a[i, i]
                    elif fac[i] == fac[j]:
                        A[i, j] = mag_a[i, j]
                    else:
                        A[i, j] = -mag_a[i, j]
            for i in range(n):
                for j in range(n):
                    for kk in range(n):
                        if fac[j] != fac[kk]:
                            continue  # no mixed-faction head pairs
                        if (i == j == kk):
                            Bx[i, j, kk] = -mag_b[i, j, kk]
                        elif fac[j] == fac[i]:
                            Bx[i, j, kk] = mag_b[i, j, kk]
                        else:
                            Bx[i, j, kk] = -mag_b[i, j, kk]
        else:
            raise ScenarioError(f"unknown scenario kind {kind!r}")
        B = CubicalTensor(3, n, Bx)
        try:
            return LVModel(
                r=r, A=A, B=B, scenario=kind,
                blocks=(m, k) if kind == "two_faction" else None,
            )
        except ScenarioError:
            continue  # reducible draw; resample
    raise RuntimeError("failed to sample a valid scenario in 100 draws")
