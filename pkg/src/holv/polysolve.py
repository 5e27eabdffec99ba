"""Monotone fixed-point solver for Sum_i A_i x^{i-1} = b with positive b.

The equation is rewritten as x = T(x) = f^{-1}(g(x)) with
f(x) = Sum (alpha_i I + N_i) x^{i-1} and g(x) = Sum B_i x^{i-1} + b,
where each term splits as A_i = alpha_i I - B_i + N_i with B_i, N_i >= 0.
Two one-sided iterations bracket the solution between monotone iterates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import root as scipy_root

from .classify import _m_tensor_test
from .tensor import CubicalTensor, identity_tensor, tvp, tvp_jacobian

DEFAULT_TOL = 1e-10
MAX_OUTER = 5_000
MAX_INNER = 200


class CertificateNotFoundError(RuntimeError):
    """No shared positive certificate was given or found."""


class NotApplicableError(ValueError):
    """A solver hypothesis fails for the given system."""


class ConvergenceError(RuntimeError):
    def __init__(self, msg, bracket=None):
        super().__init__(msg)
        self.bracket = bracket


@dataclass(frozen=True)
class PolySystem:
    """Terms (one tensor per polynomial order, orders distinct, >= 2) and rhs b > 0."""

    terms: tuple[CubicalTensor, ...]
    rhs: np.ndarray

    def __post_init__(self):
        terms = tuple(sorted(self.terms, key=lambda t: t.order))
        if not terms:
            raise ValueError("at least one term required")
        orders = [t.order for t in terms]
        if len(set(orders)) != len(orders):
            raise ValueError("orders must be pairwise distinct")
        if orders[0] < 2:
            raise ValueError("orders must start at 2 or above")
        dim = terms[0].dim
        if any(t.dim != dim for t in terms):
            raise ValueError("all terms must share the same dimension")
        b = np.asarray(self.rhs, dtype=float)
        if b.shape != (dim,):
            raise ValueError(f"rhs has shape {b.shape}, expected ({dim},)")
        if np.any(b <= 0):
            raise ValueError("rhs must be strictly positive componentwise")
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "rhs", b)

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Sum_i A_i x^{i-1}."""
        return sum(tvp(t, x) for t in self.terms)

    def residual_inf(self, x: np.ndarray) -> float:
        return float(np.abs(self.evaluate(x) - self.rhs).max())

    def to_json_obj(self) -> dict:
        return {
            "terms": [t.to_json_obj() for t in self.terms],
            "rhs": self.rhs.tolist(),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PolySystem":
        terms = tuple(CubicalTensor.from_json_obj(t) for t in obj["terms"])
        return cls(terms=terms, rhs=np.asarray(obj["rhs"], dtype=float))


@dataclass(frozen=True)
class SplitTerm:
    """A = alpha I - B + N with B, N >= 0 and disjoint off-diagonal supports."""

    alpha: float
    B_part: CubicalTensor
    N_part: CubicalTensor


@dataclass
class SolveResult:
    solution: np.ndarray
    residual_inf: float
    iters_below: int
    iters_above: int
    lower_trace: list
    upper_trace: list
    unique_certified: bool
    bracket: tuple
    tag: str = "positive"

    def to_json_obj(self) -> dict:
        return {
            "solution": self.solution.tolist(),
            "residual_inf": self.residual_inf,
            "iters_below": self.iters_below,
            "iters_above": self.iters_above,
            "lower_trace": [np.asarray(v).tolist() for v in self.lower_trace],
            "upper_trace": [np.asarray(v).tolist() for v in self.upper_trace],
            "unique_certified": self.unique_certified,
            "bracket": [np.asarray(v).tolist() for v in self.bracket],
            "tag": self.tag,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def normalize_rhs(system: PolySystem) -> PolySystem:
    """Equivalent system with rhs = 1: row j of every term divided by b_j."""
    b = system.rhs
    if np.allclose(b, 1.0, rtol=0, atol=0):
        return system
    terms = []
    for t in system.terms:
        scaled = t.entries / b.reshape((-1,) + (1,) * (t.order - 1))
        terms.append(CubicalTensor(t.order, t.dim, scaled))
    return PolySystem(terms=tuple(terms), rhs=np.ones(system.dim))


def split_term(A: CubicalTensor) -> SplitTerm:
    """Diagonal/negative/positive splitting A = alpha I - B + N."""
    diag = A.diagonal()
    alpha = float(max(0.0, diag.max()))
    off = A.offdiag_mask()
    B = np.zeros_like(A.entries)
    N = np.zeros_like(A.entries)
    neg = off & (A.entries < 0)
    pos = off & (A.entries > 0)
    B[neg] = -A.entries[neg]
    N[pos] = A.entries[pos]
    idx = np.arange(A.dim)
    B[(idx,) * A.order] = alpha - diag
    return SplitTerm(
        alpha=alpha,
        B_part=CubicalTensor(A.order, A.dim, B),
        N_part=CubicalTensor(A.order, A.dim, N),
    )


def shared_certificate(
    terms: Sequence[CubicalTensor],
    hint: Optional[np.ndarray] = None,
    max_iter: int = 500,
) -> Optional[np.ndarray]:
    """Positive v with A_i v^{i-1} > 0 for every term simultaneously."""

    def worst(v):
        return min(float(tvp(t, v).min()) for t in terms)

    def accepted(v):
        return v is not None and np.all(v > 0) and worst(v) > 0

    if hint is not None:
        v = np.asarray(hint, dtype=float)
        if accepted(v):
            return v
    n = terms[0].dim
    ones = np.ones(n)
    if accepted(ones):
        return ones
    # multiplicative ascent of the worst component over the simplex
    v = ones / n
    best, best_val = v.copy(), worst(v)
    step = 0.5
    for _ in range(max_iter):
        vals = [(float(tvp(t, v).min()), t) for t in terms]
        _, t_active = min(vals, key=lambda p: p[0])
        y = tvp(t_active, v)
        i = int(np.argmin(y))
        g = tvp_jacobian(t_active, v)[i] * v
        v = v * np.exp(step * g / (np.abs(g).max() + 1e-300))
        v = np.clip(v, 1e-12, None)
        v = v / v.sum()
        val = worst(v)
        if val > best_val:
            best, best_val = v.copy(), val
        else:
            step *= 0.7
        if best_val > 0:
            return best
    return None


def bracket_scalars(system: PolySystem, v: np.ndarray) -> tuple[float, float]:
    """Scalars t <= w with max_j S(t v)_j = 1 and min_j S(w v)_j = 1.

    Requires rhs = 1 and A_i v^{i-1} > 0 for every term.
    """
    if not np.allclose(system.rhs, 1.0, rtol=0, atol=0):
        raise NotApplicableError("bracket_scalars expects a normalized system (rhs = 1)")
    v = np.asarray(v, dtype=float)
    cs = []
    for t in system.terms:
        c = tvp(t, v)
        if np.any(c <= 0):
            raise NotApplicableError(
                f"certificate invalid: order-{t.order} term has nonpositive product"
            )
        cs.append((t.order, c))

    def scaled(s):
        return sum(s ** (order - 1) * c for order, c in cs)

    def solve_scalar(agg):
        lo, hi = 0.0, 1.0
        while agg(scaled(hi)) < 1.0:
            hi *= 2.0
            if hi > 1e150:
                raise ConvergenceError("bracket scalar search diverged")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if agg(scaled(mid)) < 1.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    w = solve_scalar(lambda y: float(y.min()))
    t = solve_scalar(lambda y: float(y.max()))
    return t, w


def _componentwise_inverse(alphas, y, tol):
    """Solve Sum_i alpha_i x_j^{i-1} = y_j per component by bisection."""
    n = len(y)
    out = np.empty(n)
    orders = [o for o, a in alphas if a > 0]
    if not orders:
        raise NotApplicableError("all diagonal scalars vanish; f is not invertible")
    a_min = min(a for o, a in alphas if a > 0)
    for j in range(n):
        target = y[j]
        lo, hi = 0.0, target / a_min + 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            val = sum(a * mid ** (o - 1) for o, a in alphas)
            if val < target:
                lo = mid
            else:
                hi = mid
            if hi - lo < tol * max(1.0, hi):
                break
        out[j] = 0.5 * (lo + hi)
    return out


def invert_f(splits: Sequence[tuple[int, SplitTerm]], y: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Solve f(x) = y with f(x) = Sum (alpha_i I + N_i) x^{i-1}, y > 0."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("invert_f requires y > 0")
    alphas = [(order, s.alpha) for order, s in splits]
    have_n = any(s.N_part.entries.any() for _, s in splits)
    x = _componentwise_inverse(alphas, y, tol)
    if not have_n:
        return x

    def f(x):
        total = np.zeros_like(y)
        for order, s in splits:
            total += s.alpha * x ** (order - 1) + tvp(s.N_part, x)
        return total

    def fjac(x):
        n = len(y)
        J = np.zeros((n, n))
        for order, s in splits:
            J += np.diag(s.alpha * (order - 1) * x ** (order - 2))
            J += tvp_jacobian(s.N_part, x)
        return J

    # damped Newton, fallback to the monotone componentwise sweep
    res = f(x) - y
    best_norm = np.abs(res).max()
    for _ in range(MAX_INNER):
        if best_norm < tol:
            return x
        J = fjac(x)
        try:
            cond_ok = np.linalg.cond(J) < 1e12
        except np.linalg.LinAlgError:
            cond_ok = False
        stepped = False
        if cond_ok:
            try:
                dx = np.linalg.solve(J, res)
            except np.linalg.LinAlgError:
                dx = None
            if dx is not None:
                damp = 1.0
                while damp >= 2**-20:
                    cand = np.clip(x - damp * dx, 1e-300, None)
                    cand_norm = np.abs(f(cand) - y).max()
                    if cand_norm < best_norm:
                        x, best_norm, stepped = cand, cand_norm, True
                        break
                    damp *= 0.5
        if not stepped:
            # damped componentwise sweep: the raw update can oscillate, so
            # blend toward it only as far as the residual keeps improving
            rhs_sweep = y - sum(tvp(s.N_part, x) for _, s in splits)
            if np.all(rhs_sweep > 0):
                x_new = _componentwise_inverse(alphas, rhs_sweep, tol)
                theta = 1.0
                while theta >= 2**-10:
                    cand = x + theta * (x_new - x)
                    cand_norm = np.abs(f(cand) - y).max()
                    if cand_norm < best_norm:
                        x, best_norm, stepped = cand, cand_norm, True
                        break
                    theta *= 0.5
            else:
                # started too far out for the sweep; pull toward the origin
                cand = 0.5 * x
                cand_norm = np.abs(f(cand) - y).max()
                if cand_norm < best_norm:
                    x, best_norm, stepped = cand, cand_norm, True
        if not stepped:
            # last resort: general-purpose root find in log coordinates,
            # which keeps the iterate in the positive cone
            sol = scipy_root(
                lambda z: f(np.exp(z)) - y,
                np.log(np.clip(x, 1e-300, None)),
                jac=lambda z: fjac(np.exp(z)) * np.exp(z),
            )
            cand = np.exp(sol.x)
            cand_norm = np.abs(f(cand) - y).max()
            if cand_norm < best_norm:
                x, best_norm = cand, cand_norm
            break
    if best_norm < 1e-6:
        return x
    raise ConvergenceError("inner solve did not converge", bracket=x)


def _fixed_point_map(system: PolySystem) -> tuple[Callable, list]:
    """T(x) = f^{-1}(g(x)) for a normalized system."""
    splits = [(t.order, split_term(t)) for t in system.terms]
    b = system.rhs

    def T(x, tol=DEFAULT_TOL):
        g = b + sum(tvp(s.B_part, x) for _, s in splits)
        return invert_f(splits, g, tol=tol)

    return T, splits


def _two_sided_iterate(system, T, x_lo, x_hi, tol, max_iter):
    lower_trace, upper_trace = [x_lo.copy()], [x_hi.copy()]
    below, above = x_lo, x_hi
    iters_below = iters_above = 0
    done_below = done_above = False
    inner_tol = max(tol * 1e-2, 1e-14)  # keep inner error below outer stall check
    for _ in range(max_iter):
        if not done_below:
            nxt = T(below, tol=inner_tol)
            lower_trace.append(nxt.copy())
            moved = np.abs(nxt - below).max()
            below = nxt
            iters_below += 1
            if moved < tol and system.residual_inf(below) < max(tol, 1e-13):
                done_below = True
        if not done_above:
            nxt = T(above, tol=inner_tol)
            upper_trace.append(nxt.copy())
            moved = np.abs(nxt - above).max()
            above = nxt
            iters_above += 1
            if moved < tol and system.residual_inf(above) < max(tol, 1e-13):
                done_above = True
        if done_below and done_above:
            break
    return below, above, lower_trace, upper_trace, iters_below, iters_above


def solve_s_tensor(
    system: PolySystem,
    v: Optional[np.ndarray] = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = MAX_OUTER,
) -> SolveResult:
    """Bracketed fixed-point solve; needs a shared positive certificate."""
    norm = normalize_rhs(system)
    cert = shared_certificate(norm.terms, hint=v)
    if cert is None:
        raise CertificateNotFoundError(
            "no shared positive certificate found; supply one explicitly"
        )
    t, w = bracket_scalars(norm, cert)
    T, _ = _fixed_point_map(norm)
    x_lo, x_hi = t * cert, w * cert
    below, above, lo_tr, hi_tr, ib, ia = _two_sided_iterate(
        norm, T, x_lo, x_hi, tol, max_iter
    )
    met = np.abs(below - above).max() < 10 * tol
    solution = 0.5 * (below + above) if met else below
    res = system.residual_inf(solution)
    if res > max(100 * tol, 1e-8):
        raise ConvergenceError(
            f"residual {res:.3e} above tolerance after {max_iter} iterations",
            bracket=(below, above),
        )
    return SolveResult(
        solution=solution,
        residual_inf=res,
        iters_below=ib,
        iters_above=ia,
        lower_trace=lo_tr,
        upper_trace=hi_tr,
        unique_certified=bool(met),
        bracket=(x_lo, x_hi),
    )


def solve_m_tensor(
    system: PolySystem,
    tol: float = DEFAULT_TOL,
    max_iter: int = MAX_OUTER,
) -> SolveResult:
    """Minimal/maximal fixed points for systems whose terms all pass the M test."""
    for t in system.terms:
        is_m, _, _ = _m_tensor_test(t, tol=1e-10, max_iter=10_000)
        if not is_m:
            raise NotApplicableError(f"order-{t.order} term fails the M-tensor test")
    norm = normalize_rhs(system)
    cert = shared_certificate(norm.terms)
    if cert is None:
        raise CertificateNotFoundError("no shared positive certificate found")
    t_sc, w = bracket_scalars(norm, cert)
    T, _ = _fixed_point_map(norm)
    x_hi = w * cert
    # from below: first step maps 0 to f^{-1}(1) > 0
    x_lo = np.zeros(norm.dim)
    below, above, lo_tr, hi_tr, ib, ia = _two_sided_iterate(
        norm, T, x_lo, x_hi, tol, max_iter
    )
    met = np.abs(below - above).max() < 10 * tol
    solution = 0.5 * (below + above) if met else below
    tag = "positive" if met and np.all(solution > 0) else "boundary-inconclusive"
    return SolveResult(
        solution=solution,
        residual_inf=system.residual_inf(solution),
        iters_below=ib,
        iters_above=ia,
        lower_trace=lo_tr,
        upper_trace=hi_tr,
        unique_certified=bool(met),
        bracket=(x_lo, x_hi),
        tag=tag,
    )


def picard_map(system: PolySystem) -> Callable:
    """The plain iteration map T on the normalized system (for stress tests)."""
    norm = normalize_rhs(system)
    T, _ = _fixed_point_map(norm)
    return T
