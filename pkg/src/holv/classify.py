"""Tensor class tests: Metzler, diagonal dominance, M, H, H+, S, row-SDD.

All predicates are evaluated constructively. S-membership is only a
semi-decision: a positive certificate proves it, absence proves nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .tensor import CubicalTensor, comparison_tensor, identity_tensor, row_sums, tvp

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000


class NotNonnegativeError(ValueError):
    """Raised when a nonnegative tensor is required."""


@dataclass
class TensorClassReport:
    is_metzler: bool
    is_diag_dominant: bool
    is_strictly_diag_dominant: bool
    is_m_tensor: bool
    is_nonsingular_m: bool
    is_h_tensor: bool
    is_h_plus: bool
    is_generalized_row_sdd_pos_diag: bool
    s_certificate: Optional[np.ndarray]
    spectral_radius_of_majorant: Optional[float]

    def to_json_obj(self) -> dict:
        obj = asdict(self)
        if self.s_certificate is not None:
            obj["s_certificate"] = [float(v) for v in self.s_certificate]
        return obj


def spectral_radius_nonneg(
    B: CubicalTensor,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> float:
    """Perron value of a nonnegative tensor by power iteration.

    Uses the iteration x <- (B x^{m-1})^{[1/(m-1)]} normalized, with the
    min/max Collatz quotients as a bracket. Reducible tensors are handled
    by a small all-ones shift computed at two magnitudes and extrapolated
    linearly to zero shift.
    """
    if not B.is_nonnegative():
        raise NotNonnegativeError("spectral radius requires a nonnegative tensor")
    max_entry = float(B.entries.max(initial=0.0))
    if max_entry == 0.0:
        return 0.0
    if is_irreducible(B):
        rho, _, _ = _power_iteration(B, tol, max_iter)
        return rho
    eps = 1e-9 * max_entry
    rho1 = _shifted_radius(B, eps, tol, max_iter)
    rho2 = _shifted_radius(B, eps / 10.0, tol, max_iter)
    # linear extrapolation to eps -> 0
    return rho2 + (rho2 - rho1) / 9.0


def _shifted_radius(B, eps, tol, max_iter):
    shifted = CubicalTensor(B.order, B.dim, B.entries + eps)
    rho, _, _ = _power_iteration(shifted, tol, max_iter)
    return rho


def _power_iteration(B, tol, max_iter):
    """Collatz-bracketed power iteration; B must have a positive iterate map."""
    m, n = B.order, B.dim
    x = np.ones(n)
    lower, upper = 0.0, np.inf
    for _ in range(max_iter):
        y = tvp(B, x)
        if np.any(y <= 0):
            # fall back to a strictly positive start mixing in the ones vector
            y = y + 1e-300
        quot = y / x ** (m - 1)
        lower, upper = float(quot.min()), float(quot.max())
        if upper - lower < tol:
            return 0.5 * (lower + upper), lower, upper
        x = y ** (1.0 / (m - 1))
        x = x / x.max()
    return 0.5 * (lower + upper), lower, upper


def is_irreducible(A: CubicalTensor) -> bool:
    """Strong connectivity of the off-diagonal support digraph.

    Edge j -> i whenever some off-diagonal entry A[i, ..., j, ...] != 0.
    """
    n = A.dim
    if n == 1:
        return False
    adj = np.zeros((n, n), dtype=bool)
    mask = A.offdiag_mask()
    nz = np.argwhere((A.entries != 0) & mask)
    for idx in nz:
        i = idx[0]
        for j in idx[1:]:
            if j != i:
                adj[j, i] = True
    ncomp, _ = connected_components(sp.csr_matrix(adj), directed=True, connection="strong")
    return ncomp == 1


def s_tensor_certificate(
    A: CubicalTensor,
    hint: Optional[np.ndarray] = None,
    max_iter: int = 500,
) -> Optional[np.ndarray]:
    """Search for v > 0 with min_i (A v^{m-1})_i > 0.

    Strategy order: user hint, the all-ones vector, then multiplicative
    subgradient ascent of the min-component objective over the positive
    simplex. Returns None when nothing is found (inconclusive).
    """

    def accepted(v):
        return v is not None and np.all(v > 0) and tvp(A, v).min() > 0

    if hint is not None:
        v = np.asarray(hint, dtype=float)
        if accepted(v):
            return v
    ones = np.ones(A.dim)
    if accepted(ones):
        return ones
    v = ones / A.dim
    best = v.copy()
    best_val = tvp(A, v).min()
    step = 0.5
    for _ in range(max_iter):
        y = tvp(A, v)
        i = int(np.argmin(y))
        # subgradient of the active row's polynomial w.r.t. log-coordinates
        from .tensor import tvp_jacobian

        g = tvp_jacobian(A, v)[i] * v
        v = v * np.exp(step * g / (np.abs(g).max() + 1e-300))
        v = np.clip(v, 1e-12, None)
        v = v / v.sum()
        val = tvp(A, v).min()
        if val > best_val:
            best, best_val = v.copy(), val
        else:
            step *= 0.7
        if best_val > 0:
            return best
    return None


def is_generalized_row_sdd_pos_diag(A: CubicalTensor) -> bool:
    diag = A.diagonal()
    if np.any(diag <= 0):
        return False
    for i in range(1, A.dim + 1):
        _, r_minus = row_sums(A, i)
        if abs(diag[i - 1]) - r_minus <= 0:
            return False
    return True


def _m_tensor_test(A: CubicalTensor, tol: float, max_iter: int):
    """Returns (is_m, is_nonsingular_m, rho_of_majorant or None)."""
    off = A.entries[A.offdiag_mask()]
    if off.size and off.max(initial=0.0) > 0:
        return False, False, None
    s = float(A.diagonal().max())
    if s < 0:
        return False, False, None
    B = CubicalTensor(A.order, A.dim, s * identity_tensor(A.order, A.dim).entries - A.entries)
    rho = spectral_radius_nonneg(B, tol=min(tol, 1e-12), max_iter=max_iter)
    return s >= rho - tol, s > rho + tol, rho


def classify(
    A: CubicalTensor,
    s_hint: Optional[np.ndarray] = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> TensorClassReport:
    """Evaluate the full classification ladder for a cubical tensor."""
    diag = A.diagonal()
    dd = True
    sdd = True
    for i in range(1, A.dim + 1):
        r_plus, r_minus = row_sums(A, i)
        off_abs = r_plus + r_minus
        if abs(diag[i - 1]) < off_abs:
            dd = False
        if abs(diag[i - 1]) <= off_abs:
            sdd = False
    is_m, is_nm, rho = _m_tensor_test(A, tol, max_iter)
    comp = comparison_tensor(A)
    comp_m, comp_nm, comp_rho = _m_tensor_test(comp, tol, max_iter)
    is_h = comp_m
    is_h_plus = comp_nm and bool(np.all(diag > 0))
    cert = s_tensor_certificate(A, hint=s_hint)
    report = TensorClassReport(
        is_metzler=A.is_metzler(),
        is_diag_dominant=dd,
        is_strictly_diag_dominant=sdd,
        is_m_tensor=is_m,
        is_nonsingular_m=is_nm,
        is_h_tensor=is_h,
        is_h_plus=is_h_plus,
        is_generalized_row_sdd_pos_diag=is_generalized_row_sdd_pos_diag(A),
        s_certificate=cert,
        spectral_radius_of_majorant=rho if rho is not None else comp_rho,
    )
    return report
