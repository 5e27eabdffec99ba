"""Dense cubical tensors and their basic algebra.

A cubical tensor of order m and dimension n holds n**m real entries in
row-major order. Instances are immutable; every operation returns a new
object or a fresh array.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import kernels


class DimensionMismatchError(ValueError):
    """Raised when operand shapes are incompatible."""


@dataclass(frozen=True)
class CubicalTensor:
    """Order-m, dimension-n dense real tensor."""

    order: int
    dim: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.order < 2:
            raise ValueError(f"order must be >= 2, got {self.order}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        arr = np.asarray(self.entries, dtype=float)
        if arr.size != self.dim**self.order:
            raise ValueError(
                f"expected {self.dim ** self.order} entries, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite")
        arr = arr.reshape((self.dim,) * self.order).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "CubicalTensor":
        arr = np.asarray(arr, dtype=float)
        return cls(order=arr.ndim, dim=arr.shape[0] if arr.ndim else 1, entries=arr)

    @classmethod
    def from_matrix(cls, mat: Iterable) -> "CubicalTensor":
        m = np.asarray(mat, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("expected a square matrix")
        return cls(order=2, dim=m.shape[0], entries=m)

    # -- elementwise algebra -----------------------------------------

    def __add__(self, other: "CubicalTensor") -> "CubicalTensor":
        self._check_same_shape(other)
        return CubicalTensor(self.order, self.dim, self.entries + other.entries)

    def __sub__(self, other: "CubicalTensor") -> "CubicalTensor":
        self._check_same_shape(other)
        return CubicalTensor(self.order, self.dim, self.entries - other.entries)

    def __neg__(self) -> "CubicalTensor":
        return CubicalTensor(self.order, self.dim, -self.entries)

    def scale(self, c: float) -> "CubicalTensor":
        return CubicalTensor(self.order, self.dim, c * self.entries)

    def _check_same_shape(self, other: "CubicalTensor"):
        if self.order != other.order or self.dim != other.dim:
            raise DimensionMismatchError(
                f"shape mismatch: [{self.order},{self.dim}] vs "
                f"[{other.order},{other.dim}]"
            )

    # -- structure queries -------------------------------------------

    def diagonal(self) -> np.ndarray:
        idx = np.arange(self.dim)
        return self.entries[(idx,) * self.order]

    def offdiag_mask(self) -> np.ndarray:
        """Boolean mask of non-diagonal positions."""
        mask = np.ones(self.entries.shape, dtype=bool)
        idx = np.arange(self.dim)
        mask[(idx,) * self.order] = False
        return mask

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        return bool(np.all(self.entries >= -tol))

    def is_metzler(self) -> bool:
        return bool(np.all(self.entries[self.offdiag_mask()] >= 0.0))

    # -- serialization ------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "order": self.order,
            "dim": self.dim,
            "entries": self.entries.ravel().tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "CubicalTensor":
        order = int(obj["order"])
        dim = int(obj["dim"])
        if "entries" in obj:
            return cls(order=order, dim=dim, entries=np.asarray(obj["entries"]))
        if "nonzeros" in obj:
            arr = np.zeros((dim,) * order)
            for nz in obj["nonzeros"]:
                idx = tuple(int(i) - 1 for i in nz["idx"])  # indices are 1-based
                if len(idx) != order or any(i < 0 or i >= dim for i in idx):
                    raise ValueError(f"index {nz['idx']} out of range")
                arr[idx] = float(nz["val"])
            return cls(order=order, dim=dim, entries=arr)
        raise ValueError("tensor literal needs 'entries' or 'nonzeros'")

    @classmethod
    def from_json(cls, text: str) -> "CubicalTensor":
        return cls.from_json_obj(json.loads(text))


# -- products ---------------------------------------------------------


def tvp(A: CubicalTensor, x: np.ndarray) -> np.ndarray:
    """Tensor-vector product: (A x^{m-1})_i = sum A[i,i2..im] x_{i2}..x_{im}."""
    x = np.asarray(x, dtype=float)
    if x.shape != (A.dim,):
        raise DimensionMismatchError(
            f"x has shape {x.shape}, tensor dimension is {A.dim}"
        )
    return kernels.tvp(A.entries, x)


def tvp_jacobian(A: CubicalTensor, x: np.ndarray) -> np.ndarray:
    """Jacobian of x -> tvp(A, x); equals A itself when A is a matrix."""
    x = np.asarray(x, dtype=float)
    if x.shape != (A.dim,):
        raise DimensionMismatchError(
            f"x has shape {x.shape}, tensor dimension is {A.dim}"
        )
    return kernels.tvp_jacobian(A.entries, x)


def hadamard_power(x: np.ndarray, p: float) -> np.ndarray:
    """Componentwise power x_i**p."""
    x = np.asarray(x, dtype=float)
    if p != int(p) and np.any(x < 0):
        raise ValueError("negative base with fractional exponent")
    return x**p


def identity_tensor(m: int, n: int) -> CubicalTensor:
    """Kronecker-delta tensor: 1 on the full diagonal, 0 elsewhere."""
    arr = np.zeros((n,) * m)
    idx = np.arange(n)
    arr[(idx,) * m] = 1.0
    return CubicalTensor(order=m, dim=n, entries=arr)


def comparison_tensor(A: CubicalTensor) -> CubicalTensor:
    """Absolute diagonal, negated-absolute off-diagonal."""
    arr = -np.abs(A.entries)
    idx = np.arange(A.dim)
    arr[(idx,) * A.order] = np.abs(A.diagonal())
    return CubicalTensor(A.order, A.dim, arr)


def row_sums(A: CubicalTensor, i: int) -> tuple[float, float]:
    """Off-diagonal row sums (nonnegative part, absolute negative part).

    ``i`` is 1-based to match the mathematical row numbering.
    """
    if not 1 <= i <= A.dim:
        raise IndexError(f"row index {i} out of range [1,{A.dim}]")
    row = A.entries[i - 1].ravel().copy()
    diag_flat = sum((i - 1) * A.dim**k for k in range(A.order - 1))
    row[diag_flat] = 0.0
    r_plus = float(row[row > 0].sum())
    r_minus = float(-row[row < 0].sum())
    return r_plus, r_minus
