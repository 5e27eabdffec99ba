"""Pure-numpy implementations of the dense contraction kernels.

These are the fallback used when the compiled extension is unavailable.
Semantics match ``holv._kernels``: dense summation over all multi-indices.
"""

from __future__ import annotations

import numpy as np

_LETTERS = "abcdefgh"


def tvp(entries: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Contract an order-m cubical tensor with x over the last m-1 modes.

    Returns the vector with components sum_{i2..im} A[i,i2,..,im] x_{i2}..x_{im}.
    """
    m = entries.ndim
    if m == 1:
        return entries.copy()
    v = x
    for _ in range(m - 2):
        v = np.multiply.outer(v, x).ravel()
    return entries.reshape(entries.shape[0], -1) @ v


def tvp_jacobian(entries: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Derivative of ``tvp`` with respect to x, an n-by-n matrix."""
    m = entries.ndim
    n = entries.shape[0]
    if m == 2:
        return np.array(entries, dtype=float, copy=True)
    J = np.zeros((n, n))
    subs = "z" + _LETTERS[: m - 1]
    for p in range(1, m):
        operands = [entries]
        contracted = []
        for q in range(1, m):
            if q != p:
                operands.append(x)
                contracted.append(_LETTERS[q - 1])
        script = subs + "," + ",".join(contracted) + "->z" + _LETTERS[p - 1]
        J += np.einsum(script, *operands)
    return J
