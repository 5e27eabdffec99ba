"""Kernel backend selection.

The compiled extension is preferred when it imports cleanly; otherwise the
numpy fallback is used. ``BACKEND`` records which one is active so tests and
benchmarks can compare both. The compiled loops beat the BLAS-backed fallback
only on small tensors (the hot regime: repeated contractions on low-dimensional
models), so dispatch is size-aware.
"""

from __future__ import annotations

from . import _kernels_np

# entry-count threshold below which the compiled loops win (measured in
# benchmarks/bench_kernels.py; crossover is near n**m ~ 1000)
_SMALL = 1024

try:
    from . import _kernels as _compiled

    BACKEND = "compiled"

    def tvp(entries, x):
        if entries.size <= _SMALL:
            return _compiled.tvp(entries, x)
        return _kernels_np.tvp(entries, x)

    def tvp_jacobian(entries, x):
        if entries.size <= _SMALL:
            return _compiled.tvp_jacobian(entries, x)
        return _kernels_np.tvp_jacobian(entries, x)

    tvp_compiled = _compiled.tvp
    tvp_jacobian_compiled = _compiled.tvp_jacobian
except ImportError:  # extension not built on this interpreter
    BACKEND = "python"
    tvp = _kernels_np.tvp
    tvp_jacobian = _kernels_np.tvp_jacobian
    tvp_compiled = None
    tvp_jacobian_compiled = None

# always-available references for cross-checking backends
tvp_python = _kernels_np.tvp
tvp_jacobian_python = _kernels_np.tvp_jacobian
