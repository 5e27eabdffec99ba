"""Higher-order Lotka-Volterra toolkit.

Tensor algebra and classification, monotone fixed-point solvers for
polynomial tensor equations, quadratic complementarity analysis, and
equilibrium finding / classification / simulation for Lotka-Volterra
dynamics with three-body interactions.
"""

from .kernels import BACKEND
from .tensor import (
    CubicalTensor,
    DimensionMismatchError,
    comparison_tensor,
    hadamard_power,
    identity_tensor,
    row_sums,
    tvp,
    tvp_jacobian,
)
from .classify import (
    TensorClassReport,
    classify,
    is_irreducible,
    s_tensor_certificate,
    spectral_radius_nonneg,
)
from .polysolve import (
    PolySystem,
    SolveResult,
    solve_m_tensor,
    solve_s_tensor,
)
from .pcp import (
    QcpProblem,
    PcpSolution,
    NormBounds,
    brute_force_solve,
    leading_sol_zero,
    norm_bounds,
    support_enumeration,
)
from .lv import (
    EquilibriumReport,
    LVModel,
    classify_equilibrium,
    continuation,
    find_equilibria,
    global_stability_conditions,
    jacobian,
    metzler_hurwitz_certificate,
    random_scenario,
    rhs,
    wta_check,
)
from .sim import SimOptions, Trajectory, detect_limit, simulate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CubicalTensor",
    "DimensionMismatchError",
    "EquilibriumReport",
    "LVModel",
    "NormBounds",
    "PcpSolution",
    "PolySystem",
    "QcpProblem",
    "SimOptions",
    "SolveResult",
    "TensorClassReport",
    "Trajectory",
    "brute_force_solve",
    "classify",
    "classify_equilibrium",
    "comparison_tensor",
    "continuation",
    "detect_limit",
    "find_equilibria",
    "global_stability_conditions",
    "hadamard_power",
    "identity_tensor",
    "is_irreducible",
    "jacobian",
    "leading_sol_zero",
    "metzler_hurwitz_certificate",
    "norm_bounds",
    "random_scenario",
    "rhs",
    "row_sums",
    "s_tensor_certificate",
    "simulate",
    "solve_m_tensor",
    "solve_s_tensor",
    "spectral_radius_nonneg",
    "support_enumeration",
    "tvp",
    "tvp_jacobian",
    "wta_check",
]
