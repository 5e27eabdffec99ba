"""Adaptive trajectory integration with positivity handling.

Dormand-Prince 5(4) embedded pair with proportional-integral step control.
Components that start at exactly zero are pinned to zero for the whole run;
components drifting slightly negative are clamped back to zero with an event
record. Runs terminate early on convergence (vanishing vector field) or
divergence (state escaping a cap).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

import numpy as np

from . import lv as _lv

# Dormand-Prince RK5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


@dataclass
class SimOptions:
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    conv_tol: float = 1e-9
    diverge_cap: float = 1e6
    max_steps: int = 1_000_000


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), n)
    terminal: str  # converged | diverged | max_time
    stats: dict = field(default_factory=dict)
    events: list = field(default_factory=list)  # (t, index, "clamped")

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def write_csv(self, fh: TextIO):
        n = self.states.shape[1]
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t"] + [f"x{i + 1}" for i in range(n)])
        for t, x in zip(self.times, self.states):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in x])
        fh.write(f"# terminal: {self.terminal}\n")


class NonFiniteStateError(RuntimeError):
    def __init__(self, trajectory: Trajectory):
        super().__init__("state became non-finite; returning last good step")
        self.trajectory = trajectory


def simulate(
    model: _lv.LVModel,
    x0: np.ndarray,
    t_end: float,
    opts: Optional[SimOptions] = None,
) -> Trajectory:
    opts = opts or SimOptions()
    x0 = np.asarray(x0, dtype=float)
    if np.any(x0 < 0):
        raise ValueError("initial condition must be nonnegative")
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    pinned = x0 == 0.0

    def f(x):
        v = _lv.rhs(model, x)
        v[pinned] = 0.0
        return v

    n = model.dim
    t = 0.0
    x = x0.copy()
    times = [t]
    states = [x.copy()]
    events: list = []
    k1 = f(x)
    # initial step from the scale of the field
    scale = opts.abs_tol + opts.rel_tol * np.abs(x)
    d0 = np.sqrt(np.mean((x / scale) ** 2))
    d1 = np.sqrt(np.mean((k1 / scale) ** 2))
    h = min(t_end, 0.01 * d0 / d1 if d1 > 1e-10 else 1e-3)
    h = max(h, 1e-10)
    accepted = rejected = 0
    err_prev = 1.0
    terminal = "max_time"
    K = np.zeros((7, n))
    while t < t_end and accepted + rejected < opts.max_steps:
        h = min(h, t_end - t)
        K[0] = k1
        for s in range(1, 7):
            xs = x + h * (np.asarray(_A[s]) @ K[:s])
            K[s] = f(xs)
        x5 = x + h * (_B5 @ K)
        x4 = x + h * (_B4 @ K)
        if not np.all(np.isfinite(x5)):
            if h > 1e-12:
                h *= 0.25
                rejected += 1
                continue
            traj = Trajectory(
                np.asarray(times), np.asarray(states), "diverged",
                {"accepted": accepted, "rejected": rejected}, events,
            )
            raise NonFiniteStateError(traj)
        scale = opts.abs_tol + opts.rel_tol * np.maximum(np.abs(x), np.abs(x5))
        err = np.sqrt(np.mean(((x5 - x4) / scale) ** 2))
        if err <= 1.0:
            t += h
            x = x5
            x[pinned] = 0.0
            clamp = (x < 0) & (x > -opts.abs_tol)
            for i in np.flatnonzero(clamp):
                events.append((t, int(i) + 1, "clamped"))
            x[clamp] = 0.0
            times.append(t)
            states.append(x.copy())
            accepted += 1
            k1 = f(x)  # FSAL would reuse K[6]; recompute after clamping
            if np.abs(k1).max() < opts.conv_tol:
                terminal = "converged"
                break
            if np.abs(x).max() > opts.diverge_cap:
                terminal = "diverged"
                break
            # PI step-size control
            fac = 0.9 * err ** -0.14 * err_prev**0.08 if err > 1e-14 else 5.0
            h *= min(5.0, max(0.2, fac))
            err_prev = max(err, 1e-14)
            if np.abs(k1).max() < 1e-4:
                # near an equilibrium the controller can park on the linear
                # stability boundary; cap h to keep the step strictly inside
                rho_j = np.abs(np.linalg.eigvals(_lv.jacobian(model, x))).max()
                if rho_j > 0:
                    h = min(h, 3.0 / rho_j)
        else:
            rejected += 1
            h *= max(0.2, 0.9 * err**-0.2)
    stats = {"accepted": accepted, "rejected": rejected}
    return Trajectory(np.asarray(times), np.asarray(states), terminal, stats, events)


def detect_limit(
    trajectory: Trajectory, model: _lv.LVModel
) -> Optional[_lv.EquilibriumReport]:
    """Newton-refine the converged end state on its support and classify it."""
    if trajectory.terminal != "converged":
        raise ValueError("limit detection needs a converged trajectory")
    x = trajectory.final_state
    refined = _lv.refine_on_support(model, x)
    if refined is None:
        report = _lv.classify_equilibrium(model, np.where(x > _lv.SUPPORT_TOL, x, 0.0),
                                          tol=1e-4)
        report.refined = False
        return report
    return _lv.classify_equilibrium(model, refined)


def run_batch(
    model: _lv.LVModel,
    initial_conditions: Sequence[np.ndarray],
    t_end: float,
    opts: Optional[SimOptions] = None,
    seed: Optional[int] = None,
) -> dict:
    """Simulate many initial conditions; manifest lists run ids and outcomes."""
    runs = []
    trajectories = []
    for run_id, x0 in enumerate(initial_conditions):
        traj = simulate(model, np.asarray(x0, dtype=float), t_end, opts)
        trajectories.append(traj)
        entry = {
            "run_id": run_id,
            "seed": seed,
            "terminal": traj.terminal,
            "final_state": traj.final_state.tolist(),
        }
        if traj.terminal == "converged":
            report = detect_limit(traj, model)
            if report is not None:
                entry["support"] = list(report.support)
                entry["hurwitz"] = report.hurwitz
        runs.append(entry)
    return {"runs": runs, "trajectories": trajectories}


def manifest_json(batch: dict) -> str:
    return json.dumps({"runs": batch["runs"]}, indent=2)
