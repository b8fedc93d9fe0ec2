"""Cross-checks between the closed-form profile and the shooting solver.

Two independent routes produce the same spike: direct evaluation of the
closed form, and numerical integration from the refined amplitude.  This
module quantifies their agreement (:func:`compare`), checks that the closed
form actually solves the equation (:func:`ode_residual`, using the
analytically derived second derivative rather than the ODE itself), and
monitors conservation of the phase-plane energy along integrated
trajectories (:func:`check_first_integral`).  Central finite differences
are available as a further, discretization-based route
(:func:`fd_second_derivative`, :func:`fd_residual`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import (
    ProblemParams,
    eval_spike_rho,
    eval_spike_second_derivative,
)
from .ode import Trajectory, hamiltonian
from .shooting import ShootingResult, eval_profile

__all__ = [
    "ComparisonReport",
    "ode_residual",
    "fd_second_derivative",
    "fd_residual",
    "compare",
    "check_first_integral",
]


@dataclass(frozen=True)
class ComparisonReport:
    """Grid-wise agreement between analytic and shooting profiles."""

    grid: tuple[float, ...]
    analytic: tuple[float, ...]
    numeric: tuple[float, ...]
    numeric_v: tuple[float, ...]
    max_abs_err: float
    l2_err: float
    p: float
    kind: str
    settings_echo: dict

    def rows(self):
        """Yield (rho, analytic, numeric, numeric_v, abs_error) per grid point."""
        for rho, ua, un, vn in zip(self.grid, self.analytic, self.numeric, self.numeric_v):
            yield rho, ua, un, vn, abs(ua - un)


def ode_residual(params: ProblemParams, rho_grid) -> list[float]:
    """Residual u'' - u + u**p of the closed form on a grid.

    u'' comes from the independently derived second-derivative formula, so
    a small residual certifies the algebra of all three closed forms rather
    than restating the equation.
    """
    out = []
    for rho in rho_grid:
        u = eval_spike_rho(params, rho)
        upp = eval_spike_second_derivative(params, rho)
        out.append(upp - u + math.pow(u, params.p))
    return out


def fd_second_derivative(params: ProblemParams, rho: float, h: float = 1e-4) -> float:
    """O(h**2) central-difference second derivative of the closed form."""
    if not (h > 0.0):
        raise ValueError("h must be positive")
    um = eval_spike_rho(params, rho - h)
    u0 = eval_spike_rho(params, rho)
    up = eval_spike_rho(params, rho + h)
    return (up - 2.0 * u0 + um) / (h * h)


def fd_residual(params: ProblemParams, rho: float, h: float = 1e-4) -> float:
    """Residual with the second derivative replaced by finite differences."""
    u = eval_spike_rho(params, rho)
    return fd_second_derivative(params, rho, h) - u + math.pow(u, params.p)


def compare(params: ProblemParams, result: ShootingResult, rho_grid) -> ComparisonReport:
    """Evaluate both routes on a grid and report max and rms errors.

    The numeric values come from the integrator's dense output through
    :func:`gmspike.shooting.eval_profile`.  Requires a converged shooting
    result and a grid inside the integrated span.
    """
    if not result.converged:
        raise ValueError(
            "comparison requires a converged shooting result "
            f"(bc_residual={result.bc_residual!r} exceeds eta)"
        )
    grid = tuple(float(r) for r in rho_grid)
    if not grid:
        raise ValueError("rho_grid must not be empty")
    analytic = []
    numeric = []
    numeric_v = []
    for rho in grid:
        analytic.append(eval_spike_rho(params, rho))
        state = eval_profile(result, rho)
        numeric.append(state.u)
        numeric_v.append(state.v)
    abs_errs = [abs(a - n) for a, n in zip(analytic, numeric)]
    max_abs_err = max(abs_errs)
    l2_err = math.sqrt(sum(e * e for e in abs_errs) / len(abs_errs))
    return ComparisonReport(
        grid=grid,
        analytic=tuple(analytic),
        numeric=tuple(numeric),
        numeric_v=tuple(numeric_v),
        max_abs_err=max_abs_err,
        l2_err=l2_err,
        p=params.p,
        kind=params.kind.value,
        settings_echo={
            "params": {
                "p": params.p,
                "epsilon": params.epsilon,
                "half_length": params.half_length,
                "peak_rho": params.peak_rho,
                "kind": params.kind.value,
            },
            "shooting": {
                "delta": result.config.delta,
                "eta": result.config.eta,
                "rho_l": result.config.rho_l,
                "scan_points": result.config.scan_points,
                "refine_tol": result.config.refine_tol,
                "max_bisections": result.config.max_bisections,
            },
            "integrator": {
                "rel_tol": result.integrator_config.rel_tol,
                "abs_tol": result.integrator_config.abs_tol,
                "h_init": result.integrator_config.h_init,
                "h_min": result.integrator_config.h_min,
                "h_max": result.integrator_config.h_max,
                "u_cap": result.integrator_config.u_cap,
            },
        },
    )


def check_first_integral(trajectory: Trajectory, p: float) -> float:
    """Maximum drift of the conserved energy over the trajectory samples."""
    first = hamiltonian(trajectory.samples[0][1], p)
    drift = 0.0
    for _, state in trajectory.samples:
        drift = max(drift, abs(hamiltonian(state, p) - first))
    return drift
