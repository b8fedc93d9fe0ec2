"""Shooting solver that recovers the spike amplitude from the dynamics.

The spike orbit leaves the initial condition (a, 0) and must approach the
saddle (0, 0), so the peak amplitude a is found by a scan-and-bisect search
on the phase plane:

* amplitudes above the spike height overshoot (u falls through 0 with
  v < 0),
* amplitudes below it undershoot (v turns through 0 while 0 < u < a),
* the spike itself connects, reaching the truncated endpoint rho_l with
  the boundary functional |u| + |v| at most eta.

The scan covers [amplitude - delta, amplitude + delta]; the first
undershoot-to-overshoot transition brackets the answer and plain bisection
refines it.  Refinement stops early when a midpoint already connects: once
the bracket is tighter than the separation the truncated horizon can
resolve, under and over events stop firing and the midpoint is the answer
to within the achievable accuracy.

Boundary spikes reuse the same computation.  The system is autonomous and
even, so the profile peaking at the right endpoint rho = L / epsilon is the
inner solution reflected; :func:`eval_profile` maps between the domain
coordinate and the integrated distance-from-peak frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .analytic import ProblemParams, SpikeKind, spike_amplitude
from .ode import (
    IntegratorConfig,
    State,
    TerminalEvent,
    Trajectory,
    default_integrator_config,
    hamiltonian,
    integrate,
)

__all__ = [
    "DEFAULT_RHO_L",
    "Verdict",
    "ShootingConfig",
    "ScanEntry",
    "ScanResult",
    "ShootingResult",
    "ShootingError",
    "NoBracketError",
    "classify",
    "scan",
    "shoot",
    "eval_profile",
]

# Truncation point of the far-field condition.  The profile decays like
# exp(-rho) for every admissible p, so u(12) ~ 1e-5 sits well inside the
# default eta = 0.01 acceptance band while keeping the amplitude truncation
# error exp(-rho_l) far below the 1e-4 accuracy target.
DEFAULT_RHO_L = 12.0


class Verdict(Enum):
    OVERSHOOT = "overshoot"
    UNDERSHOOT = "undershoot"
    CONNECT = "connect"


class ShootingError(RuntimeError):
    """Integration inside the shooting loop failed."""


class NoBracketError(ShootingError):
    """The scan produced neither a sign change nor a connecting amplitude."""

    def __init__(self, message: str, scan_result: "ScanResult") -> None:
        super().__init__(message)
        self.scan_result = scan_result


@dataclass(frozen=True)
class ShootingConfig:
    delta: float = 0.1
    eta: float = 0.01
    rho_l: float = DEFAULT_RHO_L
    scan_points: int = 41
    refine_tol: float = 1e-10
    max_bisections: int = 200

    def __post_init__(self) -> None:
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ValueError("delta must be positive")
        if not (self.eta > 0.0 and math.isfinite(self.eta)):
            raise ValueError("eta must be positive")
        if not (self.rho_l > 0.0 and math.isfinite(self.rho_l)):
            raise ValueError("rho_l must be positive")
        if self.scan_points < 3:
            raise ValueError("scan_points must be at least 3")
        if not (self.refine_tol > 0.0):
            raise ValueError("refine_tol must be positive")
        if self.max_bisections < 1:
            raise ValueError("max_bisections must be at least 1")


@dataclass(frozen=True)
class ScanEntry:
    a: float
    verdict: Verdict
    bc_residual: float


@dataclass(frozen=True)
class ScanResult:
    entries: tuple[ScanEntry, ...]
    bracket: tuple[float, float] | None

    @property
    def has_bracket(self) -> bool:
        return self.bracket is not None


@dataclass(frozen=True)
class ShootingResult:
    """Refined amplitude plus the evidence that produced it.

    ``bc_residual`` is |u| + |v| at the final sample of the accepted
    trajectory (at rho_l, or at the terminating event if one fired first);
    ``signed_bc_residual`` is u + v there.  ``classifications`` lists every
    amplitude examined, scan points first, bisection midpoints after.
    """

    a_star: float
    trajectory: Trajectory
    bc_residual: float
    classifications: tuple[tuple[float, Verdict], ...]
    converged: bool
    signed_bc_residual: float
    bracket_history: tuple[tuple[float, float], ...]
    params: ProblemParams
    config: ShootingConfig
    integrator_config: IntegratorConfig


def _classify_run(
    a: float,
    p: float,
    rho_l: float,
    config: IntegratorConfig,
    eta: float,
) -> tuple[Verdict, Trajectory, float, float]:
    if not (a > 0.0 and math.isfinite(a)):
        raise ValueError(f"amplitude must be positive, got {a!r}")
    trajectory = integrate(State(a, 0.0), 0.0, rho_l, p, config)
    if trajectory.terminal_event is TerminalEvent.STEP_FAILURE:
        raise ShootingError(f"step size underflow while integrating amplitude {a!r}")
    if trajectory.terminal_event is TerminalEvent.U_EXCEEDED_CAP:
        raise ShootingError(
            f"u exceeded the safety cap for amplitude {a!r}; the scan window "
            "does not produce such orbits"
        )
    last_state = trajectory.samples[-1][1]
    residual = abs(last_state.u) + abs(last_state.v)
    signed = last_state.u + last_state.v

    turned = any(0.0 < s.u < a for _, s in trajectory.v_zero_crossings)
    if turned:
        verdict = Verdict.UNDERSHOOT
    elif trajectory.terminal_event is TerminalEvent.U_CROSSED_ZERO:
        verdict = Verdict.OVERSHOOT
    elif residual <= eta:
        verdict = Verdict.CONNECT
    else:
        # Horizon reached with no event and the functional still large: the
        # orbit is still descending the spike.  The conserved energy of the
        # computed endpoint tells which side it will eventually fall to.
        verdict = (
            Verdict.UNDERSHOOT
            if hamiltonian(last_state, p) < 0.0
            else Verdict.OVERSHOOT
        )
    return verdict, trajectory, residual, signed


def classify(
    a: float,
    p: float,
    rho_l: float,
    config: IntegratorConfig | None = None,
    eta: float = 0.01,
) -> Verdict:
    """Classify one shot from (a, 0) as overshoot, undershoot, or connect."""
    if config is None:
        config = default_integrator_config(p)
    verdict, _, _, _ = _classify_run(a, p, rho_l, config, eta)
    return verdict


def scan(
    params: ProblemParams,
    config: ShootingConfig | None = None,
    integrator_config: IntegratorConfig | None = None,
) -> ScanResult:
    """Classify scan_points amplitudes across [amplitude - delta, amplitude + delta].

    The bracket, when present, spans from the last undershoot to the first
    overshoot; connecting points in between do not widen it.
    """
    if config is None:
        config = ShootingConfig()
    p = params.p
    amp = spike_amplitude(p)
    if amp - config.delta <= 0.0:
        raise ValueError("scan window must stay at positive amplitudes")
    if integrator_config is None:
        integrator_config = default_integrator_config(p)

    n = config.scan_points
    step = 2.0 * config.delta / (n - 1)
    entries = []
    for i in range(n):
        a = amp - config.delta + i * step
        verdict, _, residual, _ = _classify_run(a, p, config.rho_l, integrator_config, config.eta)
        entries.append(ScanEntry(a=a, verdict=verdict, bc_residual=residual))

    last_under = None
    first_over = None
    for i, entry in enumerate(entries):
        if entry.verdict is Verdict.UNDERSHOOT:
            last_under = i
        elif entry.verdict is Verdict.OVERSHOOT and first_over is None:
            first_over = i
    bracket = None
    if last_under is not None and first_over is not None and last_under < first_over:
        bracket = (entries[last_under].a, entries[first_over].a)
    return ScanResult(entries=tuple(entries), bracket=bracket)


def shoot(
    params: ProblemParams,
    config: ShootingConfig | None = None,
    integrator_config: IntegratorConfig | None = None,
) -> ShootingResult:
    """Scan, bracket, and bisect to the spike amplitude.

    Bisection halves the bracket until it is narrower than refine_tol,
    stopping early if a midpoint connects outright.  Without a bracket the
    connecting scan point with the smallest boundary residual is taken.
    Raises :class:`NoBracketError` when the scan neither brackets nor
    connects.
    """
    if config is None:
        config = ShootingConfig()
    p = params.p
    if integrator_config is None:
        integrator_config = default_integrator_config(p)

    scan_result = scan(params, config, integrator_config)
    classifications: list[tuple[float, Verdict]] = [
        (e.a, e.verdict) for e in scan_result.entries
    ]
    bracket_history: list[tuple[float, float]] = []

    if scan_result.bracket is not None:
        lo, hi = scan_result.bracket
        bracket_history.append((lo, hi))
        a_star = 0.5 * (lo + hi)
        for _ in range(config.max_bisections):
            if hi - lo <= config.refine_tol:
                a_star = 0.5 * (lo + hi)
                break
            mid = 0.5 * (lo + hi)
            verdict, _, _, _ = _classify_run(mid, p, config.rho_l, integrator_config, config.eta)
            classifications.append((mid, verdict))
            if verdict is Verdict.CONNECT:
                a_star = mid
                break
            if verdict is Verdict.UNDERSHOOT:
                lo = mid
            else:
                hi = mid
            bracket_history.append((lo, hi))
            a_star = 0.5 * (lo + hi)
        else:
            raise ShootingError(
                f"bisection did not reach refine_tol within {config.max_bisections} iterations"
            )
    else:
        connecting = [e for e in scan_result.entries if e.verdict is Verdict.CONNECT]
        if not connecting:
            raise NoBracketError(
                "scan found no undershoot-to-overshoot transition and no "
                "connecting amplitude",
                scan_result,
            )
        best = min(connecting, key=lambda e: e.bc_residual)
        a_star = best.a

    verdict, trajectory, residual, signed = _classify_run(
        a_star, p, config.rho_l, integrator_config, config.eta
    )
    classifications.append((a_star, verdict))
    return ShootingResult(
        a_star=a_star,
        trajectory=trajectory,
        bc_residual=residual,
        classifications=tuple(classifications),
        converged=residual <= config.eta,
        signed_bc_residual=signed,
        bracket_history=tuple(bracket_history),
        params=params,
        config=config,
        integrator_config=integrator_config,
    )


def eval_profile(result: ShootingResult, rho: float) -> State:
    """Shooting profile at a domain coordinate rho.

    The trajectory is integrated in the distance-from-peak frame; inner
    spikes extend to rho < peak by evenness (u even, v odd) and boundary
    spikes are the reflection peaking at the right endpoint, so v flips
    sign on the interior side.  Raises for rho beyond the integrated span
    or, for boundary spikes, past the domain edge.
    """
    params = result.params
    delta = rho - params.peak_rho
    if params.kind is SpikeKind.BOUNDARY and delta > 1e-9:
        raise ValueError(
            f"rho={rho!r} lies outside the domain; the boundary spike peaks "
            f"at the right endpoint rho={params.peak_rho!r}"
        )
    state = result.trajectory.eval(abs(delta))
    if delta < 0.0:
        return State(state.u, -state.v)
    return state
