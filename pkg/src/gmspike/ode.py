"""First-order spike system and an adaptive embedded Runge-Kutta integrator.

The second-order equation u'' - u + u**p = 0 becomes

    u' = v,    v' = u - u**p,

with equilibria (0, 0) (saddle) and (1, 0) (centre) and the conserved energy

    H(u, v) = v**2 / 2 - u**2 / 2 + u**(p + 1) / (p + 1),

which is exactly 0 on the spike orbit and is used as a drift diagnostic.

Integration uses the Dormand-Prince 5(4) embedded pair with the standard
quartic dense-output interpolant.  Every accepted step is scanned for sign
changes of u (against 0 and against a safety cap) and of v before the step
is committed, so phase-plane events cannot be skipped; their locations are
resolved to 1e-10 in rho by bisecting the dense interpolant.  Zero crossings
of u and cap crossings terminate the trajectory, zero crossings of v are
recorded for the shooting classifier.

For fractional p the right-hand side is undefined at u < 0; trajectories
are truncated at the u = 0 event, but the internal stage evaluations of the
step that straddles the crossing may probe slightly past it.  Those stages
use the sign-preserving extension u * |u|**(p - 1), which is C1 at 0 and
only ever influences the discarded part of the final step.  Integer p uses
the true power for all u.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from enum import Enum

from .analytic import spike_amplitude

__all__ = [
    "TerminalEvent",
    "State",
    "IntegratorConfig",
    "DenseSegment",
    "Trajectory",
    "default_integrator_config",
    "rhs",
    "hamiltonian",
    "integrate",
    "EVENT_LOCATION_TOL",
    "PROPAGATING_ORDER",
]

# Spatial resolution of event bisection on the dense interpolant.
EVENT_LOCATION_TOL = 1e-10

# The pair advances the fifth-order solution; the embedded fourth-order
# result only feeds the error estimate.
PROPAGATING_ORDER = 5

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0

# Dormand-Prince 5(4) tableau.
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

# Dense-output coefficients: on an accepted step the interpolant is
# y(theta) = y0 + h * (c1*theta + c2*theta**2 + c3*theta**3 + c4*theta**4)
# with c_j = sum_i P[i][j-1] * k_i.  Stage 2 does not contribute.
_P1 = (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432)
_P3 = (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799)
_P4 = (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072)
_P5 = (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632)
_P6 = (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844)
_P7 = (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423)


class TerminalEvent(Enum):
    REACHED_END = "reached_end"
    U_CROSSED_ZERO = "u_crossed_zero"
    U_EXCEEDED_CAP = "u_exceeded_cap"
    STEP_FAILURE = "step_failure"


@dataclass(frozen=True)
class State:
    """Phase-plane point (u, v) with v = du/drho."""

    u: float
    v: float


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = 0.1
    u_cap: float = 15.0

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if not (0.0 < self.h_min <= self.h_init <= self.h_max):
            raise ValueError("step bounds must satisfy 0 < h_min <= h_init <= h_max")
        if not (self.u_cap > 0.0):
            raise ValueError("u_cap must be positive")


def default_integrator_config(p: float, **overrides: float) -> IntegratorConfig:
    """Default tolerances with the runaway cap scaled to the spike height."""
    overrides.setdefault("u_cap", 10.0 * spike_amplitude(p))
    return IntegratorConfig(**overrides)


@dataclass(frozen=True)
class DenseSegment:
    """Quartic interpolant of one accepted step."""

    rho0: float
    h: float
    u0: float
    v0: float
    cu: tuple[float, float, float, float]
    cv: tuple[float, float, float, float]

    def eval_theta(self, theta: float) -> tuple[float, float]:
        cu1, cu2, cu3, cu4 = self.cu
        cv1, cv2, cv3, cv4 = self.cv
        u = self.u0 + self.h * theta * (cu1 + theta * (cu2 + theta * (cu3 + theta * cu4)))
        v = self.v0 + self.h * theta * (cv1 + theta * (cv2 + theta * (cv3 + theta * cv4)))
        return u, v

    def eval(self, rho: float) -> State:
        theta = (rho - self.rho0) / self.h
        u, v = self.eval_theta(theta)
        return State(u, v)


@dataclass
class Trajectory:
    """Result of one integration run.

    ``samples`` holds (rho, state) at the start point and after every
    accepted (possibly event-truncated) step, with strictly increasing rho.
    ``v_zero_crossings`` lists sign changes of v located on the dense
    interpolant, in increasing rho order.
    """

    samples: list[tuple[float, State]]
    accepted_steps: int
    rejected_steps: int
    terminal_event: TerminalEvent
    segments: list[DenseSegment] = field(repr=False, default_factory=list)
    v_zero_crossings: list[tuple[float, State]] = field(default_factory=list)

    @property
    def rho_start(self) -> float:
        return self.samples[0][0]

    @property
    def rho_end(self) -> float:
        return self.samples[-1][0]

    def eval(self, rho: float) -> State:
        """Dense-output state at any rho covered by the trajectory."""
        lo, hi = self.rho_start, self.rho_end
        if rho < lo - 1e-9 or rho > hi + 1e-9:
            raise ValueError(f"rho={rho!r} outside the integrated span [{lo}, {hi}]")
        rho = min(max(rho, lo), hi)
        if not self.segments:
            return self.samples[0][1]
        starts = self._segment_starts
        i = bisect.bisect_right(starts, rho) - 1
        i = min(max(i, 0), len(self.segments) - 1)
        return self.segments[i].eval(rho)

    @property
    def _segment_starts(self) -> list[float]:
        starts = getattr(self, "_starts_cache", None)
        if starts is None:
            starts = [seg.rho0 for seg in self.segments]
            object.__setattr__(self, "_starts_cache", starts)
        return starts


def _power(u: float, p: float, integer_p: bool) -> float:
    if u >= 0.0 or integer_p:
        return math.pow(u, p)
    return -math.pow(-u, p)


def rhs(state: State, p: float) -> State:
    """Vector field (u', v') = (v, u - u**p).

    Raises for u < 0 with fractional p, where the power is undefined over
    the reals; callers are expected to stop at the u = 0 event first.
    """
    u = state.u
    if u < 0.0 and not float(p).is_integer():
        raise ValueError(f"u**p undefined for u={u!r} < 0 with fractional p={p!r}")
    return State(state.v, u - math.pow(u, p))


def hamiltonian(state: State, p: float) -> float:
    """Conserved energy v**2/2 - u**2/2 + u**(p+1)/(p+1); 0 on the spike."""
    u, v = state.u, state.v
    if u < 0.0 and not float(p).is_integer():
        raise ValueError(f"u**(p+1) undefined for u={u!r} < 0 with fractional p={p!r}")
    return 0.5 * v * v - 0.5 * u * u + math.pow(u, p + 1.0) / (p + 1.0)


def _bisect_theta(
    seg: DenseSegment,
    component: int,
    target: float,
    lo: float,
    hi: float,
    sign_lo: float,
) -> float:
    """Locate a crossing of one dense component through ``target``."""
    span = seg.h
    while (hi - lo) * span > EVENT_LOCATION_TOL:
        mid = 0.5 * (lo + hi)
        value = seg.eval_theta(mid)[component] - target
        if value == 0.0:
            return mid
        if (value > 0.0) == (sign_lo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def integrate(
    initial: State,
    rho_start: float,
    rho_end: float,
    p: float,
    config: IntegratorConfig | None = None,
) -> Trajectory:
    """Integrate the spike system from ``rho_start`` to ``rho_end``.

    Adaptive Dormand-Prince 5(4) with local error kept below
    rel_tol * |state| + abs_tol per step.  Returns early with the matching
    terminal event when u crosses 0, u exceeds the cap, or step-size
    control underflows h_min; otherwise runs to ``rho_end`` exactly.
    """
    if config is None:
        config = IntegratorConfig()
    if not (math.isfinite(rho_start) and math.isfinite(rho_end) and rho_start < rho_end):
        raise ValueError(f"need rho_start < rho_end, got [{rho_start!r}, {rho_end!r}]")
    u, v = initial.u, initial.v
    if not (math.isfinite(u) and math.isfinite(v)):
        raise ValueError(f"initial state must be finite, got {initial!r}")
    integer_p = float(p).is_integer()
    if u < 0.0 and not integer_p:
        raise ValueError("initial u must be nonnegative for fractional p")
    cap = config.u_cap
    if u > cap:
        raise ValueError(f"initial u={u!r} already exceeds u_cap={cap!r}")

    rel, ab = config.rel_tol, config.abs_tol
    h_min, h_max = config.h_min, config.h_max

    def f(uu: float, vv: float) -> tuple[float, float]:
        return vv, uu - _power(uu, p, integer_p)

    rho = rho_start
    k1u, k1v = f(u, v)
    h = min(max(config.h_init, h_min), h_max, rho_end - rho_start)
    samples: list[tuple[float, State]] = [(rho, State(u, v))]
    segments: list[DenseSegment] = []
    crossings: list[tuple[float, State]] = []
    accepted = 0
    rejected = 0
    event = TerminalEvent.REACHED_END

    while True:
        last = rho + h >= rho_end
        h_step = rho_end - rho if last else h

        yu = u + h_step * (_A21 * k1u)
        yv = v + h_step * (_A21 * k1v)
        k2u, k2v = f(yu, yv)
        yu = u + h_step * (_A31 * k1u + _A32 * k2u)
        yv = v + h_step * (_A31 * k1v + _A32 * k2v)
        k3u, k3v = f(yu, yv)
        yu = u + h_step * (_A41 * k1u + _A42 * k2u + _A43 * k3u)
        yv = v + h_step * (_A41 * k1v + _A42 * k2v + _A43 * k3v)
        k4u, k4v = f(yu, yv)
        yu = u + h_step * (_A51 * k1u + _A52 * k2u + _A53 * k3u + _A54 * k4u)
        yv = v + h_step * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v)
        k5u, k5v = f(yu, yv)
        yu = u + h_step * (_A61 * k1u + _A62 * k2u + _A63 * k3u + _A64 * k4u + _A65 * k5u)
        yv = v + h_step * (_A61 * k1v + _A62 * k2v + _A63 * k3v + _A64 * k4v + _A65 * k5v)
        k6u, k6v = f(yu, yv)
        u_new = u + h_step * (_B1 * k1u + _B3 * k3u + _B4 * k4u + _B5 * k5u + _B6 * k6u)
        v_new = v + h_step * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v + _B6 * k6v)
        k7u, k7v = f(u_new, v_new)

        err_u = h_step * (
            _E1 * k1u + _E3 * k3u + _E4 * k4u + _E5 * k5u + _E6 * k6u + _E7 * k7u
        )
        err_v = h_step * (
            _E1 * k1v + _E3 * k3v + _E4 * k4v + _E5 * k5v + _E6 * k6v + _E7 * k7v
        )
        scale_u = ab + rel * max(abs(u), abs(u_new))
        scale_v = ab + rel * max(abs(v), abs(v_new))
        ratio_u = err_u / scale_u
        ratio_v = err_v / scale_v
        err_norm = math.sqrt(0.5 * (ratio_u * ratio_u + ratio_v * ratio_v))

        if err_norm > 1.0:
            rejected += 1
            h = h_step * max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)
            if h < h_min:
                event = TerminalEvent.STEP_FAILURE
                break
            continue

        seg = DenseSegment(
            rho0=rho,
            h=h_step,
            u0=u,
            v0=v,
            cu=(
                _P1[0] * k1u,
                _P1[1] * k1u + _P3[1] * k3u + _P4[1] * k4u + _P5[1] * k5u + _P6[1] * k6u + _P7[1] * k7u,
                _P1[2] * k1u + _P3[2] * k3u + _P4[2] * k4u + _P5[2] * k5u + _P6[2] * k6u + _P7[2] * k7u,
                _P1[3] * k1u + _P3[3] * k3u + _P4[3] * k4u + _P5[3] * k5u + _P6[3] * k6u + _P7[3] * k7u,
            ),
            cv=(
                _P1[0] * k1v,
                _P1[1] * k1v + _P3[1] * k3v + _P4[1] * k4v + _P5[1] * k5v + _P6[1] * k6v + _P7[1] * k7v,
                _P1[2] * k1v + _P3[2] * k3v + _P4[2] * k4v + _P5[2] * k5v + _P6[2] * k6v + _P7[2] * k7v,
                _P1[3] * k1v + _P3[3] * k3v + _P4[3] * k4v + _P5[3] * k5v + _P6[3] * k6v + _P7[3] * k7v,
            ),
        )

        theta_end = 1.0
        terminal = None
        if u > 0.0 >= u_new:
            theta_end = _bisect_theta(seg, 0, 0.0, 0.0, 1.0, 1.0)
            terminal = TerminalEvent.U_CROSSED_ZERO
        elif u < cap < u_new:
            theta_end = _bisect_theta(seg, 0, cap, 0.0, 1.0, -1.0)
            terminal = TerminalEvent.U_EXCEEDED_CAP

        if (v < 0.0 < v_new) or (v_new < 0.0 < v) or (v_new == 0.0 and v != 0.0):
            if v_new == 0.0 and terminal is None:
                theta_v = 1.0
            else:
                theta_v = _bisect_theta(seg, 1, 0.0, 0.0, 1.0, v)
            if theta_v <= theta_end:
                uc, vc = seg.eval_theta(theta_v)
                crossings.append((rho + theta_v * h_step, State(uc, vc)))

        segments.append(seg)
        accepted += 1

        if terminal is not None:
            rho_e = rho + theta_end * h_step
            ue, ve = seg.eval_theta(theta_end)
            if terminal is TerminalEvent.U_CROSSED_ZERO and ue < 0.0:
                ue = 0.0
            samples.append((rho_e, State(ue, ve)))
            event = terminal
            break

        rho = rho_end if last else rho + h_step
        samples.append((rho, State(u_new, v_new)))
        u, v = u_new, v_new
        k1u, k1v = k7u, k7v

        if last:
            event = TerminalEvent.REACHED_END
            break

        if err_norm == 0.0:
            factor = _MAX_FACTOR
        else:
            factor = min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2))
        h = min(h_max, max(h_min, h_step * factor))

    return Trajectory(
        samples=samples,
        accepted_steps=accepted,
        rejected_steps=rejected,
        terminal_event=event,
        segments=segments,
        v_zero_crossings=crossings,
    )
