"""Closed-form single-spike profiles of u'' - u + u**p = 0 on the line.

The spike boundary-value problem

    u'' - u + u**p = 0,    u'(rho_peak) = 0,    u -> 0 away from the peak,
    u > 0,

has, for every admissible exponent p > 1, the exact solution

    u(rho) = ((1 + cosh((p - 1) * (rho - rho_peak))) / (1 + p)) ** (1 / (1 - p)),

a single spike of height ((p + 1) / 2) ** (1 / (p - 1)) centred at
``rho_peak``.  For p = 2 it reduces to the classical profile
(3/2) * sech(rho / 2)**2.

The same profile also comes out of a generalized hyperbolic trial function

    u(rho) = amp / cosh_b(rho) ** power,
    cosh_b(rho) = (m * b**(k * rho) + q * b**(-k * rho)) / 2,

whose constants are pinned down by balancing the nonlinear and linear terms;
one scale q stays free and cancels from the assembled profile (see
:func:`derive_ansatz_constants`).

All evaluators work in log space with the dominant exponential factored out:
a naive cosh overflows once (p - 1) * |rho - rho_peak| grows past ~710 even
though the profile value itself is still representable.  Results that
underflow below the smallest positive normal double saturate to exactly 0.0,
never NaN, which is the correct far-field limit.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "P_MIN",
    "P_MAX",
    "SpikeKind",
    "ProblemParams",
    "AnsatzConstants",
    "spike_amplitude",
    "eval_spike_rho",
    "eval_spike_x",
    "eval_spike_derivative",
    "eval_spike_second_derivative",
    "derive_ansatz_constants",
    "eval_ansatz",
]

# Exponent range with well-conditioned arithmetic: the 1/(p - 1) powers blow
# up as p -> 1 and the profile flattens to the constant 1 as p -> infinity.
P_MIN = 1.01
P_MAX = 100.0

_LOG_TINY = math.log(sys.float_info.min)
_LN2 = math.log(2.0)


class SpikeKind(Enum):
    """Where the spike sits: interior of the domain or glued to an endpoint."""

    INNER = "inner"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class ProblemParams:
    """Problem data for a single spike on the rescaled interval.

    The original problem lives on x in [-half_length, half_length] with the
    singular perturbation scale ``epsilon``; the rescaled coordinate is
    rho = x / epsilon.  An inner spike peaks at rho = 0, a boundary spike at
    rho = half_length / epsilon (the right endpoint).
    """

    p: float
    epsilon: float = 0.1
    half_length: float = 1.0
    peak_rho: float = 0.0
    kind: SpikeKind = SpikeKind.INNER

    def __post_init__(self) -> None:
        _check_p(self.p)
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if not (self.half_length > 0.0 and math.isfinite(self.half_length)):
            raise ValueError(f"half_length must be positive, got {self.half_length!r}")
        if self.kind is SpikeKind.INNER:
            if self.peak_rho != 0.0:
                raise ValueError("inner spikes peak at rho = 0")
        else:
            edge = self.half_length / self.epsilon
            if abs(self.peak_rho - edge) > 1e-9 * max(1.0, edge):
                raise ValueError(
                    f"boundary spikes peak at rho = half_length/epsilon = {edge!r}, "
                    f"got {self.peak_rho!r}"
                )

    @classmethod
    def inner(cls, p: float, epsilon: float = 0.1, half_length: float = 1.0) -> "ProblemParams":
        return cls(p=p, epsilon=epsilon, half_length=half_length)

    @classmethod
    def boundary(cls, p: float, epsilon: float = 0.1, half_length: float = 1.0) -> "ProblemParams":
        return cls(
            p=p,
            epsilon=epsilon,
            half_length=half_length,
            peak_rho=half_length / epsilon,
            kind=SpikeKind.BOUNDARY,
        )

    @property
    def peak_x(self) -> float:
        return self.peak_rho * self.epsilon


def _check_p(p: float) -> None:
    if not (math.isfinite(p) and P_MIN <= p <= P_MAX):
        raise ValueError(f"exponent p must lie in [{P_MIN}, {P_MAX}], got {p!r}")


def spike_amplitude(p: float) -> float:
    """Peak height ((p + 1) / 2) ** (1 / (p - 1)) of the spike.

    1.5 for p = 2, sqrt(2) for p = 3, (5/2)**(1/3) for p = 4.
    """
    _check_p(p)
    return ((p + 1.0) / 2.0) ** (1.0 / (p - 1.0))


def _log_profile(p: float, dist: float) -> float:
    """log u at distance ``dist`` >= 0 from the peak.

    Uses 1 + cosh(t) = e**t * (1 + e**-t)**2 / 2 so only decaying
    exponentials are ever formed.
    """
    t = (p - 1.0) * dist
    return (math.log(2.0 * (p + 1.0)) - 2.0 * math.log1p(math.exp(-t))) / (p - 1.0) - dist


def _exp_or_zero(log_value: float) -> float:
    # Saturate below the smallest positive normal double instead of
    # producing subnormals (or, via naive cosh, NaN).
    if log_value < _LOG_TINY:
        return 0.0
    return math.exp(log_value)


def eval_spike_rho(params: ProblemParams, rho: float) -> float:
    """Exact spike profile at rescaled coordinate ``rho``.

    Even around the peak, strictly decreasing away from it, and decaying
    like exp(-|rho - peak_rho|) in the far field.
    """
    return _exp_or_zero(_log_profile(params.p, abs(rho - params.peak_rho)))


def eval_spike_x(params: ProblemParams, x: float) -> float:
    """Spike profile in the original coordinate, u(x) on [-L, L]."""
    if abs(x) > params.half_length + 1e-12:
        raise ValueError(
            f"x={x!r} outside the domain [-{params.half_length}, {params.half_length}]"
        )
    dist = abs(x - params.peak_x) / params.epsilon
    return _exp_or_zero(_log_profile(params.p, dist))


def eval_spike_derivative(params: ProblemParams, rho: float) -> float:
    """du/drho of the exact profile.

    Closed form u' = -sinh((p - 1)(rho - peak)) * u**p / (p + 1), evaluated
    in log space.  Zero at the peak, sign -sign(rho - peak_rho) elsewhere,
    same underflow saturation as :func:`eval_spike_rho`.
    """
    p = params.p
    delta = rho - params.peak_rho
    dist = abs(delta)
    if dist == 0.0:
        return 0.0
    t = (p - 1.0) * dist
    log_sinh = t + math.log1p(-math.exp(-2.0 * t)) - _LN2
    log_du = log_sinh + p * _log_profile(p, dist) - math.log(p + 1.0)
    if log_du < _LOG_TINY:
        return 0.0
    return -math.copysign(math.exp(log_du), delta)


def eval_spike_second_derivative(params: ProblemParams, rho: float) -> float:
    """d2u/drho2 of the exact profile, derived independently of the ODE.

    Differentiating the closed-form u' once more gives

        u'' = p * sinh(t)**2 * u**(2p - 1) / (p + 1)**2
              - (p - 1) * cosh(t) * u**p / (p + 1),

    with t = (p - 1) * (rho - peak).  Algebraically this equals u - u**p,
    so it feeds a meaningful residual check of all three closed forms.
    """
    p = params.p
    dist = abs(rho - params.peak_rho)
    t = (p - 1.0) * dist
    log_u = _log_profile(p, dist)
    log_cosh = t + math.log1p(math.exp(-2.0 * t)) - _LN2
    term_cosh = _exp_or_zero(
        math.log(p - 1.0) + log_cosh + p * log_u - math.log(p + 1.0)
    )
    if t > 0.0:
        log_sinh = t + math.log1p(-math.exp(-2.0 * t)) - _LN2
        term_sinh = _exp_or_zero(
            math.log(p) + 2.0 * log_sinh + (2.0 * p - 1.0) * log_u - 2.0 * math.log(p + 1.0)
        )
    else:
        term_sinh = 0.0
    return term_sinh - term_cosh


@dataclass(frozen=True)
class AnsatzConstants:
    """Constants of the trial profile amp / cosh_b(rho)**power.

    Here cosh_b(rho) = (m * base**(k * rho) + q * base**(-k * rho)) / 2 is a
    two-sided exponential with independent weights.  Consistency of the
    balance requires power * k = 1 and m * q * (p + 1) / 2 = amp**(p - 1)
    with p = 2 * k + 1; both are enforced on construction.
    """

    power: float
    base: float
    k: float
    m: float
    q: float
    amp: float

    def __post_init__(self) -> None:
        for name in ("power", "k", "m", "q", "amp"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not (self.base > 1.0 and math.isfinite(self.base)):
            raise ValueError("base must exceed 1 for a decaying profile")
        if abs(self.power * self.k - 1.0) > 1e-12:
            raise ValueError("inconsistent constants: power * k must equal 1")
        p = 2.0 * self.k + 1.0
        lhs = self.m * self.q * (p + 1.0) / 2.0
        rhs = self.amp ** (p - 1.0)
        if abs(lhs - rhs) > 1e-9 * max(abs(lhs), abs(rhs)):
            raise ValueError(
                "inconsistent constants: m * q * (p + 1) / 2 must equal amp**(p - 1)"
            )


def derive_ansatz_constants(p: float, q: float, peak_rho: float = 0.0) -> AnsatzConstants:
    """Fix the trial-profile constants by balancing the equation.

    Substituting the trial profile into u'' - u + u**p = 0 forces

        power = 2 / (p - 1),     k = (p - 1) / 2,      base = e,
        amp = exp(-peak_rho) * (2 / (q**2 * (p + 1))) ** (1 / (1 - p)),
        m = exp(peak_rho * (1 - p)) * q.

    The weight q > 0 is free: it rescales m and amp in compensating ways and
    drops out of the evaluated profile.
    """
    _check_p(p)
    if not (math.isfinite(q) and q > 0.0):
        raise ValueError(f"q must be positive and finite, got {q!r}")
    if not math.isfinite(peak_rho):
        raise ValueError(f"peak_rho must be finite, got {peak_rho!r}")
    amp = math.exp(-peak_rho) * (2.0 / (q * q * (p + 1.0))) ** (1.0 / (1.0 - p))
    m = math.exp(peak_rho * (1.0 - p)) * q
    return AnsatzConstants(
        power=2.0 / (p - 1.0),
        base=math.e,
        k=(p - 1.0) / 2.0,
        m=m,
        q=q,
        amp=amp,
    )


def _logaddexp(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def eval_ansatz(constants: AnsatzConstants, rho: float) -> float:
    """Evaluate the trial profile amp / cosh_b(rho)**power in log space."""
    kr = constants.k * math.log(constants.base) * rho
    log_cosh = _logaddexp(math.log(constants.m) + kr, math.log(constants.q) - kr) - _LN2
    return _exp_or_zero(math.log(constants.amp) - constants.power * log_cosh)
