"""Integrator checks: local model, conservation, events, and dense output."""

import math

import numpy as np
import pytest

from gmspike import (
    EVENT_LOCATION_TOL,
    PROPAGATING_ORDER,
    IntegratorConfig,
    ProblemParams,
    State,
    TerminalEvent,
    default_integrator_config,
    eval_spike_derivative,
    eval_spike_rho,
    hamiltonian,
    integrate,
    rhs,
    spike_amplitude,
)

AMP2 = spike_amplitude(2.0)
PARAMS2 = ProblemParams.inner(2.0)

# Forces one oversized fixed step at a tolerance it cannot meet.
UNSATISFIABLE = IntegratorConfig(
    rel_tol=1e-14, abs_tol=1e-16, h_init=0.1, h_min=0.1, h_max=0.1
)


def fixed_step_config(h):
    return IntegratorConfig(rel_tol=1.0, abs_tol=1e6, h_init=h, h_min=h, h_max=h)


class TestRhs:
    def test_values(self):
        out = rhs(State(1.2, 0.3), 2.0)
        assert out.u == 0.3
        assert out.v == pytest.approx(1.2 - 1.44, rel=1e-15)

    def test_negative_u_allowed_for_integer_p(self):
        out = rhs(State(-1.0, 0.0), 3.0)
        assert out.v == pytest.approx(-1.0 - (-1.0) ** 3, abs=1e-15)

    def test_negative_u_rejected_for_fractional_p(self):
        with pytest.raises(ValueError):
            rhs(State(-0.1, 0.0), 2.5)


class TestHamiltonian:
    @pytest.mark.parametrize(
        "u, expected",
        [
            (1.0, -0.16666666666666669),
            (1.4, -0.06533333333333347),
            (1.5, 0.0),
            (1.6, 0.08533333333333348),
        ],
    )
    def test_frozen_values_p2(self, u, expected):
        assert hamiltonian(State(u, 0.0), 2.0) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("p", (2.0, 2.5, 3.0, 4.0, 10.0))
    def test_vanishes_on_spike_states(self, p):
        value = hamiltonian(State(spike_amplitude(p), 0.0), p)
        assert abs(value) < 1e-14

    def test_negative_u_rejected_for_fractional_p(self):
        with pytest.raises(ValueError):
            hamiltonian(State(-0.1, 0.0), 2.5)


class TestConfig:
    def test_default_cap_scales_with_amplitude(self):
        config = default_integrator_config(2.0)
        assert config.u_cap == pytest.approx(15.0, rel=1e-15)
        assert config.rel_tol == 1e-10

    def test_overrides_preserved(self):
        config = default_integrator_config(3.0, rel_tol=1e-8, u_cap=99.0)
        assert config.rel_tol == 1e-8
        assert config.u_cap == 99.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"rel_tol": 0.0},
            {"abs_tol": -1.0},
            {"h_min": 0.2, "h_init": 0.1},
            {"h_max": 1e-6},
            {"u_cap": 0.0},
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            IntegratorConfig(**kwargs)


class TestIntegrateBasics:
    def test_equilibrium_stays_put(self):
        # Every stage derivative vanishes at u=1, so the state is preserved
        # bit for bit and no step is ever rejected.
        trajectory = integrate(State(1.0, 0.0), 0.0, 5.0, 2.0)
        assert trajectory.terminal_event is TerminalEvent.REACHED_END
        assert all(s.u == 1.0 and s.v == 0.0 for _, s in trajectory.samples)
        assert trajectory.rejected_steps == 0

    def test_tracks_closed_form(self):
        trajectory = integrate(State(AMP2, 0.0), 0.0, 10.0, 2.0)
        assert trajectory.terminal_event is TerminalEvent.REACHED_END
        assert trajectory.samples[-1][0] == 10.0
        end = trajectory.samples[-1][1]
        assert end.u == pytest.approx(eval_spike_rho(PARAMS2, 10.0), abs=5e-7)
        assert end.v == pytest.approx(eval_spike_derivative(PARAMS2, 10.0), abs=5e-7)
        assert trajectory.rejected_steps <= 2

    def test_dense_output_matches_samples(self):
        trajectory = integrate(State(AMP2, 0.0), 0.0, 6.0, 2.0)
        for rho, state in trajectory.samples:
            interpolated = trajectory.eval(rho)
            assert interpolated.u == pytest.approx(state.u, rel=1e-12, abs=1e-14)
            assert interpolated.v == pytest.approx(state.v, rel=1e-12, abs=1e-14)

    def test_dense_output_matches_closed_form(self):
        trajectory = integrate(State(AMP2, 0.0), 0.0, 10.0, 2.0)
        for rho in np.linspace(0.0, 10.0, 1001):
            u = trajectory.eval(float(rho)).u
            assert u == pytest.approx(eval_spike_rho(PARAMS2, float(rho)), abs=1e-7)

    def test_eval_allows_round_off_slack(self):
        trajectory = integrate(State(AMP2, 0.0), 0.0, 5.0, 2.0)
        trajectory.eval(5.0 + 5e-10)
        trajectory.eval(-5e-10)
        with pytest.raises(ValueError):
            trajectory.eval(5.1)
        with pytest.raises(ValueError):
            trajectory.eval(-0.1)

    def test_reversible_through_mirrored_start(self):
        # u is even and v odd about the peak, so restarting from the mirrored
        # endpoint and integrating twice the span must reproduce it.
        forward = integrate(State(AMP2, 0.0), 0.0, 8.0, 2.0)
        end = forward.samples[-1][1]
        back = integrate(State(end.u, -end.v), 0.0, 16.0, 2.0)
        final = back.samples[-1][1]
        assert final.u == pytest.approx(end.u, abs=1e-8)
        assert final.v == pytest.approx(end.v, abs=1e-8)

    @pytest.mark.parametrize(
        "initial, span",
        [
            (State(1.0, 0.0), (0.0, 0.0)),
            (State(1.0, 0.0), (2.0, 1.0)),
            (State(math.nan, 0.0), (0.0, 1.0)),
            (State(20.0, 0.0), (0.0, 1.0)),
        ],
    )
    def test_rejects_invalid_setup(self, initial, span):
        with pytest.raises(ValueError):
            integrate(initial, span[0], span[1], 2.0)

    def test_rejects_negative_start_for_fractional_p(self):
        with pytest.raises(ValueError):
            integrate(State(-0.5, 0.0), 0.0, 1.0, 2.5)


class TestConservation:
    def test_first_integral_drift_small(self):
        trajectory = integrate(State(AMP2, 0.0), 0.0, 12.0, 2.0)
        h0 = hamiltonian(trajectory.samples[0][1], 2.0)
        drift = max(
            abs(hamiltonian(state, 2.0) - h0) for _, state in trajectory.samples
        )
        assert drift < 1e-8

    def test_drift_shrinks_with_tolerance(self):
        def drift_at(rel_tol, abs_tol):
            config = IntegratorConfig(rel_tol=rel_tol, abs_tol=abs_tol)
            trajectory = integrate(State(AMP2, 0.0), 0.0, 12.0, 2.0, config)
            h0 = hamiltonian(trajectory.samples[0][1], 2.0)
            return max(
                abs(hamiltonian(state, 2.0) - h0) for _, state in trajectory.samples
            )

        loose = drift_at(1e-10, 1e-12)
        tight = drift_at(5e-11, 5e-13)
        assert tight < loose


class TestEvents:
    def test_overshoot_stops_at_zero_crossing(self):
        trajectory = integrate(State(1.6, 0.0), 0.0, 12.0, 2.0)
        assert trajectory.terminal_event is TerminalEvent.U_CROSSED_ZERO
        rho_end, end = trajectory.samples[-1]
        assert rho_end == pytest.approx(3.0900841000136845, rel=1e-9)
        assert end.u == 0.0
        assert end.v == pytest.approx(-0.41311822354789757, rel=1e-9)
        # Crossing with v < 0 at u = 0 means positive first-integral level.
        assert hamiltonian(end, 2.0) == pytest.approx(
            hamiltonian(State(1.6, 0.0), 2.0), abs=1e-9
        )

    def test_undershoot_records_turning_points(self):
        trajectory = integrate(State(1.4, 0.0), 0.0, 30.0, 2.0)
        assert trajectory.terminal_event is TerminalEvent.REACHED_END
        crossings = trajectory.v_zero_crossings
        assert len(crossings) >= 7
        locations = [rho for rho, _ in crossings]
        assert locations == sorted(locations)
        assert all(0.0 < state.u < 1.4 for _, state in crossings)
        first_rho, first_state = crossings[0]
        assert first_rho == pytest.approx(3.5622832910823736, rel=1e-8)
        assert first_state.u == pytest.approx(0.42749172182100076, rel=1e-7)

    def test_cap_stops_runaway(self):
        trajectory = integrate(State(1.0, 2.0), 0.0, 5.0, 2.0, IntegratorConfig(u_cap=1.5))
        assert trajectory.terminal_event is TerminalEvent.U_EXCEEDED_CAP
        rho_end, end = trajectory.samples[-1]
        assert end.u == pytest.approx(1.5, abs=1e-8)
        assert rho_end < 0.5

    def test_step_failure_reported(self):
        trajectory = integrate(State(AMP2, 0.0), 0.0, 4.0, 2.0, UNSATISFIABLE)
        assert trajectory.terminal_event is TerminalEvent.STEP_FAILURE
        assert trajectory.rejected_steps >= 1

    def test_fractional_p_crosses_zero_cleanly(self):
        amp = spike_amplitude(2.5)
        trajectory = integrate(State(amp + 0.1, 0.0), 0.0, 12.0, 2.5)
        assert trajectory.terminal_event is TerminalEvent.U_CROSSED_ZERO
        end = trajectory.samples[-1][1]
        assert 0.0 <= end.u <= 1e-9
        assert all(math.isfinite(state.u) for _, state in trajectory.samples)


class TestOrder:
    def test_constants(self):
        assert PROPAGATING_ORDER == 5
        assert EVENT_LOCATION_TOL == 1e-10

    def test_fixed_step_convergence_rate(self):
        def endpoint_error(h):
            trajectory = integrate(State(AMP2, 0.0), 0.0, 4.0, 2.0, fixed_step_config(h))
            end = trajectory.samples[-1][1]
            return abs(end.u - eval_spike_rho(PARAMS2, 4.0)) + abs(
                end.v - eval_spike_derivative(PARAMS2, 4.0)
            )

        errors = [endpoint_error(h) for h in (0.4, 0.2, 0.1, 0.05)]
        slopes = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
        assert all(PROPAGATING_ORDER - 0.5 < s < PROPAGATING_ORDER + 0.5 for s in slopes)
        assert errors[-1] < 1e-8
