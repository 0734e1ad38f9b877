import math

import numpy as np
import pytest

from hrsync.model import NeuronParams, NeuronState, vector_field
from hrsync.sim import (
    AdaptationSpec,
    DivergenceError,
    PairConfig,
    SimSpec,
    coupled_derivative,
    rk4_step,
    run_isolated,
    run_pair,
)

CANON = NeuronParams.canonical(I=3.024)
QUIET = NeuronParams.canonical(I=0.85)

REFERENCE_SPEC = SimSpec(dt=0.01, t_end=200.0)
REFERENCE_CONFIG = PairConfig(
    pre=CANON, post=QUIET, K=5.0, adaptation=AdaptationSpec(start_time=100.0)
)

# frozen outputs of the reference run (dt=0.01, fixed initial conditions);
# these pin regressions, they are not externally derived truths
REFERENCE_E1_RMS_50_100 = 0.3139114042098491
REFERENCE_I2_AT_200 = 2.668662238531051


def sample_at(samples, t):
    return next(s for s in samples if abs(s.t - t) < 1e-9)


class TestSpecs:
    def test_simspec_validation(self):
        with pytest.raises(ValueError):
            SimSpec(dt=0.0)
        with pytest.raises(ValueError):
            SimSpec(dt=0.01, t_end=100.0, transient=150.0)
        with pytest.raises(ValueError):
            SimSpec(dt=0.01, record_every=0)
        with pytest.raises(ValueError):
            SimSpec(dt=0.3, t_end=1.0)  # not an integer number of steps

    def test_pairconfig_validation(self):
        with pytest.raises(ValueError):
            PairConfig(pre=CANON, post=QUIET, K=-1.0)

    def test_adaptation_validation(self):
        with pytest.raises(ValueError):
            AdaptationSpec(target="p")
        with pytest.raises(ValueError):
            AdaptationSpec(gain=0.0)
        with pytest.raises(ValueError):
            AdaptationSpec(start_time=-1.0)


class TestRk4Step:
    def test_exponential_decay(self):
        # one step of dx/dt = -x from 1 with dt=0.1
        out = rk4_step(lambda x, t: -x, 1.0, 0.0, 0.1)
        assert out == pytest.approx(0.9048375, abs=1e-12)
        assert abs(out - math.exp(-0.1)) < 1e-7

    def test_null_field(self):
        state = np.array([1.0, -2.0, 3.0, 4.0])
        out = rk4_step(lambda x, t: 0.0 * x, state, 0.0, 0.5)
        np.testing.assert_array_equal(out, state)

    def test_nonfinite_raises_with_time(self):
        with np.errstate(over="ignore"):
            with pytest.raises(DivergenceError) as err:
                rk4_step(lambda x, t: x * 1e200, np.array([1.0]), 3.0, 1.0)
        assert err.value.t == 3.0

    def test_time_dependent_rhs(self):
        # dx/dt = t integrates exactly under RK4 (polynomial of low order)
        out = rk4_step(lambda x, t: t, 0.0, 0.0, 1.0)
        assert out == pytest.approx(0.5, rel=1e-15)

    def test_fourth_order_self_convergence(self):
        # halving dt must shrink the final-state difference about 16x
        finals = {}
        for dt in (0.02, 0.01, 0.005):
            spec = SimSpec(dt=dt, t_end=1.0, record_every=round(1.0 / dt),
                           initial_pre=NeuronState(0.1, 0.2, 0.3, 0.1))
            finals[dt] = np.array(run_isolated(spec, CANON)[-1].pre_state.as_tuple())
        factor = np.linalg.norm(finals[0.02] - finals[0.01]) / np.linalg.norm(
            finals[0.01] - finals[0.005]
        )
        assert 12.0 < factor < 20.0

    def test_error_vs_fine_reference_shrinks_16x(self):
        finals = {}
        for dt in (0.02, 0.01, 1e-4):
            spec = SimSpec(dt=dt, t_end=1.0, record_every=round(1.0 / dt),
                           initial_pre=NeuronState(0.1, 0.2, 0.3, 0.1))
            finals[dt] = np.array(run_isolated(spec, CANON)[-1].pre_state.as_tuple())
        ratio = np.linalg.norm(finals[0.02] - finals[1e-4]) / np.linalg.norm(
            finals[0.01] - finals[1e-4]
        )
        assert 12.0 < ratio < 20.0


class TestCoupledDerivative:
    def joint(self, pre, post, q):
        return np.array([*pre, *post, q])

    def test_decoupled_limit_is_two_free_copies(self):
        config = PairConfig(pre=CANON, post=QUIET, K=0.0)
        pre = (0.3, -1.0, 2.0, 0.5)
        post = (-0.2, 0.8, 1.0, -0.3)
        got = coupled_derivative(self.joint(pre, post, QUIET.I), config, 0.0)
        want_pre = vector_field(NeuronState(*pre), CANON).as_tuple()
        want_post = vector_field(NeuronState(*post), QUIET).as_tuple()
        np.testing.assert_array_equal(got[:4], want_pre)
        np.testing.assert_array_equal(got[4:8], want_post)
        assert got[8] == 0.0

    def test_identical_states_kill_the_coupling_term(self):
        config = PairConfig(pre=CANON, post=CANON, K=7.5)
        state = (0.4, -0.6, 1.2, 0.1)
        got = coupled_derivative(self.joint(state, state, CANON.I), config, 0.0)
        want = vector_field(NeuronState(*state), CANON).as_tuple()
        np.testing.assert_allclose(got[4:8], want, rtol=0, atol=0)

    def test_current_adaptation_specialization(self):
        # e1 = 0.5 with unit gain and xi gives dI2/dt = -0.5 once active
        config = PairConfig(
            pre=CANON, post=QUIET, K=5.0,
            adaptation=AdaptationSpec(gain=1.0, start_time=10.0),
        )
        pre = (0.0, 0.0, 0.0, 0.0)
        post = (0.5, 0.0, 0.0, 0.0)
        before = coupled_derivative(self.joint(pre, post, QUIET.I), config, 9.99)
        after = coupled_derivative(self.joint(pre, post, QUIET.I), config, 10.0)
        assert before[8] == 0.0
        assert after[8] == -0.5

    def test_coupling_touches_only_first_post_component(self):
        base = PairConfig(pre=CANON, post=QUIET, K=0.0)
        coupled = PairConfig(pre=CANON, post=QUIET, K=3.0)
        joint = self.joint((0.3, -1.0, 2.0, 0.5), (-0.2, 0.8, 1.0, -0.3), QUIET.I)
        d0 = coupled_derivative(joint, base, 0.0)
        d3 = coupled_derivative(joint, coupled, 0.0)
        assert d3[4] - d0[4] == pytest.approx(3.0 * (0.3 - (-0.2)), rel=1e-15)
        np.testing.assert_array_equal(d3[:4], d0[:4])
        np.testing.assert_array_equal(d3[5:], d0[5:])

    def test_general_target_matches_sensitivity_rule(self):
        from hrsync.model import param_sensitivity

        config = PairConfig(
            pre=CANON, post=QUIET, K=2.0,
            adaptation=AdaptationSpec(target="b", gain=2.0, start_time=0.0),
        )
        pre = (0.4, -0.3, 1.0, 0.2)
        post = (0.1, 0.5, 0.8, -0.1)
        got = coupled_derivative(self.joint(pre, post, QUIET.b), config, 1.0)
        sens = param_sensitivity(NeuronState(*pre), CANON, "b").as_tuple()
        err = tuple(b - a for a, b in zip(pre, post))
        want = -2.0 * math.fsum(s * e for s, e in zip(sens, err))
        assert got[8] == pytest.approx(want, rel=1e-12)

    def test_rejects_bad_joint(self):
        config = PairConfig(pre=CANON, post=QUIET, K=1.0)
        with pytest.raises(ValueError):
            coupled_derivative(np.zeros(8), config, 0.0)
        bad = np.zeros(9)
        bad[3] = float("nan")
        with pytest.raises(ValueError):
            coupled_derivative(bad, config, 0.0)


class TestRunPair:
    def test_identical_neurons_stay_identical(self):
        # K=0, same parameters, same start: the error is exactly zero forever
        state = NeuronState(0.1, 0.2, 0.3, 0.1)
        spec = SimSpec(dt=0.01, t_end=50.0, initial_pre=state, initial_post=state)
        config = PairConfig(pre=CANON, post=CANON, K=0.0,
                            adaptation=AdaptationSpec(start_time=10.0))
        samples = run_pair(spec, config)
        assert all(s.e == (0.0, 0.0, 0.0, 0.0) for s in samples)
        assert all(s.post_I == CANON.I for s in samples)

    def test_recording_policy(self):
        spec = SimSpec(dt=0.01, t_end=2.0, record_every=10, transient=1.0)
        samples = run_pair(spec, REFERENCE_CONFIG)
        times = [s.t for s in samples]
        assert times[0] == pytest.approx(1.0)
        assert times[-1] == pytest.approx(2.0)
        assert len(times) == 11
        steps = np.diff(times)
        np.testing.assert_allclose(steps, 0.1, rtol=1e-9)

    def test_sample_error_field_is_post_minus_pre(self):
        samples = run_pair(SimSpec(dt=0.01, t_end=1.0), REFERENCE_CONFIG)
        for s in samples[::10]:
            want = tuple(
                b - a for a, b in zip(s.pre_state.as_tuple(), s.post_state.as_tuple())
            )
            assert s.e == want

    def test_determinism(self):
        a = run_pair(SimSpec(dt=0.01, t_end=5.0), REFERENCE_CONFIG)
        b = run_pair(SimSpec(dt=0.01, t_end=5.0), REFERENCE_CONFIG)
        assert a == b

    def test_adaptation_recovers_most_of_the_current_gap(self):
        samples = run_pair(REFERENCE_SPEC, REFERENCE_CONFIG)
        assert sample_at(samples, 100.0).post_I == QUIET.I
        final = sample_at(samples, 200.0).post_I
        assert final == pytest.approx(REFERENCE_I2_AT_200, rel=1e-9)
        # most of the 0.85 -> 3.024 gap is gone; the slow-current mismatch
        # makes the remainder decay only on the z/w time scales
        assert abs(final - CANON.I) < 0.2 * abs(QUIET.I - CANON.I)

    def test_parameter_gap_decays_monotonically_after_adaptation(self):
        samples = run_pair(REFERENCE_SPEC, REFERENCE_CONFIG)
        gaps = [abs(sample_at(samples, float(t)).post_I - CANON.I)
                for t in range(110, 201, 10)]
        initial_gap = abs(QUIET.I - CANON.I)
        assert all(b <= a + 0.05 * initial_gap for a, b in zip(gaps, gaps[1:]))

    def test_forced_sync_residual_error_regression(self):
        samples = run_pair(REFERENCE_SPEC,
                           PairConfig(pre=CANON, post=QUIET, K=5.0))
        e1_sq = [s.e[0] ** 2 for s in samples if 50.0 <= s.t <= 100.0]
        rms = math.sqrt(sum(e1_sq) / len(e1_sq))
        assert rms == pytest.approx(REFERENCE_E1_RMS_50_100, rel=1e-9)
        assert rms > 0.0

    def test_divergence_guard_carries_time(self):
        # strong coupling against a huge step makes the scheme blow up fast
        config = PairConfig(pre=CANON, post=QUIET, K=1e6)
        with pytest.raises(DivergenceError) as err:
            run_pair(SimSpec(dt=0.01, t_end=10.0), config)
        assert 0.0 < err.value.t <= 10.0

    def test_energy_uses_live_adapted_current(self):
        from hrsync.energy import energy_derivative, energy_report

        samples = run_pair(REFERENCE_SPEC, REFERENCE_CONFIG)
        s = sample_at(samples, 150.0)
        live = QUIET.with_current(s.post_I)
        assert s.Hdot_post == pytest.approx(
            energy_derivative(s.post_state, live), rel=1e-12
        )
        stale = energy_report(s.post_state, QUIET).Hdot
        assert s.Hdot_post != pytest.approx(stale, rel=1e-6)


class TestRunIsolated:
    def test_zero_field_params_give_constant_state(self):
        null = NeuronParams(a=1, b=0, c=0, d=0, xi=0, I=0, e=0, f=0, g=0,
                            m=1, s=1, h=0, n=0, k=0, r=0, l=0, p=-1)
        start = NeuronState(0.0, 0.0, 0.0, 0.0)
        spec = SimSpec(dt=0.1, t_end=5.0, initial_pre=start)
        samples = run_isolated(spec, null)
        assert all(s.pre_state == start for s in samples)

    def test_samples_mirror_single_neuron(self):
        samples = run_isolated(SimSpec(dt=0.01, t_end=1.0), CANON)
        for s in samples[::20]:
            assert s.pre_state == s.post_state
            assert s.e == (0.0, 0.0, 0.0, 0.0)
            assert s.H_pre == s.H_post and s.Hdot_pre == s.Hdot_post
            assert s.post_I == CANON.I

    def test_long_run_energy_balance(self):
        spec = SimSpec(dt=0.01, t_end=2000.0, record_every=10, transient=500.0)
        samples = run_isolated(spec, CANON)
        mean_hdot = np.mean([s.Hdot_pre for s in samples])
        assert abs(mean_hdot) < 0.5

    def test_low_current_goes_quiescent(self):
        spec = SimSpec(dt=0.01, t_end=1000.0, record_every=5)
        samples = run_isolated(spec, QUIET)
        x = np.array([s.pre_state.x for s in samples])
        t = np.array([s.t for s in samples])
        first = np.ptp(x[t <= 100.0])
        last = np.ptp(x[t >= 900.0])
        assert last < first
        assert last < 0.1

    def test_divergence_guard(self):
        # dx/dt = x^2 from 1 blows up at t=1; the guard fires near it
        runaway = NeuronParams(a=1, b=1, c=0, d=0, xi=0, I=0, e=0, f=0, g=0,
                               m=1, s=1, h=0, n=0, k=0, r=0, l=0, p=-1)
        spec = SimSpec(dt=0.001, t_end=2.0, initial_pre=NeuronState(1, 0, 0, 0))
        with pytest.raises(DivergenceError) as err:
            run_isolated(spec, runaway)
        assert 0.9 < err.value.t < 1.05
