"""Acceptance suite: one test per criterion, one printed verdict line each.

Every criterion is asserted at its stated tolerance against the default
experiment protocol (canonical parameters, dt=0.01, fixed near-origin start
states, adaptation of the receiving current at t=100, windows [50,100] and
[150,200]). Criteria that the protocol cannot reach on this model are left
to fail as stated rather than being loosened; the measured values are
printed so the verdict lines double as a report.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from hrsync.analysis import sweep_K, sync_rms, trajectory_arrays, windowed_average
from hrsync.energy import energy, energy_gradient
from hrsync.model import NeuronParams, NeuronState, conservative_field
from hrsync.sim import AdaptationSpec, PairConfig, SimSpec, run_isolated, run_pair

from oracles import fd_gradient

CANON = NeuronParams.canonical(I=3.024)
QUIET = NeuronParams.canonical(I=0.85)
DEFAULT_SPEC = SimSpec(dt=0.01, t_end=200.0)
DEFAULT_CONFIG = PairConfig(
    pre=CANON, post=QUIET, K=5.0, adaptation=AdaptationSpec(start_time=100.0)
)


class Criterion:
    def __init__(self, number, title):
        self.label = f"ACCEPTANCE {number} ({title})"
        self.clauses = []

    def check(self, ok, detail):
        self.clauses.append((bool(ok), detail))

    def conclude(self):
        ok = all(flag for flag, _ in self.clauses)
        details = "; ".join(
            f"{'ok' if flag else 'VIOLATED'}: {detail}" for flag, detail in self.clauses
        )
        print(f"{self.label}: {'PASS' if ok else 'FAIL'} [{details}]")
        assert ok, f"{self.label}: {details}"


def random_states(n, seed):
    rng = np.random.default_rng(seed)
    return [NeuronState(*rng.uniform(-2, 2, 4)) for _ in range(n)]


@pytest.fixture(scope="module")
def default_pair_run():
    start = time.perf_counter()
    samples = run_pair(DEFAULT_SPEC, DEFAULT_CONFIG)
    return samples, time.perf_counter() - start


def windowed_mean(samples, value_key, window, t_lo, t_hi):
    arrays = trajectory_arrays(samples)
    series = windowed_average(arrays["t"], arrays[value_key], window)
    mask = (series.times >= t_lo) & (series.times <= t_hi)
    return float(series.values[mask].mean())


def test_criterion_1_gradient_correctness():
    crit = Criterion(1, "gradient vs finite differences")
    start = time.perf_counter()
    worst = 0.0
    for state in random_states(100, seed=101):
        grad = energy_gradient(state, CANON)
        fd = fd_gradient(lambda s: energy(s, CANON), state, step=1e-6)
        worst = max(worst, np.linalg.norm(fd - grad) / (1.0 + np.linalg.norm(grad)))
    elapsed = time.perf_counter() - start
    crit.check(worst <= 1e-6, f"max rel gradient error {worst:.3e} <= 1e-6")
    crit.check(elapsed < 1.0, f"runtime {elapsed:.3f}s < 1s")
    crit.conclude()


def test_criterion_2_conservative_orthogonality():
    crit = Criterion(2, "gradient orthogonal to conservative part")
    start = time.perf_counter()
    worst = 0.0
    for state in random_states(100, seed=101):
        grad = energy_gradient(state, CANON)
        cons = np.array(conservative_field(state, CANON).as_tuple())
        bound = 1e-10 * (1.0 + np.linalg.norm(grad) * np.linalg.norm(cons))
        worst = max(worst, abs(float(grad @ cons)) / bound)
    elapsed = time.perf_counter() - start
    crit.check(worst <= 1.0, f"max normalized |grad.f_c| {worst:.3e} of allowance")
    crit.check(elapsed < 1.0, f"runtime {elapsed:.3f}s < 1s")
    crit.conclude()


def test_criterion_3_integrator_order():
    crit = Criterion(3, "fourth-order self-convergence")
    start = time.perf_counter()
    finals = {}
    for dt in (0.02, 0.01, 0.005):
        spec = SimSpec(dt=dt, t_end=1.0, record_every=round(1.0 / dt))
        finals[dt] = np.array(run_isolated(spec, CANON)[-1].pre_state.as_tuple())
    factor = np.linalg.norm(finals[0.02] - finals[0.01]) / np.linalg.norm(
        finals[0.01] - finals[0.005]
    )
    elapsed = time.perf_counter() - start
    crit.check(12.0 <= factor <= 20.0, f"convergence factor {factor:.2f} in [12, 20]")
    crit.check(elapsed < 5.0, f"runtime {elapsed:.3f}s < 5s")
    crit.conclude()


def test_criterion_4_isolated_energy_balance():
    crit = Criterion(4, "free neuron exchanges zero net energy")
    start = time.perf_counter()
    spec = SimSpec(dt=0.01, t_end=2000.0, record_every=10, transient=500.0)
    samples = run_isolated(spec, CANON)
    mean_hdot = float(np.mean([s.Hdot_pre for s in samples]))
    elapsed = time.perf_counter() - start
    crit.check(abs(mean_hdot) < 0.5, f"|mean Hdot[500,2000]| = {abs(mean_hdot):.4f} < 0.5")
    crit.check(elapsed < 10.0, f"runtime {elapsed:.3f}s < 10s")
    crit.conclude()


def test_criterion_5_forced_regime_cost(default_pair_run):
    samples, elapsed = default_pair_run
    crit = Criterion(5, "forced-regime energy cost")
    h_avg = windowed_mean(samples, "H_post", 10.0, 50.0, 100.0)
    hdot_avg = abs(windowed_mean(samples, "Hdot_post", 5.0, 50.0, 100.0))
    crit.check(
        46.0 <= abs(h_avg) <= 86.0,
        f"|mean avgH2_w10[50,100]| = {abs(h_avg):.2f} in [46, 86] (signed {h_avg:.2f})",
    )
    crit.check(7.0 <= hdot_avg <= 21.0,
               f"|mean avgHdot2_w5[50,100]| = {hdot_avg:.2f} in [7, 21]")
    crit.check(elapsed < 5.0, f"runtime {elapsed:.3f}s < 5s")
    crit.conclude()


def test_criterion_6_adaptation_convergence(default_pair_run):
    samples, elapsed = default_pair_run
    crit = Criterion(6, "adaptation removes the synchronization cost")
    final_I = next(s.post_I for s in samples if abs(s.t - 200.0) < 1e-9)
    hdot_avg = abs(windowed_mean(samples, "Hdot_post", 5.0, 150.0, 200.0))
    rms = sync_rms(samples, 190.0, 200.0)
    crit.check(abs(final_I - 3.024) < 0.01,
               f"|I2(200) - 3.024| = {abs(final_I - 3.024):.4f} < 0.01")
    crit.check(hdot_avg < 0.5, f"|mean avgHdot2_w5[150,200]| = {hdot_avg:.4f} < 0.5")
    crit.check(rms < 1e-2, f"sync RMS[190,200] = {rms:.4f} < 0.01")
    crit.check(elapsed < 5.0, f"runtime {elapsed:.3f}s < 5s")
    crit.conclude()


def test_criterion_7_sweep_shape():
    crit = Criterion(7, "dissipation grows with coupling, adaptation removes it")
    start = time.perf_counter()
    summaries = sweep_K([0.0, 0.5, 1.0, 1.5, 2.0], DEFAULT_SPEC, DEFAULT_CONFIG)
    elapsed = time.perf_counter() - start
    by_k = {s.K: s for s in summaries}
    crit.check(all(s.error is None for s in summaries), "all runs completed")
    crit.check(
        abs(by_k[0.0].pre_adapt_avg_Hdot) < 0.5,
        f"|preHdot(K=0)| = {abs(by_k[0.0].pre_adapt_avg_Hdot):.4f} < 0.5",
    )
    crit.check(
        abs(by_k[2.0].pre_adapt_avg_Hdot) > abs(by_k[0.5].pre_adapt_avg_Hdot),
        f"|preHdot(K=2)| = {abs(by_k[2.0].pre_adapt_avg_Hdot):.4f} > "
        f"|preHdot(K=0.5)| = {abs(by_k[0.5].pre_adapt_avg_Hdot):.4f}",
    )
    post_mags = {s.K: abs(s.post_adapt_avg_Hdot) for s in summaries}
    crit.check(
        all(v < 0.5 for v in post_mags.values()),
        "all |postHdot| < 0.5: " + ", ".join(f"K={k:g}: {v:.3f}" for k, v in post_mags.items()),
    )
    crit.check(elapsed < 30.0, f"runtime {elapsed:.3f}s < 30s")
    crit.conclude()


def test_criterion_8_decoupled_identity():
    crit = Criterion(8, "decoupled identical neurons never separate")
    start = time.perf_counter()
    shared = NeuronState(0.1, 0.2, 0.3, 0.1)
    spec = replace(DEFAULT_SPEC, initial_pre=shared, initial_post=shared)
    config = PairConfig(pre=CANON, post=CANON, K=0.0,
                        adaptation=AdaptationSpec(start_time=100.0))
    samples = run_pair(spec, config)
    worst = max(max(abs(v) for v in s.e) for s in samples)
    elapsed = time.perf_counter() - start
    crit.check(worst == 0.0, f"max |e| over {len(samples)} samples = {worst:g} (exact zero)")
    crit.check(elapsed < 5.0, f"runtime {elapsed:.3f}s < 5s")
    crit.conclude()


def test_criterion_9_cli_determinism(tmp_path):
    from hrsync.cli import main

    crit = Criterion(9, "byte-identical CSV output")
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["pair", "--out", str(first)]) == 0
    assert main(["pair", "--out", str(second)]) == 0
    identical = first.read_bytes() == second.read_bytes()
    crit.check(identical, f"two default pair runs wrote identical bytes ({first.stat().st_size} each)")
    crit.conclude()
