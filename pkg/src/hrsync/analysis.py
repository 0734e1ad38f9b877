"""Windowed averages, synchronization error metrics, and coupling sweeps.

These are the reductions that turn raw trajectories into the quantities of
interest: trailing moving averages of the energy and its derivative (5 and
10 time-unit windows in the reference experiments), RMS state error, and
per-coupling-strength summaries comparing the regimes before and after the
structural adaptation kicks in.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import Sequence

import numpy as np

from .sim import DivergenceError, PairConfig, SimSpec, TrajectorySample, run_pair

__all__ = [
    "SweepSummary",
    "WindowedSeries",
    "sweep_K",
    "sync_rms",
    "trajectory_arrays",
    "windowed_average",
]


@dataclass(frozen=True)
class WindowedSeries:
    """Moving average of a uniformly sampled series.

    ``times[i]`` is the emission time of ``values[i]``: the average of the
    source over the trailing window ``(times[i] - window, times[i]]``. The
    first value appears once a full window of samples is available, so the
    output is ``window_samples - 1`` entries shorter than the input.
    """

    times: np.ndarray
    values: np.ndarray
    window: float

    def __len__(self) -> int:
        return len(self.values)


def _window_samples(window: float, spacing: float) -> int:
    # number of grid points in (t - window, t]; tolerant of float ratio noise
    return math.ceil(window / spacing - 1e-9)


def windowed_average(
    times, values, window: float, *, mode: str = "sliding"
) -> WindowedSeries:
    """Trailing moving average over a fixed duration.

    ``mode="sliding"`` (default) emits one value per sample once the window
    is full; ``mode="block"`` averages disjoint consecutive windows instead,
    emitting one value at the end of each block (for sensitivity checks).
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape != values.shape:
        raise ValueError("times and values must be 1-d arrays of equal length")
    if len(times) < 2:
        raise ValueError("need at least two samples")
    spacing = (times[-1] - times[0]) / (len(times) - 1)
    if spacing <= 0:
        raise ValueError("times must be increasing")
    steps = np.diff(times)
    if np.any(np.abs(steps - spacing) > 1e-6 * max(spacing, 1.0)):
        raise ValueError("series must be uniformly sampled")
    if window < spacing:
        raise ValueError("window must be at least the sample spacing")
    k = _window_samples(window, spacing)
    if k > len(values):
        raise ValueError("window longer than the series")

    if mode == "sliding":
        csum = np.concatenate(([0.0], np.cumsum(values)))
        avg = (csum[k:] - csum[:-k]) / k
        return WindowedSeries(times=times[k - 1 :].copy(), values=avg, window=window)
    if mode == "block":
        n_blocks = len(values) // k
        trimmed = values[: n_blocks * k].reshape(n_blocks, k)
        return WindowedSeries(
            times=times[k - 1 :: k][:n_blocks].copy(),
            values=trimmed.mean(axis=1),
            window=window,
        )
    raise ValueError(f"unknown averaging mode {mode!r}")


def trajectory_arrays(samples: Sequence[TrajectorySample]) -> dict[str, np.ndarray]:
    """Column-wise view of a sample sequence, keyed by quantity."""
    return {
        "t": np.array([s.t for s in samples]),
        "pre": np.array([s.pre_state.as_tuple() for s in samples]),
        "post": np.array([s.post_state.as_tuple() for s in samples]),
        "post_I": np.array([s.post_I for s in samples]),
        "e": np.array([s.e for s in samples]),
        "H_pre": np.array([s.H_pre for s in samples]),
        "Hdot_pre": np.array([s.Hdot_pre for s in samples]),
        "H_post": np.array([s.H_post for s in samples]),
        "Hdot_post": np.array([s.Hdot_post for s in samples]),
    }


def sync_rms(samples: Sequence[TrajectorySample], t0: float, t1: float) -> float:
    """Root-mean-square of the full-state error norm over ``t in [t0, t1]``.

    The error norm is Euclidean over all four components, so this measures
    identical (full-state) synchrony, not just membrane-potential agreement.
    """
    if not t0 < t1:
        raise ValueError("need t0 < t1")
    sq = [
        s.e[0] ** 2 + s.e[1] ** 2 + s.e[2] ** 2 + s.e[3] ** 2
        for s in samples
        if t0 <= s.t <= t1
    ]
    if not sq:
        raise ValueError(f"no samples in window [{t0:g}, {t1:g}]")
    return math.sqrt(sum(sq) / len(sq))


@dataclass(frozen=True)
class SweepSummary:
    """Receiving-neuron statistics of one coupled run at coupling ``K``.

    Window means of the energy and energy derivative, and the RMS state
    error, over a window before and one after the adaptation start. A run
    that diverged carries the reason in ``error`` and NaN statistics.
    """

    K: float
    pre_adapt_avg_H: float
    pre_adapt_avg_Hdot: float
    post_adapt_avg_H: float
    post_adapt_avg_Hdot: float
    pre_adapt_sync_rms: float
    post_adapt_sync_rms: float
    error: str | None = None


def _window_mean(t: np.ndarray, v: np.ndarray, window: tuple[float, float]) -> float:
    mask = (t >= window[0]) & (t <= window[1])
    if not mask.any():
        raise ValueError(f"no samples in window [{window[0]:g}, {window[1]:g}]")
    return float(v[mask].mean())


def _sweep_one(
    K: float,
    spec: SimSpec,
    config: PairConfig,
    pre_window: tuple[float, float],
    post_window: tuple[float, float],
) -> SweepSummary:
    try:
        samples = run_pair(spec, replace(config, K=K))
        arrays = trajectory_arrays(samples)
        t = arrays["t"]
        return SweepSummary(
            K=K,
            pre_adapt_avg_H=_window_mean(t, arrays["H_post"], pre_window),
            pre_adapt_avg_Hdot=_window_mean(t, arrays["Hdot_post"], pre_window),
            post_adapt_avg_H=_window_mean(t, arrays["H_post"], post_window),
            post_adapt_avg_Hdot=_window_mean(t, arrays["Hdot_post"], post_window),
            pre_adapt_sync_rms=sync_rms(samples, *pre_window),
            post_adapt_sync_rms=sync_rms(samples, *post_window),
        )
    except DivergenceError as exc:
        nan = float("nan")
        return SweepSummary(K, nan, nan, nan, nan, nan, nan, error=f"divergence at t={exc.t:g}")


def sweep_K(
    k_values: Sequence[float],
    spec: SimSpec,
    config: PairConfig,
    *,
    pre_window: tuple[float, float] = (50.0, 100.0),
    post_window: tuple[float, float] = (150.0, 200.0),
    max_workers: int | None = None,
) -> list[SweepSummary]:
    """One coupled run per coupling strength, summarized per window.

    Runs are independent and execute on a process pool when ``max_workers``
    allows (``None`` uses all cores; ``0``/``1`` force serial execution).
    Output order matches the input order. A diverging run yields a summary
    with its ``error`` field set; the other runs are unaffected.
    """
    k_values = [float(K) for K in k_values]
    if any(K < 0 for K in k_values):
        raise ValueError("all coupling strengths must be >= 0")
    if not pre_window[0] < pre_window[1] or not post_window[0] < post_window[1]:
        raise ValueError("windows must be nonempty intervals")
    if pre_window[1] > post_window[0]:
        raise ValueError("pre and post windows must be disjoint, pre first")
    if config.adaptation is not None:
        start = config.adaptation.start_time
        if not (pre_window[1] <= start <= post_window[0]):
            raise ValueError(
                "adaptation start must separate the pre and post windows"
            )

    work = partial(
        _sweep_one,
        spec=spec,
        config=config,
        pre_window=pre_window,
        post_window=post_window,
    )
    if max_workers is not None and max_workers <= 1:
        return [work(K) for K in k_values]
    try:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(work, k_values))
    except OSError:
        # process pools can be unavailable in restricted environments
        return [work(K) for K in k_values]
