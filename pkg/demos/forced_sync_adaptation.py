"""Forced synchronization and its energy cost, then adaptive structural tuning.

A chaotic sender (I1=3.024) drives a quiescent receiver (I2=0.85) through an
electrical coupling of strength K=5. Holding the receiver on the sender's
regime costs energy: the receiver's averaged energy derivative is far from
zero. At t=100 an adaptive law starts steering the receiver's external
current toward the sender's; the net energy flow collapses to zero while the
current climbs from 0.85 toward 3.024.
"""

from pathlib import Path

import numpy as np

from hrsync import (
    AdaptationSpec,
    NeuronParams,
    PairConfig,
    SimSpec,
    run_pair,
    sync_rms,
    windowed_average,
)
from hrsync.analysis import trajectory_arrays
from hrsync.svgplot import Panel, write_chart

out_dir = Path("demo_output")
out_dir.mkdir(exist_ok=True)

config = PairConfig(
    pre=NeuronParams.canonical(I=3.024),
    post=NeuronParams.canonical(I=0.85),
    K=5.0,
    adaptation=AdaptationSpec(target="I", gain=1.0, start_time=100.0),
)
samples = run_pair(SimSpec(dt=0.01, t_end=200.0), config)
a = trajectory_arrays(samples)
t = a["t"]

avg_h2 = windowed_average(t, a["H_post"], 10.0)
avg_hdot2 = windowed_average(t, a["Hdot_post"], 5.0)


def window_mean(series, lo, hi):
    mask = (series.times >= lo) & (series.times <= hi)
    return series.values[mask].mean()


print("receiving neuron, before adaptation (t in [50, 100]):")
print(f"  10-unit averaged energy      : {window_mean(avg_h2, 50, 100):+8.2f}")
print(f"  5-unit averaged energy deriv.: {window_mean(avg_hdot2, 50, 100):+8.3f}  <- the coupling pays this")
print(f"  full-state sync error (RMS)  : {sync_rms(samples, 50, 100):8.3f}")
print("after adaptation (t in [150, 200]):")
print(f"  5-unit averaged energy deriv.: {window_mean(avg_hdot2, 150, 200):+8.4f}  <- balanced again")
print(f"  full-state sync error (RMS)  : {sync_rms(samples, 150, 200):8.3f}")
print(f"adapted current: 0.85 -> {samples[-1].post_I:.3f} (sender at 3.024; the")
print("remaining gap tracks the slow currents, which relax on ~1/m and ~1/(n*k))")

write_chart(
    out_dir / "forced_sync_adaptation.svg",
    [
        Panel("receiving-neuron energy, 10-unit average", "t", "H2")
        .add("avgH2", avg_h2.times, avg_h2.values),
        Panel("receiving-neuron energy derivative, 5-unit average", "t", "Hdot2")
        .add("avgHdot2", avg_hdot2.times, avg_hdot2.values),
        Panel("adapted external current", "t", "I2").add("I2", t, a["post_I"]),
    ],
)
print(f"wrote {out_dir}/forced_sync_adaptation.svg")
