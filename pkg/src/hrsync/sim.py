"""Fixed-step integration of one neuron or a unidirectionally coupled pair.

The presynaptic (sending) neuron is autonomous; the postsynaptic (receiving)
neuron feels an electrical coupling term ``K*(x_pre - x_post)`` on its first
equation only. An optional adaptive law steers one structural parameter of
the receiving neuron (by default its external current) so the pair becomes
structurally identical:

    dq/dt = -gain * sum_l  d f_l / d q |_(pre state, pre params) * e_l,
    e = post_state - pre_state,

which for the external current reduces to ``dI2/dt = -gain*xi*(x2 - x1)``.

The adapted parameter is integrated as a ninth state component by the same
Runge-Kutta step as the neurons, so there is no operator-splitting error.
Activation is decided once per step from the step's left endpoint; no
sub-step event location is attempted (the switch-time error is O(dt)).

Runs are deterministic: identical specs and configs produce bit-identical
sample sequences on a given build.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .energy import make_energy_eval
from .model import (
    ADAPTABLE_PARAMS,
    NeuronParams,
    NeuronState,
    make_field,
    param_sensitivity,
)

__all__ = [
    "AdaptationSpec",
    "DivergenceError",
    "PairConfig",
    "SimSpec",
    "TrajectorySample",
    "coupled_derivative",
    "rk4_step",
    "run_isolated",
    "run_pair",
]

#: Trajectories of the canonical model stay within a few units of the origin;
#: reaching this bound means the integration has left the physical regime.
DIVERGENCE_BOUND = 100.0


class DivergenceError(RuntimeError):
    """Raised when a trajectory leaves the boundedness guard or turns non-finite."""

    def __init__(self, t: float, message: str | None = None):
        self.t = t
        super().__init__(message or f"trajectory diverged at t={t:g}")


@dataclass(frozen=True)
class AdaptationSpec:
    """Which postsynaptic parameter to adapt, with what gain, from when."""

    target: str = "I"
    gain: float = 1.0
    start_time: float = 0.0

    def __post_init__(self) -> None:
        if self.target not in ADAPTABLE_PARAMS:
            raise ValueError(
                f"adaptation target {self.target!r} must be one of {ADAPTABLE_PARAMS}"
            )
        if not self.gain > 0:
            raise ValueError("adaptation gain must be positive")
        if self.start_time < 0:
            raise ValueError("adaptation start_time must be >= 0")


@dataclass(frozen=True)
class PairConfig:
    """Drive-response pair: parameters for both neurons plus the coupling.

    Only the postsynaptic neuron is coupled (its coupling gain is ``K``); the
    presynaptic gain is structurally zero, there is no field for it.
    """

    pre: NeuronParams
    post: NeuronParams
    K: float = 0.0
    adaptation: AdaptationSpec | None = None

    def __post_init__(self) -> None:
        if not self.K >= 0:
            raise ValueError("coupling strength K must be >= 0")


@dataclass(frozen=True)
class SimSpec:
    """Integration grid and recording policy.

    ``t_end`` must be an integer number of steps; samples are kept every
    ``record_every`` steps once ``t >= transient``.
    """

    dt: float = 0.01
    t_end: float = 200.0
    record_every: int = 1
    initial_pre: NeuronState = NeuronState(0.1, 0.2, 0.3, 0.1)
    initial_post: NeuronState = NeuronState(0.0, 0.0, 0.0, 0.0)
    transient: float = 0.0

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not (self.t_end > self.transient >= 0):
            raise ValueError("need t_end > transient >= 0")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        steps = round(self.t_end / self.dt)
        if steps < 1 or abs(steps * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            raise ValueError("t_end must be an integer multiple of dt")

    @property
    def n_steps(self) -> int:
        return round(self.t_end / self.dt)


@dataclass(frozen=True, slots=True)
class TrajectorySample:
    """One recorded instant of a run.

    ``post_I`` is the live value of the adapted parameter (the postsynaptic
    external current unless another target was configured). ``e`` is the
    state error ``post_state - pre_state``, componentwise.
    """

    t: float
    pre_state: NeuronState
    post_state: NeuronState
    post_I: float
    e: tuple[float, float, float, float]
    H_pre: float
    Hdot_pre: float
    H_post: float
    Hdot_post: float


def rk4_step(f, state, t: float, dt: float):
    """One classical fourth-order Runge-Kutta step of ``d state/dt = f(state, t)``.

    ``state`` may be a scalar or a flat array; ``f`` must return the same
    shape. Raises :class:`DivergenceError` if the result is not finite.
    """
    half = 0.5 * dt
    k1 = f(state, t)
    k2 = f(state + half * k1, t + half)
    k3 = f(state + half * k2, t + half)
    k4 = f(state + dt * k3, t + dt)
    out = state + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    if not np.all(np.isfinite(out)):
        raise DivergenceError(t, f"non-finite state after step at t={t:g}")
    return out


def _adapted_params(config: PairConfig, value: float) -> NeuronParams:
    """Postsynaptic parameters with the adapted target replaced by ``value``."""
    target = config.adaptation.target if config.adaptation else "I"
    return replace(config.post, **{target: value})


def _make_pair_rhs(config: PairConfig):
    """Derivative of the 9-component joint state, as ``rhs(joint, active)``.

    Layout: (pre x,y,z,w, post x,y,z,w, adapted parameter). The adapted
    parameter's derivative is zero when ``active`` is false.
    """
    field_pre = make_field(config.pre)
    field_post = make_field(config.post)
    K = config.K
    I_pre = config.pre.I
    I_post = config.post.I
    adapt = config.adaptation
    target = adapt.target if adapt is not None else "I"
    gain = adapt.gain if adapt is not None else 0.0

    if target == "I":
        # Fast path: the live parameter feeds straight into the field kernels,
        # and the sensitivity is the constant (xi, 0, 0, 0) of the drive.
        xi_pre = config.pre.xi

        def rhs(joint: np.ndarray, active: bool) -> np.ndarray:
            x1, y1, z1, w1, x2, y2, z2, w2, q = joint.tolist()
            d1 = field_pre(x1, y1, z1, w1, I_pre)
            dx2, dy2, dz2, dw2 = field_post(x2, y2, z2, w2, q)
            dq = -gain * xi_pre * (x2 - x1) if active else 0.0
            return np.array(
                (*d1, dx2 + K * (x1 - x2), dy2, dz2, dw2, dq)
            )

    else:
        # General target: rebuild the postsynaptic field around the live
        # parameter value. Slow, but only non-current targets pay for it.
        def rhs(joint: np.ndarray, active: bool) -> np.ndarray:
            x1, y1, z1, w1, x2, y2, z2, w2, q = joint.tolist()
            d1 = field_pre(x1, y1, z1, w1, I_pre)
            live = make_field(_adapted_params(config, q))
            dx2, dy2, dz2, dw2 = live(x2, y2, z2, w2, I_post)
            if active:
                sens = param_sensitivity(
                    NeuronState(x1, y1, z1, w1), config.pre, target
                ).as_tuple()
                err = (x2 - x1, y2 - y1, z2 - z1, w2 - w1)
                dq = -gain * math.fsum(se * ee for se, ee in zip(sens, err))
            else:
                dq = 0.0
            return np.array(
                (*d1, dx2 + K * (x1 - x2), dy2, dz2, dw2, dq)
            )

    return rhs


def coupled_derivative(joint, config: PairConfig, t: float) -> np.ndarray:
    """Joint derivative of the coupled pair at time ``t``.

    ``joint`` packs (pre_state, post_state, adapted parameter) as a flat
    9-vector. The adaptation term is zero before its start time or when no
    adaptation is configured.
    """
    joint = np.asarray(joint, dtype=float)
    if joint.shape != (9,):
        raise ValueError(f"joint state must be a flat 9-vector, got shape {joint.shape}")
    if not np.all(np.isfinite(joint)):
        raise ValueError("joint state must be finite")
    adapt = config.adaptation
    active = adapt is not None and t >= adapt.start_time
    return _make_pair_rhs(config)(joint, active)


def _check_bound(values, t: float) -> None:
    if max(abs(v) for v in values) >= DIVERGENCE_BOUND:
        raise DivergenceError(
            t, f"state left the boundedness guard (|component| >= {DIVERGENCE_BOUND:g}) at t={t:g}"
        )


def run_pair(spec: SimSpec, config: PairConfig) -> list[TrajectorySample]:
    """Integrate the coupled pair from t=0 to ``spec.t_end``.

    Returns samples every ``spec.record_every`` steps for ``t >= transient``.
    Energies are evaluated with each neuron's own parameters; the receiving
    neuron uses the live adapted value.
    """
    adapt = config.adaptation
    target = adapt.target if adapt is not None else "I"
    start = adapt.start_time if adapt is not None else math.inf
    q0 = getattr(config.post, target)

    rhs = _make_pair_rhs(config)

    def f_idle(v, t):
        return rhs(v, False)

    def f_active(v, t):
        return rhs(v, True)

    energy_pre = make_energy_eval(config.pre)
    I_pre = config.pre.I
    I_post = config.post.I
    if target == "I":
        energy_post_at = make_energy_eval(config.post)
    else:
        def energy_post_at(x, y, z, w, q):
            return make_energy_eval(_adapted_params(config, q))(x, y, z, w, I_post)

    dt = spec.dt
    rec = spec.record_every
    record_from = spec.transient - 1e-12
    samples: list[TrajectorySample] = []

    def record(t: float, joint: np.ndarray) -> None:
        x1, y1, z1, w1, x2, y2, z2, w2, q = joint.tolist()
        H1, Hdot1, _ = energy_pre(x1, y1, z1, w1, I_pre)
        H2, Hdot2, _ = energy_post_at(x2, y2, z2, w2, q)
        samples.append(
            TrajectorySample(
                t=t,
                pre_state=NeuronState(x1, y1, z1, w1),
                post_state=NeuronState(x2, y2, z2, w2),
                post_I=q,
                e=(x2 - x1, y2 - y1, z2 - z1, w2 - w1),
                H_pre=H1,
                Hdot_pre=Hdot1,
                H_post=H2,
                Hdot_post=Hdot2,
            )
        )

    joint = np.array((*spec.initial_pre.as_tuple(), *spec.initial_post.as_tuple(), q0))
    n_steps = spec.n_steps
    for i in range(n_steps + 1):
        t = i * dt
        if i % rec == 0 and t >= record_from:
            record(t, joint)
        if i == n_steps:
            break
        stepper = f_active if (adapt is not None and t >= start) else f_idle
        joint = rk4_step(stepper, joint, t, dt)
        _check_bound(joint.tolist()[:8], (i + 1) * dt)
    return samples


def run_isolated(spec: SimSpec, params: NeuronParams) -> list[TrajectorySample]:
    """Integrate a single free neuron started from ``spec.initial_pre``.

    Samples mirror the lone neuron in both state slots, with zero error.
    """
    field = make_field(params)
    energy_at = make_energy_eval(params)
    I = params.I

    def f(v, t):
        x, y, z, w = v.tolist()
        return np.array(field(x, y, z, w, I))

    dt = spec.dt
    rec = spec.record_every
    record_from = spec.transient - 1e-12
    samples: list[TrajectorySample] = []

    state = np.array(spec.initial_pre.as_tuple())
    n_steps = spec.n_steps
    for i in range(n_steps + 1):
        t = i * dt
        if i % rec == 0 and t >= record_from:
            x, y, z, w = state.tolist()
            H, Hdot, _ = energy_at(x, y, z, w, I)
            here = NeuronState(x, y, z, w)
            samples.append(
                TrajectorySample(
                    t=t,
                    pre_state=here,
                    post_state=here,
                    post_I=I,
                    e=(0.0, 0.0, 0.0, 0.0),
                    H_pre=H,
                    Hdot_pre=Hdot,
                    H_post=H,
                    Hdot_post=Hdot,
                )
            )
        if i == n_steps:
            break
        state = rk4_step(f, state, t, dt)
        _check_bound(state.tolist(), (i + 1) * dt)
    return samples
