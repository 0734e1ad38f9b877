"""Energy function of the four-variable neuron and its trajectory derivative.

Each state carries a scalar energy

    H = (p/a) * ( (2/3)*f*x^3 + (C/a)*x^2 + a*y^2
                  + (d/(a*m*s))*C*z^2 - 2*d*y*z + 2*g*x*w ),
    C = m*s*d - g*n*r,

whose gradient is orthogonal to the conservative part of the vector field.
The net energy exchanged with the environment per unit time is therefore the
inner product of the gradient with the dissipative part alone:

    Hdot = grad(H) . f_d.

``Hdot`` is computed exactly in that inner-product form, never from an
expanded polynomial, so the identity ``Hdot == grad . f_d`` holds to the last
bit by construction. With the conventional negative conductance ``p`` the
spike's repolarization phase shows up as a demand of energy (Hdot > 0).

Division guards: ``a != 0`` and ``m*s != 0`` are enforced when the parameter
record is constructed, so every function here is total over valid inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import NeuronParams, NeuronState, make_dissipative_field

__all__ = [
    "EnergyReport",
    "energy",
    "energy_gradient",
    "energy_derivative",
    "energy_report",
]


@dataclass(frozen=True)
class EnergyReport:
    """Energy bookkeeping at a single state.

    ``Hdot`` equals ``gradient . dissipative_field`` exactly; the report is
    produced by :func:`energy_report`, which computes it that way.
    """

    H: float
    Hdot: float
    gradient: tuple[float, float, float, float]


def make_energy_eval(params: NeuronParams):
    """Bind ``params`` into a kernel ``(x, y, z, w, I) -> (H, Hdot)``.

    The external current is an argument because the dissipative field, and
    hence ``Hdot``, depends on the live value of ``I`` when the current is
    being adapted. ``H`` itself does not contain ``I``.
    """
    a, d, f, g, p = params.a, params.d, params.f, params.g, params.p
    cc = params.m * params.s * params.d - params.g * params.n * params.r
    cc_a = cc / a
    dams = d / (a * params.m * params.s)
    pa = p / a
    two_pa = 2.0 * pa
    two_thirds_f = (2.0 / 3.0) * f
    f_d = make_dissipative_field(params)

    def evaluate(x: float, y: float, z: float, w: float, I: float):
        x2 = x * x
        H = pa * (
            two_thirds_f * x2 * x
            + cc_a * x2
            + a * y * y
            + dams * cc * z * z
            - 2.0 * d * y * z
            + 2.0 * g * x * w
        )
        gx = two_pa * (f * x2 + cc_a * x + g * w)
        gy = two_pa * (a * y - d * z)
        gz = two_pa * (dams * cc * z - d * y)
        gw = two_pa * (g * x)
        d1, d2, d3, d4 = f_d(x, y, z, w, I)
        Hdot = gx * d1 + gy * d2 + gz * d3 + gw * d4
        return H, Hdot, (gx, gy, gz, gw)

    return evaluate


def energy(state: NeuronState, params: NeuronParams) -> float:
    """Energy of the neuron at ``state``."""
    H, _, _ = make_energy_eval(params)(*state.as_tuple(), params.I)
    return H


def energy_gradient(state: NeuronState, params: NeuronParams) -> np.ndarray:
    """Gradient of the energy with respect to (x, y, z, w).

    Closed form, scaled by 2p/a:

        ( f*x^2 + (C/a)*x + g*w,  a*y - d*z,  (d/(a*m*s))*C*z - d*y,  g*x )
    """
    _, _, grad = make_energy_eval(params)(*state.as_tuple(), params.I)
    return np.array(grad)


def energy_derivative(state: NeuronState, params: NeuronParams) -> float:
    """Energy exchanged with the environment per unit time at ``state``.

    Equals ``energy_gradient(state) . dissipative_field(state)``; its long
    term average vanishes on the free attractor and is nonzero for a neuron
    held off its natural attractor by a coupling device.
    """
    _, Hdot, _ = make_energy_eval(params)(*state.as_tuple(), params.I)
    return Hdot


def energy_report(state: NeuronState, params: NeuronParams) -> EnergyReport:
    """Bundle ``H``, ``Hdot`` and the gradient in one evaluation."""
    H, Hdot, grad = make_energy_eval(params)(*state.as_tuple(), params.I)
    return EnergyReport(H=H, Hdot=Hdot, gradient=grad)
