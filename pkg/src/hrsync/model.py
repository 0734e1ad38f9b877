"""Four-variable Hindmarsh-Rose neuron: parameters, state, and vector field.

The model couples a fast membrane potential ``x``, a fast recovery voltage
``y``, a slow current ``z`` and an even slower current ``w``:

    dx/dt = a*y + b*x^2 - c*x^3 - d*z + xi*I
    dy/dt = e - f*x^2 - y - g*w
    dz/dt = m*(-z + s*(x + h))
    dw/dt = n*(-k*w + r*(y + l))

The recovery offset in the ``w`` equation is the parameter ``l``; using a
literal 1 there would break the exact splitting of the field into a
conservative part (orthogonal to the energy gradient) and a dissipative
remainder, which is what the :mod:`hrsync.energy` module relies on.

All arithmetic is on dimensionless floats; the physical units quoted in the
field docs are carried as documentation only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

__all__ = [
    "ADAPTABLE_PARAMS",
    "NeuronParams",
    "NeuronState",
    "StateDerivative",
    "conservative_field",
    "dissipative_field",
    "param_sensitivity",
    "vector_field",
]


@dataclass(frozen=True)
class NeuronParams:
    """Constants of the neuron model plus the energy-scale conductance ``p``.

    ``p`` only sets the scale (and sign) of the energy function; it does not
    enter the equations of motion and therefore cannot be adapted.
    """

    a: float  # dimensionless, gain of y in the x equation
    b: float  # 1/mV
    c: float  # 1/mV^2
    d: float  # MOhm
    xi: float  # MOhm, converts the external current I to a voltage rate
    I: float  # external current, arbitrary current units
    e: float  # mV
    f: float  # 1/mV
    g: float  # MOhm
    m: float  # rate of the slow current z
    s: float  # uS
    h: float  # mV
    n: float  # rate of the slower current w
    k: float  # dimensionless
    r: float  # uS
    l: float  # mV, recovery offset in the w equation
    p: float  # conductance (S) setting the energy scale; negative by convention

    def __post_init__(self) -> None:
        for fld in fields(self):
            value = getattr(self, fld.name)
            if not math.isfinite(value):
                raise ValueError(f"parameter {fld.name!r} must be finite, got {value!r}")
        # a and m*s appear as divisors in the energy function
        if self.a == 0.0:
            raise ValueError("parameter 'a' must be nonzero")
        if self.m * self.s == 0.0:
            raise ValueError("product m*s must be nonzero")

    @classmethod
    def canonical(cls, I: float = 3.024) -> "NeuronParams":
        """Reference parameter set; ``I=3.024`` gives chaotic spiking-bursting,
        ``I=0.85`` a quiescent neuron."""
        return cls(
            a=1.0,
            b=3.0,
            c=1.0,
            d=0.99,
            xi=1.0,
            I=I,
            e=1.01,
            f=5.0128,
            g=0.0278,
            m=0.00215,
            s=3.966,
            h=1.605,
            n=0.0009,
            k=0.9573,
            r=3.0,
            l=1.619,
            p=-1.0,
        )

    def with_current(self, I: float) -> "NeuronParams":
        """Copy of this parameter set with the external current replaced."""
        return replace(self, I=I)


#: Parameters the adaptive law may target. ``p`` is excluded: it does not
#: enter the vector field, so its sensitivity is identically zero.
ADAPTABLE_PARAMS: tuple[str, ...] = tuple(
    fld.name for fld in fields(NeuronParams) if fld.name != "p"
)


@dataclass(frozen=True)
class NeuronState:
    """Phase-space point (x, y, z, w)."""

    x: float  # membrane potential, mV
    y: float  # fast recovery voltage, mV
    z: float  # slow current
    w: float  # slower current

    def __post_init__(self) -> None:
        for name in ("x", "y", "z", "w"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"state component {name!r} must be finite")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.z, self.w)

    @classmethod
    def from_sequence(cls, values) -> "NeuronState":
        x, y, z, w = values
        return cls(float(x), float(y), float(z), float(w))


@dataclass(frozen=True)
class StateDerivative:
    """Time derivative of a :class:`NeuronState`, per unit dimensionless time."""

    dx: float
    dy: float
    dz: float
    dw: float

    def __post_init__(self) -> None:
        for name in ("dx", "dy", "dz", "dw"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"derivative component {name!r} must be finite")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.dx, self.dy, self.dz, self.dw)


def make_field(params: NeuronParams):
    """Bind ``params`` into a fast plain-float kernel ``f(x, y, z, w, I)``.

    The external current is left as an argument so a live adapted value can
    be substituted without rebuilding the closure. This is the single source
    of the model equations; every public entry point routes through it.
    """
    a, b, c, d, xi = params.a, params.b, params.c, params.d, params.xi
    e, f, g = params.e, params.f, params.g
    m, s, h = params.m, params.s, params.h
    n, k, r, l = params.n, params.k, params.r, params.l

    def field(x: float, y: float, z: float, w: float, I: float):
        x2 = x * x
        return (
            a * y + b * x2 - c * x2 * x - d * z + xi * I,
            e - f * x2 - y - g * w,
            m * (-z + s * (x + h)),
            n * (-k * w + r * (y + l)),
        )

    return field


def make_dissipative_field(params: NeuronParams):
    """Kernel for the dissipative part of the field, ``f_d(x, y, z, w, I)``.

    f_d = (b*x^2 - c*x^3 + xi*I, e - y, m*s*h - m*z, n*r*l - n*k*w)
    """
    b, c, xi, e = params.b, params.c, params.xi, params.e
    m, msh = params.m, params.m * params.s * params.h
    nrl, nk = params.n * params.r * params.l, params.n * params.k

    def field(x: float, y: float, z: float, w: float, I: float):
        x2 = x * x
        return (
            b * x2 - c * x2 * x + xi * I,
            e - y,
            msh - m * z,
            nrl - nk * w,
        )

    return field


def vector_field(state: NeuronState, params: NeuronParams) -> StateDerivative:
    """Right-hand side of the equations of motion at ``state``."""
    return StateDerivative(*make_field(params)(*state.as_tuple(), params.I))


def dissipative_field(state: NeuronState, params: NeuronParams) -> StateDerivative:
    """Dissipative part of the field: the component responsible for the
    neuron's energy exchange with its environment."""
    return StateDerivative(*make_dissipative_field(params)(*state.as_tuple(), params.I))


def conservative_field(state: NeuronState, params: NeuronParams) -> StateDerivative:
    """Conservative remainder ``vector_field - dissipative_field``.

    Closed form (a*y - d*z, -f*x^2 - g*w, m*s*x, n*r*y); it is everywhere
    orthogonal to the energy gradient.
    """
    x, y, z, w = state.as_tuple()
    return StateDerivative(
        params.a * y - params.d * z,
        -params.f * x * x - params.g * w,
        params.m * params.s * x,
        params.n * params.r * y,
    )


def param_sensitivity(
    state: NeuronState, params: NeuronParams, which: str
) -> StateDerivative:
    """Partial derivative of the vector field with respect to one parameter.

    ``which`` must name a :class:`NeuronParams` field other than ``p``. The
    result drives the adaptive law; for ``which="I"`` it is the constant
    (xi, 0, 0, 0).
    """
    if which not in ADAPTABLE_PARAMS:
        raise ValueError(
            f"unknown or non-adaptable parameter {which!r}; "
            f"expected one of {ADAPTABLE_PARAMS}"
        )
    x, y, z, w = state.as_tuple()
    per_param = {
        "a": (y, 0.0, 0.0, 0.0),
        "b": (x * x, 0.0, 0.0, 0.0),
        "c": (-x * x * x, 0.0, 0.0, 0.0),
        "d": (-z, 0.0, 0.0, 0.0),
        "xi": (params.I, 0.0, 0.0, 0.0),
        "I": (params.xi, 0.0, 0.0, 0.0),
        "e": (0.0, 1.0, 0.0, 0.0),
        "f": (0.0, -x * x, 0.0, 0.0),
        "g": (0.0, -w, 0.0, 0.0),
        "m": (0.0, 0.0, -z + params.s * (x + params.h), 0.0),
        "s": (0.0, 0.0, params.m * (x + params.h), 0.0),
        "h": (0.0, 0.0, params.m * params.s, 0.0),
        "n": (0.0, 0.0, 0.0, -params.k * w + params.r * (y + params.l)),
        "k": (0.0, 0.0, 0.0, -params.n * w),
        "r": (0.0, 0.0, 0.0, params.n * (y + params.l)),
        "l": (0.0, 0.0, 0.0, params.n * params.r),
    }
    return StateDerivative(*per_param[which])
