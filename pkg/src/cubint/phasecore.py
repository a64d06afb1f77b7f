"""Core domain types and classical-mechanics evaluation.

The objects here describe planar natural Hamiltonians H = (px^2 + py^2)/2
+ V1(x) + V2(y) (unit mass) together with invariants that are cubic in the
momenta.  A cubic invariant is stored as a coefficient tensor over the
basis of symmetrized monomials in angular momentum L = x*py - y*px and the
linear momenta, plus two scalar correction fields g1, g2 attached to px
and py.  Classically each symmetrized pair {f, p} evaluates to 2*f*p, so
the value of an invariant at a phase point is

    X = 2 * sum_{i+j+k=3} A_ijk L^i px^j py^k + 2 g1 px + 2 g2 py.

Everything is immutable after construction and safe to evaluate from
concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DerivativeUnavailableError,
    SingularPointError,
)

__all__ = [
    "PARAM_NAMES",
    "ParamSet",
    "PhaseState",
    "DerivStack",
    "Potential1D",
    "SeparablePotential",
    "CoeffTensor",
    "CorrectionFields",
    "ThirdOrderIntegral",
    "SingularLine",
    "eval_f_polynomials",
    "f_polynomial_derivatives",
    "eval_integral_classical",
    "poisson_bracket_residual",
]

#: Recognized scalar parameter names for catalog entries.
PARAM_NAMES = frozenset(
    {
        "a", "b", "c", "d", "d_tilde", "alpha", "hbar",
        "omega", "omega1", "omega2", "K1", "K2", "kappa",
        "b1", "b2", "beta1", "beta2", "sigma", "lambda",
        "k", "k1", "k2", "wp_g2", "wp_g3",
    }
)


class ParamSet(dict):
    """Named real parameters of a catalog entry.

    A thin dict subclass that validates values are finite reals, names are
    recognized, and hbar (when present) is nonnegative.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        for name, value in self.items():
            if name not in PARAM_NAMES:
                raise ValueError(f"unrecognized parameter name {name!r}")
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"parameter {name}={value!r} is not finite")
            self[name] = value
        if "hbar" in self and self["hbar"] < 0.0:
            raise ValueError("hbar must be >= 0")

    def merged(self, overrides: dict | None) -> "ParamSet":
        out = dict(self)
        out.update(overrides or {})
        return ParamSet(out)


@dataclass(frozen=True)
class PhaseState:
    """A point (x, y, px, py) in phase space, unit mass."""

    x: float
    y: float
    px: float
    py: float

    def __post_init__(self):
        for name in ("x", "y", "px", "py"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"phase-state component {name} is not finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.px, self.py], dtype=float)


@dataclass(frozen=True)
class DerivStack:
    """Value and first four derivatives of a 1D function at a point."""

    value: float
    d1: float
    d2: float
    d3: float
    d4: float

    def __iter__(self):
        return iter((self.value, self.d1, self.d2, self.d3, self.d4))

    def __getitem__(self, n: int) -> float:
        return (self.value, self.d1, self.d2, self.d3, self.d4)[n]


@dataclass(frozen=True)
class SingularLine:
    """A singular line of the potential or of a correction field.

    axis is "x" or "y"; the line is {axis == position}.
    """

    axis: str
    position: float

    def distance(self, x, y):
        coord = x if self.axis == "x" else y
        return np.abs(np.asarray(coord, dtype=float) - self.position)


@dataclass(frozen=True)
class Potential1D:
    """One-dimensional potential component with an exact derivative tower.

    ``evaluator(x)`` returns an array of shape (5,) for scalar input or
    (5, n) for array input, holding value, d1, d2, d3, d4.  Evaluation is
    deterministic; derivative channels are produced analytically (or from
    a defining ODE), never by finite differences.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    singularities: tuple[float, ...] = ()
    label: str = ""
    domain: tuple[float, float] | None = None
    meta: dict = field(default_factory=dict)
    fast_d1: Callable[[float], float] | None = None

    def derivs(self, x, order: int = 4) -> np.ndarray:
        """Derivative channels 0..order at x (scalar or array)."""
        if order > 4:
            raise DerivativeUnavailableError(
                f"{self.label or 'potential'}: derivatives above order 4 "
                "are not stored"
            )
        out = np.asarray(self.evaluator(np.asarray(x, dtype=float)))
        return out[: order + 1]

    def stack(self, x: float) -> DerivStack:
        vals = self.derivs(float(x))
        return DerivStack(*(float(v) for v in vals))

    def value(self, x):
        return self.derivs(x, order=0)[0]

    def d1(self, x: float) -> float:
        """Scalar first derivative on the fast path when one is attached."""
        if self.fast_d1 is not None:
            return self.fast_d1(x)
        return float(self.derivs(x, order=1)[1])

    def min_singular_distance(self, x) -> float:
        if not self.singularities:
            return math.inf
        x = np.asarray(x, dtype=float)
        return float(min(np.min(np.abs(x - s)) for s in self.singularities))


@dataclass(frozen=True)
class SeparablePotential:
    """V(x, y) = V1(x) + V2(y), with hbar carried for quantum entries."""

    v1: Potential1D
    v2: Potential1D
    hbar: float = 0.0

    def __post_init__(self):
        if self.hbar < 0.0:
            raise ValueError("hbar must be >= 0")

    def value(self, x, y):
        return self.v1.value(x) + self.v2.value(y)

    def singular_lines(self) -> tuple[SingularLine, ...]:
        lines = [SingularLine("x", s) for s in self.v1.singularities]
        lines += [SingularLine("y", s) for s in self.v2.singularities]
        return tuple(lines)


_COEFF_NAMES = ("A300", "A210", "A201", "A120", "A111",
                "A102", "A030", "A021", "A012", "A003")


@dataclass(frozen=True)
class CoeffTensor:
    """The ten coefficients A_ijk (i+j+k = 3) of a cubic invariant.

    Index i counts powers of L, j powers of px, k powers of py.
    """

    A300: float = 0.0
    A210: float = 0.0
    A201: float = 0.0
    A120: float = 0.0
    A111: float = 0.0
    A102: float = 0.0
    A030: float = 0.0
    A021: float = 0.0
    A012: float = 0.0
    A003: float = 0.0

    def __post_init__(self):
        for name in _COEFF_NAMES:
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"coefficient {name} is not finite")

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in _COEFF_NAMES}

    def monomials(self):
        """(i, j, k, A_ijk) for the nonzero coefficients."""
        powers = {
            "A300": (3, 0, 0), "A210": (2, 1, 0), "A201": (2, 0, 1),
            "A120": (1, 2, 0), "A111": (1, 1, 1), "A102": (1, 0, 2),
            "A030": (0, 3, 0), "A021": (0, 2, 1), "A012": (0, 1, 2),
            "A003": (0, 0, 3),
        }
        for name, (i, j, k) in powers.items():
            coeff = getattr(self, name)
            if coeff != 0.0:
                yield i, j, k, coeff

    def is_l_free(self) -> bool:
        return (self.A300 == self.A210 == self.A201 ==
                self.A120 == self.A111 == self.A102 == 0.0)

    def scaled(self, factor: float) -> "CoeffTensor":
        return CoeffTensor(**{k: factor * v for k, v in self.as_dict().items()})


def eval_f_polynomials(coeffs: CoeffTensor, x, y):
    """The four structure polynomials of the cubic coefficient tensor.

    These multiply the potential gradients in the invariance conditions:
    f1 depends on y only, f4 on x only, f2 and f3 mix both.
    """
    A = coeffs
    f1 = -A.A300 * y**3 + A.A210 * y**2 - A.A120 * y + A.A030
    f2 = (3 * A.A300 * x * y**2 - 2 * A.A210 * x * y + A.A201 * y**2
          + A.A120 * x - A.A111 * y + A.A021)
    f3 = (-3 * A.A300 * x**2 * y + A.A210 * x**2 - 2 * A.A201 * x * y
          + A.A111 * x - A.A102 * y + A.A012)
    f4 = A.A300 * x**3 + A.A201 * x**2 + A.A102 * x + A.A003
    return f1, f2, f3, f4


def f_polynomial_derivatives(coeffs: CoeffTensor, x, y) -> dict:
    """Partial derivatives of the structure polynomials (closed forms)."""
    A = coeffs
    return {
        "f1y": -3 * A.A300 * y**2 + 2 * A.A210 * y - A.A120,
        "f1yy": -6 * A.A300 * y + 2 * A.A210,
        "f2x": 3 * A.A300 * y**2 - 2 * A.A210 * y + A.A120,
        "f2y": 6 * A.A300 * x * y - 2 * A.A210 * x + 2 * A.A201 * y - A.A111,
        "f2xy": 6 * A.A300 * y - 2 * A.A210,
        "f2yy": 6 * A.A300 * x + 2 * A.A201,
        "f3x": -6 * A.A300 * x * y + 2 * A.A210 * x - 2 * A.A201 * y + A.A111,
        "f3y": -3 * A.A300 * x**2 - 2 * A.A201 * x - A.A102,
        "f3xx": -6 * A.A300 * y + 2 * A.A210,
        "f3xy": -6 * A.A300 * x - 2 * A.A201,
        "f4x": 3 * A.A300 * x**2 + 2 * A.A201 * x + A.A102,
        "f4xx": 6 * A.A300 * x + 2 * A.A201,
    }


def _zero_field(x, y):
    return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)


@dataclass(frozen=True)
class CorrectionFields:
    """The scalar fields g1, g2 of a cubic invariant with their partials.

    Each callable accepts (x, y) scalars or broadcastable arrays.
    """

    g1: Callable = _zero_field
    g1_x: Callable = _zero_field
    g1_y: Callable = _zero_field
    g2: Callable = _zero_field
    g2_x: Callable = _zero_field
    g2_y: Callable = _zero_field

    @staticmethod
    def zero() -> "CorrectionFields":
        return CorrectionFields()


@dataclass(frozen=True)
class ThirdOrderIntegral:
    """A cubic invariant: coefficient tensor, correction fields, label."""

    coeffs: CoeffTensor
    corrections: CorrectionFields = field(default_factory=CorrectionFields.zero)
    label: str = ""
    singularities: tuple[SingularLine, ...] = ()

    def __post_init__(self):
        if all(v == 0.0 for v in self.coeffs.as_dict().values()):
            g = self.corrections
            if g.g1 is _zero_field and g.g2 is _zero_field:
                raise ValueError(
                    "invariant has no coefficients and no correction fields"
                )

    def check_regular(self, state: PhaseState, margin: float = 1e-9):
        for line in self.singularities:
            if float(line.distance(state.x, state.y)) <= margin:
                raise SingularPointError(
                    f"state lies on singular line {line.axis} = {line.position}"
                )


def eval_integral_classical(integral: ThirdOrderIntegral, state: PhaseState) -> float:
    """Classical value of a cubic invariant at a phase point."""
    integral.check_regular(state)
    x, y, px, py = state.x, state.y, state.px, state.py
    L = x * py - y * px
    total = 0.0
    for i, j, k, coeff in integral.coeffs.monomials():
        total += coeff * L**i * px**j * py**k
    g = integral.corrections
    total += float(g.g1(x, y)) * px + float(g.g2(x, y)) * py
    return 2.0 * total


def poisson_bracket_residual(
    integral: ThirdOrderIntegral,
    potential: SeparablePotential,
    state: PhaseState,
) -> float:
    """Time derivative of the invariant along the Hamiltonian flow.

    Expands the bracket with H = (px^2 + py^2)/2 + V1(x) + V2(y) by the
    chain rule over the momentum-polynomial coefficients; vanishes exactly
    when the invariant is conserved.
    """
    integral.check_regular(state)
    margin = 1e-9
    if potential.v1.min_singular_distance(state.x) <= margin or \
       potential.v2.min_singular_distance(state.y) <= margin:
        raise SingularPointError("state lies on a potential singularity")

    x, y, px, py = state.x, state.y, state.px, state.py
    L = x * py - y * px
    v1x = float(potential.v1.derivs(state.x, order=1)[1])
    v2y = float(potential.v2.derivs(state.y, order=1)[1])

    X_x = X_y = X_px = X_py = 0.0
    for i, j, k, coeff in integral.coeffs.monomials():
        Li1 = L ** (i - 1) if i > 0 else 0.0
        mono = px**j * py**k
        X_x += coeff * i * Li1 * py * mono
        X_y += coeff * i * Li1 * (-px) * mono
        X_px += coeff * (i * Li1 * (-y) * mono
                         + (j * L**i * px ** (j - 1) * py**k if j > 0 else 0.0))
        X_py += coeff * (i * Li1 * x * mono
                         + (k * L**i * px**j * py ** (k - 1) if k > 0 else 0.0))

    g = integral.corrections
    X_x += float(g.g1_x(x, y)) * px + float(g.g2_x(x, y)) * py
    X_y += float(g.g1_y(x, y)) * px + float(g.g2_y(x, y)) * py
    X_px += float(g.g1(x, y))
    X_py += float(g.g2(x, y))

    # dX/dt = X_x xdot + X_y ydot + X_px pxdot + X_py pydot
    return 2.0 * (X_x * px + X_y * py - X_px * v1x - X_py * v2y)
