"""Validated numerical evaluation of the defining special functions.

Four ODE-defined functions back the transcendental potentials of the
catalog:

* the Weierstrass elliptic function, integrated in its second-order form
  wp'' = 6 wp^2 - g2/2 with the first-order relation
  (wp')^2 = 4 wp^3 - g2 wp - g3 kept as a conserved monitor,
* the first Painleve transcendent  y'' = 6 y^2 + x,
* the second Painleve transcendent  y'' = 2 y^3 + x y + alpha,
* a fourth-Painleve-type equation
  y'' = y'^2/(2y) - (3a/2) y^3 - 2 a x y^2 - ((a/2) x^2 + K1) y + K2/y.

Solutions carry a dense representation (value and first derivative);
higher derivatives come from analytic differentiation of the defining
ODE, so they are exact to the accuracy of (value, d1).  Painleve
solutions have movable poles: integration halts when the solution
exceeds a blow-up threshold or the step collapses, the abscissa is
recorded as a pole marker, and the validity interval is truncated with a
safety margin.  Silent extrapolation past a pole is never performed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    ImmediatePoleError,
    OutOfIntervalError,
    PoleCollisionError,
    StepFailureError,
    ZeroCrossingError,
)
from .phasecore import DerivStack

__all__ = [
    "PainleveIC",
    "SpecFunSolution",
    "weierstrass_p",
    "painleve1",
    "painleve2",
    "painleve4",
    "derivative_tower",
    "weierstrass_laurent",
]

BLOWUP = 1e8
POLE_MARGIN = 1e-3
MIN_STEP = 1e-12
DEFAULT_RTOL = 1e-12
DEFAULT_ATOL = 1e-14
RESIDUAL_BOUND = 1e-8


@dataclass(frozen=True)
class PainleveIC:
    """Initial data (x0, y0, y'0) for a Painleve-type equation."""

    x0: float
    y0: float
    yp0: float

    def __post_init__(self):
        for name in ("x0", "y0", "yp0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"initial datum {name} is not finite")


# ---------------------------------------------------------------------------
# defining equations


def _rhs_factory(kind: str, params: dict) -> Callable:
    if kind == "weierstrass":
        g2 = params["wp_g2"]

        def rhs(x, s):
            return (s[1], 6.0 * s[0] ** 2 - 0.5 * g2)

    elif kind == "p1":

        def rhs(x, s):
            return (s[1], 6.0 * s[0] ** 2 + x)

    elif kind == "p2":
        alpha = params["alpha"]

        def rhs(x, s):
            return (s[1], 2.0 * s[0] ** 3 + x * s[0] + alpha)

    elif kind == "p4":
        alpha, K1, K2 = params["alpha"], params["K1"], params["K2"]

        def rhs(x, s):
            y, p = s
            return (p, p * p / (2.0 * y) - 1.5 * alpha * y**3
                    - 2.0 * alpha * x * y * y - (0.5 * alpha * x * x + K1) * y
                    + K2 / y)

    else:  # pragma: no cover
        raise ValueError(f"unknown kind {kind!r}")
    return rhs


@lru_cache(maxsize=None)
def _tower_fns(kind: str):
    """Derivatives 2..5 of a solution, as functions of (x, y, y', params).

    Generated once per kind by total differentiation of the defining ODE
    along its own solutions.
    """
    import sympy as sp

    x, yv, pv = sp.symbols("_x _y _p")
    if kind == "weierstrass":
        g2s = sp.Symbol("_g2")
        params = (g2s,)
        F = 6 * yv**2 - g2s / 2
    elif kind == "p1":
        params = ()
        F = 6 * yv**2 + x
    elif kind == "p2":
        al = sp.Symbol("_al")
        params = (al,)
        F = 2 * yv**3 + x * yv + al
    elif kind == "p4":
        al, k1, k2 = sp.symbols("_al _k1 _k2")
        params = (al, k1, k2)
        F = (pv**2 / (2 * yv) - sp.Rational(3, 2) * al * yv**3
             - 2 * al * x * yv**2 - (al / 2 * x**2 + k1) * yv + k2 / yv)
    else:  # pragma: no cover
        raise ValueError(kind)

    def D(expr):
        return sp.diff(expr, x) + pv * sp.diff(expr, yv) + F * sp.diff(expr, pv)

    exprs = [F]
    for _ in range(3):
        exprs.append(sp.together(D(exprs[-1])))
    return sp.lambdify((x, yv, pv, *params), exprs, modules="numpy")


def _tower_args(kind: str, params: dict) -> tuple:
    if kind == "weierstrass":
        return (params["wp_g2"],)
    if kind == "p1":
        return ()
    if kind == "p2":
        return (params["alpha"],)
    return (params["alpha"], params["K1"], params["K2"])


# ---------------------------------------------------------------------------
# solution object


@dataclass(frozen=True)
class _Branch:
    lo: float
    hi: float
    sol: object  # scipy OdeSolution


@dataclass(frozen=True)
class SpecFunSolution:
    """A validated solution of one of the defining equations.

    ``interval`` is the validity interval actually covered (already
    shrunk away from any detected pole); ``pole_markers`` lists blow-up
    abscissae.  ``eval(x)`` returns (value, d1); ``derivs(x, order)``
    extends the tower analytically up to order 5.
    """

    kind: str
    parameters: dict
    interval: tuple[float, float]
    pole_markers: tuple[float, ...] = ()
    ode_residual_max: float = 0.0
    _branches: tuple[_Branch, ...] = field(default=(), repr=False)
    _zero: bool = field(default=False, repr=False)

    def _check_inside(self, x):
        lo, hi = self.interval
        tol = 1e-12 * (1.0 + abs(lo) + abs(hi))
        if np.any(np.asarray(x) < lo - tol) or np.any(np.asarray(x) > hi + tol):
            raise OutOfIntervalError(
                f"abscissa outside validity interval [{lo}, {hi}]"
            )

    def eval(self, x):
        """(value, d1) at x; scalar or array of any shape."""
        self._check_inside(x)
        x = np.asarray(x, dtype=float)
        if self._zero:
            return np.zeros((2,) + x.shape)
        xs = x.ravel()
        out = np.empty((2, xs.size))
        for br in self._branches:
            mask = (xs >= br.lo - 1e-12) & (xs <= br.hi + 1e-12)
            if np.any(mask):
                out[:, mask] = br.sol(xs[mask])
        return out.reshape((2,) + x.shape)

    def value(self, x):
        return self.eval(x)[0]

    def derivs(self, x, order: int = 4) -> np.ndarray:
        """Channels 0..order (order <= 5) from the defining equation."""
        if not 0 <= order <= 5:
            raise ValueError("order must be in 0..5")
        x = np.asarray(x, dtype=float)
        if self._zero:
            return np.zeros((order + 1,) + x.shape)
        v, d1 = self.eval(x)
        chans = [v, d1]
        if order >= 2:
            fns = _tower_fns(self.kind)(x, v, d1, *_tower_args(self.kind, self.parameters))
            chans.extend(fns[: order - 1])
        return np.stack(
            [np.broadcast_to(np.asarray(c, dtype=float), x.shape).copy()
             for c in chans[: order + 1]]
        )


def derivative_tower(sol: SpecFunSolution, x: float, order: int = 4) -> DerivStack:
    """Value and derivatives at one abscissa, d2 onward from the ODE."""
    if not 2 <= order <= 4:
        raise ValueError("order must be in 2..4")
    chans = sol.derivs(float(x), order=4)
    return DerivStack(*(float(c) for c in chans))


# ---------------------------------------------------------------------------
# integration engine


def _integrate_branch(rhs, x0, y0, x_end, method, rtol, atol, guard_zero):
    """Integrate from x0 toward x_end; returns (branch or None, pole, zero_hit)."""
    if x_end == x0:
        return None, None, None
    events = []

    def blow(x, s):
        return abs(s[0]) - BLOWUP

    blow.terminal = True
    events.append(blow)
    if guard_zero:

        def zero(x, s):
            return s[0]

        zero.terminal = True
        events.append(zero)

    res = solve_ivp(rhs, (x0, x_end), y0, method=method, rtol=rtol, atol=atol,
                    dense_output=True, events=events)
    pole = None
    zero_hit = None
    reached = res.t[-1]
    if res.status == 1:  # event
        if guard_zero and res.t_events[1].size:
            zero_hit = float(res.t_events[1][0])
        else:
            pole = float(res.t_events[0][0])
    elif res.status == -1:
        # step collapse: treat as a pole at the last reached abscissa
        pole = float(reached)
    if len(res.t) < 2:
        return None, pole, zero_hit
    lo, hi = min(x0, reached), max(x0, reached)
    if pole is not None:
        margin = POLE_MARGIN
        if x_end > x0:
            hi = min(hi, pole - margin)
        else:
            lo = max(lo, pole + margin)
        if hi <= lo:
            return None, pole, zero_hit
    return _Branch(lo, hi, res.sol), pole, zero_hit


def _validate(sol: SpecFunSolution, n: int = 200) -> SpecFunSolution:
    """Spot-check the defining-ODE residual over the validity interval.

    The second derivative is recovered by central differences of the
    dense d1 channel; steps are scaled to the local solution scale and
    points in the steep near-pole layer (|y| > 1e4) are skipped, where a
    difference quotient carries no information at double precision.
    """
    lo, hi = sol.interval
    if sol._zero or hi - lo <= 0:
        return sol
    pad = (hi - lo) * 1e-3
    xs = np.linspace(lo + pad, hi - pad, n)
    v, d1 = sol.eval(xs)
    keep = np.abs(v) <= 1e4
    if not np.any(keep):
        return sol
    xs, v, d1 = xs[keep], v[keep], d1[keep]
    h = np.clip(3e-5 * (np.abs(v) + 1.0) / (np.abs(d1) + 1.0), 1e-9, 1e-5)
    h = np.minimum(h, np.minimum(xs - lo, hi - xs) / 2.0)
    d2_fd = (sol.eval(xs + h)[1] - sol.eval(xs - h)[1]) / (2 * h)
    rhs_vals = np.asarray(
        _tower_fns(sol.kind)(xs, v, d1, *_tower_args(sol.kind, sol.parameters))[0],
        dtype=float,
    )
    resid = np.max(np.abs(d2_fd - rhs_vals) / (1.0 + np.abs(rhs_vals)))
    if resid > RESIDUAL_BOUND:
        raise StepFailureError(
            f"defining-ODE residual {resid:.3e} exceeds {RESIDUAL_BOUND:g}"
        )
    object.__setattr__(sol, "ode_residual_max", float(resid))
    return sol


def _build(kind, params, interval, ic, method, rtol, atol, guard_zero=False):
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    x0 = min(max(ic.x0, a), b)
    rhs = _rhs_factory(kind, params)
    branches = []
    poles = []
    lo_eff, hi_eff = x0, x0
    for target in (a, b):
        br, pole, zero_hit = _integrate_branch(
            rhs, x0, [ic.y0, ic.yp0], target, method, rtol, atol, guard_zero
        )
        if zero_hit is not None:
            raise ZeroCrossingError(
                f"solution reached y = 0 at x = {zero_hit:.6g}; the defining "
                "equation is singular there"
            )
        if pole is not None:
            poles.append(pole)
        if br is not None:
            branches.append(br)
            lo_eff = min(lo_eff, br.lo)
            hi_eff = max(hi_eff, br.hi)
    if not branches:
        raise ImmediatePoleError(
            "initial data blows up before one step can be completed"
        )
    sol = SpecFunSolution(
        kind=kind,
        parameters=dict(params),
        interval=(lo_eff, hi_eff),
        pole_markers=tuple(sorted(poles)),
        _branches=tuple(branches),
    )
    return _validate(sol)


# ---------------------------------------------------------------------------
# public constructors


def weierstrass_laurent(z, wp_g2: float, wp_g3: float, terms: int = 14):
    """(value, d1) of the elliptic function from its pole expansion at 0.

    The expansion wp(z) = z^-2 + sum c_k z^(2k-2) with c_2 = g2/20,
    c_3 = g3/28 and the standard quadratic recurrence for higher k; it
    converges inside the nearest nonzero lattice point, so for the seed
    radii used here the truncation is far below double precision.
    """
    c = {2: wp_g2 / 20.0, 3: wp_g3 / 28.0}
    for k in range(4, terms + 1):
        s = sum(c[m] * c[k - m] for m in range(2, k - 1))
        c[k] = 3.0 * s / ((2 * k + 1) * (k - 3))
    z = np.asarray(z, dtype=float)
    v = z**-2.0
    d = -2.0 * z**-3.0
    for k in range(2, terms + 1):
        v = v + c[k] * z ** (2 * k - 2)
        d = d + (2 * k - 2) * c[k] * z ** (2 * k - 3)
    return v, d


class _SeriesBranchSol:
    """Dense evaluator backed by the pole expansion (value, d1)."""

    def __init__(self, wp_g2, wp_g3):
        self.wp_g2 = wp_g2
        self.wp_g3 = wp_g3

    def __call__(self, xs):
        v, d = weierstrass_laurent(np.asarray(xs, dtype=float),
                                   self.wp_g2, self.wp_g3)
        return np.stack([np.atleast_1d(v), np.atleast_1d(d)])


def weierstrass_p(interval, wp_g2: float, wp_g3: float, *,
                  method: str = "DOP853", rtol: float = DEFAULT_RTOL,
                  atol: float = DEFAULT_ATOL) -> SpecFunSolution:
    """Elliptic-function solution of (y')^2 = 4y^3 - g2 y - g3 on x > 0.

    Hybrid representation: inside a seed radius the pole expansion at 0
    is the evaluator (its truncation error is below double precision
    there), and beyond it the second-order form y'' = 6y^2 - g2/2 is
    integrated from a series-generated seed.  Integrating the ODE through
    the steep near-pole layer instead would lose about five digits, since
    perturbations grow like (x/x_seed)^4.  The seed radius scales with
    the invariants so the expansion region stays well inside the nearest
    lattice point.  Raises PoleCollisionError if the solution blows up
    inside the requested interval.
    """
    a, b = float(interval[0]), float(interval[1])
    if a <= 0:
        raise ValueError("interval must lie on the positive axis")
    params = {"wp_g2": float(wp_g2), "wp_g3": float(wp_g3)}
    scale = max(abs(wp_g2) ** 0.25, abs(wp_g3) ** (1.0 / 6.0), 1.0)
    r_sw = 0.5 / scale
    branches = []
    poles: tuple[float, ...] = ()
    if a < r_sw:
        branches.append(_Branch(a, min(b, r_sw), _SeriesBranchSol(wp_g2, wp_g3)))
    if b > r_sw:
        v0, d0 = weierstrass_laurent(r_sw, wp_g2, wp_g3)
        ic = PainleveIC(r_sw, float(v0), float(d0))
        ode_sol = _build("weierstrass", params, (r_sw, b), ic, method, rtol, atol)
        poles = ode_sol.pole_markers
        if ode_sol.interval[1] < b:
            raise PoleCollisionError(
                f"pole detected near x = {poles[-1]:.6g} inside the "
                "requested interval",
                pole=poles[-1] if poles else None,
            )
        branches.extend(ode_sol._branches)
    sol = SpecFunSolution(
        kind="weierstrass", parameters=params, interval=(a, b),
        pole_markers=poles, _branches=tuple(branches),
    )
    return _validate(sol)


def painleve1(interval, ic: PainleveIC, *, method: str = "DOP853",
              rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> SpecFunSolution:
    """First-transcendent solution of y'' = 6y^2 + x from given data."""
    return _build("p1", {}, interval, ic, method, rtol, atol)


def painleve2(interval, alpha: float, ic: PainleveIC, *, method: str = "DOP853",
              rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> SpecFunSolution:
    """Second-transcendent solution of y'' = 2y^3 + xy + alpha."""
    return _build("p2", {"alpha": float(alpha)}, interval, ic, method, rtol, atol)


def painleve4(interval, alpha: float, K1: float, K2: float,
              ic: PainleveIC | None = None, *, method: str = "DOP853",
              rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> SpecFunSolution:
    """Solution of the fourth-Painleve-type equation used by the catalog.

    With K2 = 0 and zero initial data (or ``ic=None``) the identically
    zero branch is returned exactly, without integration; otherwise the
    initial value must satisfy y0 != 0 and the trajectory must not cross
    y = 0 (the equation is singular there).
    """
    params = {"alpha": float(alpha), "K1": float(K1), "K2": float(K2)}
    a, b = float(interval[0]), float(interval[1])
    zero_requested = ic is None or (ic.y0 == 0.0 and ic.yp0 == 0.0)
    if zero_requested:
        if K2 != 0.0:
            raise ValueError("zero initial data requires K2 = 0 (K2/y term)")
        return SpecFunSolution(
            kind="p4", parameters=params, interval=(a, b), _zero=True
        )
    if ic.y0 == 0.0:
        raise ValueError("y0 must be nonzero for a nontrivial branch")
    return _build("p4", params, interval, ic, method, rtol, atol,
                  guard_zero=True)


def first_integral_residual(sol: SpecFunSolution, n: int = 100) -> float:
    """Normalized drift of (y')^2 - (4y^3 - g2 y - g3) for elliptic solutions."""
    if sol.kind != "weierstrass":
        raise ValueError("first-integral monitor applies to elliptic solutions")
    lo, hi = sol.interval
    xs = np.linspace(lo, hi, n)
    v, d1 = sol.eval(xs)
    g2, g3 = sol.parameters["wp_g2"], sol.parameters["wp_g3"]
    fi = d1**2 - (4 * v**3 - g2 * v - g3)
    return float(np.max(np.abs(fi) / (1.0 + np.abs(4 * v**3))))
