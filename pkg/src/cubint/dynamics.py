"""Trajectory integration and conservation monitoring.

Hamilton's equations for H = (px^2 + py^2)/2 + V1(x) + V2(y) are
integrated with an adaptive high-order scheme (the primary path for all
conservation criteria) and, as a cross-check on solver artifacts, a
fixed-step second-order symplectic scheme whose energy error stays
bounded instead of drifting secularly.  Integration halts with an event
when the state approaches a declared singular line or leaves the
potential's construction domain; the partial trajectory is returned with
the event recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import SingularPointError, StepFailureError
from .phasecore import (
    PhaseState,
    SeparablePotential,
    ThirdOrderIntegral,
)

__all__ = [
    "Trajectory",
    "DriftReport",
    "integrate",
    "leapfrog",
    "conservation_report",
    "hamiltonian",
]

SINGULARITY_MARGIN = 1e-3
DRIFT_FLOOR = 1e-12


def hamiltonian(potential: SeparablePotential, states: np.ndarray) -> np.ndarray:
    """H at an (n, 4) array of phase states."""
    states = np.atleast_2d(states)
    v = (potential.v1.derivs(states[:, 0], order=0)[0]
         + potential.v2.derivs(states[:, 1], order=0)[0])
    return 0.5 * (states[:, 2] ** 2 + states[:, 3] ** 2) + v


@dataclass(frozen=True)
class Trajectory:
    """Accepted integration steps with the solver tolerance and events."""

    t: np.ndarray
    states: np.ndarray               # (n, 4): x, y, px, py
    tol: float
    events: tuple[dict, ...] = ()

    def __post_init__(self):
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("time samples must increase strictly")

    def final_state(self) -> PhaseState:
        return PhaseState(*self.states[-1])


@dataclass(frozen=True)
class DriftReport:
    """Initial value, maximum deviation and relative drift per quantity."""

    quantities: dict[str, dict]

    def max_relative_drift(self) -> float:
        return max(q["rel_drift"] for q in self.quantities.values())

    def to_json_dict(self) -> dict:
        return {"quantities": self.quantities,
                "max_relative_drift": self.max_relative_drift()}


def _barrier_events(potential: SeparablePotential, margin: float):
    events = []
    for s in potential.v1.singularities:
        def ev(t, y, s=s):
            return abs(y[0] - s) - margin
        ev.terminal = True
        ev.direction = -1
        events.append(("x-singularity", s, ev))
    for s in potential.v2.singularities:
        def ev(t, y, s=s):
            return abs(y[1] - s) - margin
        ev.terminal = True
        ev.direction = -1
        events.append(("y-singularity", s, ev))
    for axis, dom in (("x", potential.v1.domain), ("y", potential.v2.domain)):
        if dom is None:
            continue
        lo, hi = dom
        idx = 0 if axis == "x" else 1
        def ev_edge(t, y, lo=lo, hi=hi, idx=idx):
            return min(y[idx] - lo, hi - y[idx]) - margin
        ev_edge.terminal = True
        ev_edge.direction = -1
        events.append((f"{axis}-domain-edge", dom, ev_edge))
    return events


def integrate(potential: SeparablePotential, state0: PhaseState, t_end: float,
              tol: float = 1e-12, *, method: str = "DOP853",
              margin: float = SINGULARITY_MARGIN) -> Trajectory:
    """Adaptive integration of Hamilton's equations up to t_end.

    Requires a classical potential (hbar plays no role in the flow but a
    nonzero value signals a quantum entry, which has no classical
    trajectory semantics here).
    """
    if potential.hbar != 0.0:
        raise ValueError("trajectories are classical; instantiate with hbar = 0")
    if potential.v1.min_singular_distance(state0.x) <= margin or \
       potential.v2.min_singular_distance(state0.y) <= margin:
        raise SingularPointError("initial state violates the singularity margin")

    d1x = potential.v1.d1
    d1y = potential.v2.d1

    def rhs(t, s):
        return (s[2], s[3], -d1x(s[0]), -d1y(s[1]))

    events = _barrier_events(potential, margin)
    res = solve_ivp(rhs, (0.0, float(t_end)), state0.as_array(),
                    method=method, rtol=tol, atol=tol,
                    events=[e[2] for e in events], dense_output=False)
    if res.status == -1:
        raise StepFailureError(res.message)
    ev_log = []
    if res.status == 1:
        for (name, where, _), hits in zip(events, res.t_events):
            if hits.size:
                ev_log.append({"kind": name, "at": float(hits[0]),
                               "detail": where})
    return Trajectory(t=res.t, states=res.y.T, tol=tol, events=tuple(ev_log))


def leapfrog(potential: SeparablePotential, state0: PhaseState, t_end: float,
             dt: float = 1e-3) -> Trajectory:
    """Fixed-step kick-drift-kick integration (symplectic, second order).

    Long-time sanity companion to :func:`integrate`: its energy error is
    bounded, so secular drift seen with it indicates a physics bug rather
    than solver artifact.
    """
    if potential.hbar != 0.0:
        raise ValueError("trajectories are classical; instantiate with hbar = 0")
    n = int(math.ceil(t_end / dt))
    ts = np.empty(n + 1)
    out = np.empty((n + 1, 4))
    x, y, px, py = state0.x, state0.y, state0.px, state0.py
    ts[0] = 0.0
    out[0] = (x, y, px, py)
    d1x = potential.v1.d1
    d1y = potential.v2.d1
    ax = -d1x(x)
    ay = -d1y(y)
    for k in range(1, n + 1):
        px += 0.5 * dt * ax
        py += 0.5 * dt * ay
        x += dt * px
        y += dt * py
        ax = -d1x(x)
        ay = -d1y(y)
        px += 0.5 * dt * ax
        py += 0.5 * dt * ay
        ts[k] = k * dt
        out[k] = (x, y, px, py)
    return Trajectory(t=ts, states=out, tol=dt**2)


def conservation_report(traj: Trajectory, potential: SeparablePotential,
                        integrals: list[ThirdOrderIntegral],
                        margin: float = SINGULARITY_MARGIN) -> DriftReport:
    """Drift of H and of each invariant along the trajectory samples."""
    states = traj.states
    for X in integrals:
        for line in X.singularities:
            if np.min(line.distance(states[:, 0], states[:, 1])) <= margin:
                raise SingularPointError(
                    f"trajectory sample within margin of {line.axis} = "
                    f"{line.position}")

    quantities = {"H": hamiltonian(potential, states)}
    x, y, px, py = states.T
    L = x * py - y * px
    for k, X in enumerate(integrals, start=1):
        total = np.zeros(len(states))
        for i, j, m, coeff in X.coeffs.monomials():
            total += coeff * L**i * px**j * py**m
        g = X.corrections
        total += np.asarray(g.g1(x, y), dtype=float) * px
        total += np.asarray(g.g2(x, y), dtype=float) * py
        quantities[f"X{k}"] = 2.0 * total

    drift = {}
    for name, vals in quantities.items():
        v0 = float(vals[0])
        dev = float(np.max(np.abs(vals - v0)))
        drift[name] = {
            "initial": v0,
            "max_dev": dev,
            "rel_drift": dev / max(abs(v0), DRIFT_FLOOR),
        }
    return DriftReport(quantities=drift)
