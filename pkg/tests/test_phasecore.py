import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubint import catalog, dynamics
from cubint.errors import SingularPointError
from cubint.phasecore import (
    CoeffTensor,
    CorrectionFields,
    ParamSet,
    PhaseState,
    SeparablePotential,
    ThirdOrderIntegral,
    eval_f_polynomials,
    eval_integral_classical,
    poisson_bracket_residual,
)

from conftest import poly_potential


# ---------------------------------------------------------------------------
# structure polynomials


def test_f_polynomials_pure_l_cubed():
    c = CoeffTensor(A300=1.0)
    assert eval_f_polynomials(c, 1.0, 1.0) == (-1.0, 3.0, -3.0, 1.0)


def test_f_polynomials_mixed_term():
    c = CoeffTensor(A111=1.0)
    assert eval_f_polynomials(c, 2.0, 3.0) == (0.0, -3.0, 2.0, 0.0)


def test_f_polynomials_zero():
    c = CoeffTensor()
    assert eval_f_polynomials(c, 0.7, -1.3) == (0.0, 0.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# classical evaluation


def test_eval_pure_angular_momentum_cubed():
    X = ThirdOrderIntegral(coeffs=CoeffTensor(A300=0.5), label="L^3")
    val = eval_integral_classical(X, PhaseState(1.0, 0.0, 0.0, 1.0))
    assert val == pytest.approx(1.0, abs=0)


def test_eval_pure_correction_field():
    fields = CorrectionFields(
        g1=lambda x, y: np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, 0.5))
    X = ThirdOrderIntegral(coeffs=CoeffTensor(), corrections=fields, label="g")
    val = eval_integral_classical(X, PhaseState(0.0, 0.0, 3.0, 0.0))
    assert val == pytest.approx(3.0, abs=0)


def test_eval_c3_against_hand_expansion():
    # independent term-by-term arithmetic for the published C.3 invariant
    # at a = b = c = 1 and state (1, 1, 1, 1), at the canonical half scale:
    #   printed value = 2 px py^2 + 2(-2a y^2 + 2b/y^2) px + 2(8a x y + c y) py
    #                 = 2*1 + 2*(-2 + 2)*1 + 2*(8 + 1)*1 = 20
    # canonical scale = printed / 2 = 10
    x = y = px = py = 1.0
    printed = (2 * px * py**2
               + 2 * (-2 * y**2 + 2 / y**2) * px
               + 2 * (8 * x * y + 1 * y) * py)
    assert printed == 20.0
    _, ints = catalog.instantiate("C.3")
    val = eval_integral_classical(ints[0], PhaseState(x, y, px, py))
    assert val == pytest.approx(printed / 2.0, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(s=st.floats(min_value=-8, max_value=8,
                   allow_nan=False, allow_infinity=False),
       px=st.floats(min_value=-2, max_value=2, allow_nan=False),
       py=st.floats(min_value=-2, max_value=2, allow_nan=False))
def test_eval_scales_linearly_with_integral(s, px, py):
    # scaling every coefficient and both fields by s scales the value by s
    base = CoeffTensor(A300=0.25, A111=0.5, A012=-0.3)
    state = PhaseState(1.1, -0.7, px, py)
    X1 = ThirdOrderIntegral(coeffs=base, label="base")
    v1 = eval_integral_classical(X1, state)
    if s == 0.0:
        return
    X2 = ThirdOrderIntegral(coeffs=base.scaled(s), label="scaled")
    v2 = eval_integral_classical(X2, state)
    assert v2 == pytest.approx(s * v1, rel=1e-12, abs=1e-12)


# ---------------------------------------------------------------------------
# bracket residual


def test_bracket_vanishes_for_central_potential_l_cubed():
    pot, ints = catalog.instantiate("C.1")
    X = ints[0]  # pure angular-momentum invariant
    for state in (PhaseState(1.0, 0.3, -0.2, 0.8),
                  PhaseState(-0.5, 1.2, 0.4, 0.1)):
        assert abs(poisson_bracket_residual(X, pot, state)) < 1e-13


def test_bracket_vanishes_for_c3_listed_invariant():
    pot, ints = catalog.instantiate("C.3")
    val = poisson_bracket_residual(ints[0], pot, PhaseState(1.0, 1.0, 1.0, 1.0))
    assert abs(val) < 1e-12


def test_bracket_nonzero_for_mismatched_potential():
    # V = x^4 + y^2 against the C.3 invariant data (a = b = c = 1); the
    # chain-rule value at (1,1,1,1) was fixed by independent arithmetic:
    #   X = px py^2 + 2 g1 px + 2 g2 py, g1 = -y^2 + 1/y^2, g2 = 4xy + y/2
    #   X_x(1,1,1,1) = 8,  X_y = 1,  X_px = 1,  X_py = 11
    #   dX/dt = 8*1 + 1*1 - 1*4 - 11*2 = -17
    pot = SeparablePotential(v1=poly_potential("x**4"),
                             v2=poly_potential("x**2"))
    _, ints = catalog.instantiate("C.3")
    val = poisson_bracket_residual(ints[0], pot, PhaseState(1.0, 1.0, 1.0, 1.0))
    assert val == pytest.approx(-17.0, rel=1e-12)


def test_bracket_matches_time_derivative_along_flow():
    pot, ints = catalog.instantiate("C.2")
    X = ints[0]
    state = PhaseState(0.9, 1.1, 0.3, -0.4)
    pb = poisson_bracket_residual(X, pot, state)
    # numeric derivative of the invariant along an exactly integrated segment
    dt = 1e-3
    traj = dynamics.integrate(pot, state, 2 * dt, tol=1e-13)
    from scipy.interpolate import CubicSpline
    vals = [eval_integral_classical(X, PhaseState(*s)) for s in traj.states]
    spl = CubicSpline(traj.t, vals)
    assert spl(dt, 1) == pytest.approx(pb, abs=1e-7)


def test_bracket_rejects_singular_state():
    pot, ints = catalog.instantiate("C.2")
    with pytest.raises(SingularPointError):
        poisson_bracket_residual(ints[0], pot, PhaseState(1.0, 0.0, 0.1, 0.1))


# ---------------------------------------------------------------------------
# derivative stacks


@pytest.mark.parametrize("eid,pts", [
    ("C.2", (0.7, 1.4)),
    ("Q.5", (0.9, 1.9)),
    ("Q.18", (0.8, 1.7)),
    ("C.6", (0.6, 1.2)),
])
def test_stack_channels_agree_with_finite_differences(eid, pts):
    pot, _ = catalog.instantiate(eid)
    h = 1e-4
    for p in pts:
        stacks = {s: pot.v1.derivs(p + s * h, order=4) for s in (-1, 0, 1)}
        for n in range(1, 5):
            fd = (stacks[1][n - 1] - stacks[-1][n - 1]) / (2 * h)
            ref = stacks[0][n]
            assert abs(fd - ref) <= 1e-5 * (1.0 + abs(ref)), (eid, p, n)


def test_potential_evaluator_is_deterministic():
    pot, _ = catalog.instantiate("C.6")
    a = pot.v1.derivs(0.8371, order=4)
    b = pot.v1.derivs(0.8371, order=4)
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# validation


def test_param_set_rejects_unknown_and_nonfinite():
    with pytest.raises(ValueError):
        ParamSet({"nope": 1.0})
    with pytest.raises(ValueError):
        ParamSet({"a": float("nan")})
    with pytest.raises(ValueError):
        ParamSet({"hbar": -1.0})


def test_phase_state_requires_finite_components():
    with pytest.raises(ValueError):
        PhaseState(0.0, 0.0, float("inf"), 0.0)


def test_integral_requires_content():
    with pytest.raises(ValueError):
        ThirdOrderIntegral(coeffs=CoeffTensor(), label="empty")
