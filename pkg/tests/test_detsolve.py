import numpy as np
import pytest

from cubint import catalog, detsolve
from cubint.detsolve import GridSpec
from cubint.errors import ConfigMismatchError, GridSingularityError
from cubint.phasecore import (
    CoeffTensor,
    SeparablePotential,
    ThirdOrderIntegral,
)

from conftest import poly_potential


def _grid(x0=0.3, x1=2.3, y0=0.3, y1=2.3, n=21, margin=0.25):
    return GridSpec((x0, x1), (y0, y1), n, n, margin)


def _single_node(x, y):
    return GridSpec((x, x), (y, y), 1, 1, margin=0.25)


# ---------------------------------------------------------------------------
# determining residuals


def test_q14_invariants_vanish():
    pot, ints = catalog.instantiate("Q.14")
    for X in ints:
        rep = detsolve.residual_determining(pot, X, _grid(), tolerance=1e-12)
        assert rep.status == "pass"


def test_zero_potential_zero_residuals():
    pot = SeparablePotential(v1=poly_potential("0*x"), v2=poly_potential("0*x"))
    X = ThirdOrderIntegral(coeffs=CoeffTensor(A030=0.5), label="momenta only")
    rep = detsolve.residual_determining(pot, X, _grid(), tolerance=1e-15)
    assert rep.worst() == 0.0


def test_mismatched_pair_fails_at_eq9():
    # V = x^4 + y^2 against the Q.14 third invariant; the raw eq9 defect at
    # the node (1, 1) was fixed by direct substitution:
    #   (g2)_y = a/2 = 1/2;  f3 V1' = (1/2)(4 x^3) = 2  ->  raw -3/2
    #   local scale = 1 + max(|1/2|, |2|, 0) = 3  ->  normalized 1/2
    pot = SeparablePotential(v1=poly_potential("x**4"),
                             v2=poly_potential("x**2"), hbar=1.0)
    _, ints = catalog.instantiate("Q.14")
    X3 = ints[2]
    rep = detsolve.residual_determining(pot, X3, _single_node(1.0, 1.0))
    assert rep.status == "fail"
    assert rep.residuals["eq9"].max_abs == pytest.approx(0.5, rel=1e-12)


def test_full_catalog_linear_compat_implied():
    # any pair passing the gradient conditions also satisfies the linear
    # third-order condition on the potential
    for eid in catalog.entry_ids():
        pot, ints = catalog.instantiate(eid)
        grid = catalog.default_grid(eid, nx=15, ny=15)
        tol = catalog.residual_tolerance(eid)
        for X in ints:
            rep = detsolve.residual_linear_compat(pot, X.coeffs, grid,
                                                  tolerance=max(tol, 1e-8))
            assert rep.status == "pass", (eid, X.label, rep.worst())


def test_linear_compat_rotational_case():
    pot, _ = catalog.instantiate("C.1", {"a": 1.7})
    rep = detsolve.residual_linear_compat(pot, CoeffTensor(A300=1.0), _grid(),
                                          tolerance=1e-13)
    assert rep.status == "pass"


def test_linear_compat_zero_operator():
    pot = SeparablePotential(v1=poly_potential("x**4 + 1/x"),
                             v2=poly_potential("x**2"))
    rep = detsolve.residual_linear_compat(pot, CoeffTensor(), _grid(),
                                          tolerance=1e-15)
    assert rep.worst() == 0.0


def test_linear_compat_mismatch_magnitude():
    # direct substitution at (1, 1) for V = x^4 + y^2 with the pure
    # angular-momentum pattern: terms 72, 0, 288, -48, 144, -72; the
    # normalized defect is 384 / (1 + 288)
    pot = SeparablePotential(v1=poly_potential("x**4"),
                             v2=poly_potential("x**2"))
    rep = detsolve.residual_linear_compat(pot, CoeffTensor(A300=1.0),
                                          _single_node(1.0, 1.0))
    assert rep.worst() == pytest.approx(384.0 / 289.0, rel=1e-13)


def test_grid_margin_enforced():
    pot, ints = catalog.instantiate("Q.14")   # singular line y = 0
    bad = GridSpec((0.3, 2.3), (0.1, 2.3), 11, 11, margin=0.3)
    with pytest.raises(GridSingularityError):
        detsolve.residual_determining(pot, ints[0], bad)


# ---------------------------------------------------------------------------
# the linear third-order ODE in one variable


def test_ode_residual_inverse_square_annihilated():
    rep = detsolve.ode_residual_v1(poly_potential("1/x**2", (0.0,)),
                                   1.0, 0.0, 0.0, 0.0, 0.0,
                                   np.linspace(0.5, 2.0, 40))
    assert rep.worst() < 1e-13


def test_ode_residual_linear_profile():
    rep = detsolve.ode_residual_v1(poly_potential("3*x"),
                                   0.0, 0.7, 0.2, 0.0, 0.0,
                                   np.linspace(0.5, 2.0, 40))
    assert rep.worst() < 1e-14


def test_ode_residual_quartic_profile():
    rep = detsolve.ode_residual_v1(poly_potential("x**4"),
                                   0.0, 0.0, 1.0, 24.0, 0.0,
                                   np.linspace(0.5, 2.0, 40))
    assert rep.worst() < 1e-13


def test_mirror_symmetry_of_the_two_sides():
    # the y-side condition equals the x-side one after the documented
    # substitution; check on three catalog profiles
    grid = np.linspace(0.5, 2.0, 25)
    for expr, sing in (("1/x**2", (0.0,)), ("x**4 + x", ()), ("2*x**3", ())):
        pot = poly_potential(expr, sing)
        A201, A111, A021 = 0.8, -0.3, 0.1
        r_v2 = detsolve.ode_residual_v2(pot, A201, A111, A021, 1.0, 2.0, grid)
        r_v1 = detsolve.ode_residual_v1(pot, A201, -A111, A021, 1.0, 2.0, grid)
        assert r_v2.residuals["eq11"].max_abs == pytest.approx(
            r_v1.residuals["eq11"].max_abs, rel=1e-14, abs=1e-15)


# ---------------------------------------------------------------------------
# homogeneous families


def test_family_two_center_profile():
    res = detsolve.fit_homogeneous_family(
        "A.1", {"c1": 1.0, "alpha": 1.0}, (1.0, 0.0, -1.0),
        np.linspace(1.5, 3.0, 60))
    assert res.post_fit_residual < 1e-10


def test_family_linear_profile_trivial():
    res = detsolve.fit_homogeneous_family(
        "A.7", {"c1": 1.0}, (0.0, 0.0, 1.0), np.linspace(0.5, 2.0, 40))
    assert res.post_fit_residual < 1e-14
    assert res.rhs_a == pytest.approx(0.0, abs=1e-12)
    assert res.rhs_b == pytest.approx(0.0, abs=1e-12)


def test_family_quartic_fits_linear_rhs():
    res = detsolve.fit_homogeneous_family(
        "A.4", {"c1": 2.0}, (0.0, 0.0, 0.5), np.linspace(0.5, 2.0, 40))
    assert res.rhs_a == pytest.approx(24.0 * 0.5 * 2.0, rel=1e-12)
    assert res.post_fit_residual < 1e-12


def test_family_all_profiles_are_genuine_solutions():
    grids = np.linspace(1.6, 3.0, 50)
    cases = [
        ("A.1", {"c1": 0.4, "c2": -0.2, "c3": 0.3, "c4": 0.1, "alpha": 1.0},
         (0.7, 0.0, -0.7)),
        ("A.2", {"c1": 0.4, "c2": -0.2, "c3": 0.3, "c4": 0.1}, (0.7, 0.0, 0.0)),
        ("A.3", {"c1": 0.4, "c2": -0.2, "c3": 0.3, "c4": 0.1}, (0.0, 0.9, 0.0)),
        ("A.4", {"c1": 0.4, "c2": -0.2, "c3": 0.3}, (0.0, 0.0, 0.9)),
        ("A.5", {"c1": 0.4, "c2": -0.2}, (0.0, 0.9, 0.0)),
        ("A.6", {"c1": 0.4}, (0.7, 0.0, -0.7)),
        ("A.7", {"c1": 0.4}, (0.7, 0.3, 0.1)),
    ]
    for fam, params, cfg in cases:
        res = detsolve.fit_homogeneous_family(fam, params, cfg, grids)
        assert res.post_fit_residual < 1e-9, fam


def test_family_config_mismatch():
    with pytest.raises(ConfigMismatchError):
        detsolve.fit_homogeneous_family("A.4", {"c1": 1.0}, (1.0, 0.0, 0.0),
                                        np.linspace(0.5, 2.0, 20))
    with pytest.raises(ConfigMismatchError):
        detsolve.fit_homogeneous_family("A.1", {"c1": 1.0, "alpha": 1.0},
                                        (1.0, 0.0, 0.5),
                                        np.linspace(1.5, 2.5, 20))


# ---------------------------------------------------------------------------
# quadrature reconstruction


def test_quadrature_reconstructs_c3_fields():
    pot, ints = catalog.instantiate("C.3")
    X = ints[0]
    grid = _grid(n=41)
    res = detsolve.solve_g_quadrature(pot, X.coeffs, (1.0, 1.0), grid)
    assert res.feasible
    assert res.report.residuals["eq7"].max_abs < 1e-8
    # unique reconstruction: matches the stored fields pointwise
    xs = np.linspace(0.5, 2.0, 7)
    ys = np.linspace(0.5, 2.0, 7)
    for x in xs:
        for y in ys:
            assert float(res.fields.g1(x, y)) == pytest.approx(
                float(X.corrections.g1(x, y)), abs=5e-7)
            assert float(res.fields.g2(x, y)) == pytest.approx(
                float(X.corrections.g2(x, y)), abs=5e-7)


def test_quadrature_zero_case():
    pot = SeparablePotential(v1=poly_potential("0*x"), v2=poly_potential("0*x"))
    res = detsolve.solve_g_quadrature(pot, CoeffTensor(A012=1.0), (1.0, 1.0),
                                      _grid(n=21))
    assert res.feasible
    assert abs(float(res.fields.g1(1.5, 1.5))) < 1e-12
    assert abs(float(res.fields.g2(1.5, 1.5))) < 1e-12


def test_quadrature_reports_infeasibility():
    pot = SeparablePotential(v1=poly_potential("x**4"),
                             v2=poly_potential("x**2"))
    res = detsolve.solve_g_quadrature(pot, CoeffTensor(A012=1.0), (1.0, 1.0),
                                      _grid(n=31))
    assert not res.feasible
    # the mismatch shows up in the zeroth-order condition (and the mixed
    # condition's separability defect is also reported)
    assert res.violating == "eq7"
    assert res.report.residuals["eq10"].max_abs > 0.01


def test_quadrature_residuals_match_stored_for_catalog_pairs():
    for eid in ("Q.14", "C.2", "Q.9"):
        pot, ints = catalog.instantiate(eid)
        X = ints[0]
        grid = _grid(n=41)
        res = detsolve.solve_g_quadrature(pot, X.coeffs, (1.0, 1.0), grid)
        stored = detsolve.residual_determining(pot, X, grid, tolerance=1e-8)
        assert res.feasible, (eid, res.report.to_json_dict())
        assert res.report.residuals["eq7"].max_abs <= \
            stored.residuals["eq7"].max_abs + 1e-8


# ---------------------------------------------------------------------------
# commutator oracle contract


def test_oracle_rejects_classical_request():
    pot, ints = catalog.instantiate("C.3")
    grid = _grid(n=33)
    with pytest.raises(ValueError):
        detsolve.commutator_oracle(pot, ints[0], lambda x, y: np.exp(-x), grid)


def test_oracle_rejects_angular_momentum_terms():
    pot, ints = catalog.instantiate("Q.14")
    X1 = ints[0]  # carries an L-type coefficient
    grid = _grid(n=33)
    with pytest.raises(ValueError):
        detsolve.commutator_oracle(pot, X1, lambda x, y: np.exp(-x), grid)
