import numpy as np
import pytest

from cubint import catalog
from cubint.errors import (
    NoLimitDeclaredError,
    SchemaViolationError,
    UnknownEntryError,
)

# entries expressible as hbar^2 times an hbar-free potential; for those
# with a free energy-scale parameter the rescaling a -> hbar^2 a realizes it
PURE_HBAR_SQUARED = [
    ("Q.3", lambda h: {"hbar": h, "a": h**2}),
    ("Q.5", lambda h: {"hbar": h}),
    ("Q.6", lambda h: {"hbar": h}),
    ("Q.7", lambda h: {"hbar": h}),
    ("Q.11", lambda h: {"hbar": h}),
    ("Q.13", lambda h: {"hbar": h}),
    ("Q.16", lambda h: {"hbar": h}),
]


def test_entry_count_and_split():
    infos = catalog.list_entries()
    assert len(infos) == 29
    assert sum(1 for i in infos if i.id.startswith("Q.")) == 21
    assert sum(1 for i in infos if i.id.startswith("C.")) == 8


@pytest.mark.parametrize("eid,count", [
    ("Q.1", 4), ("Q.13", 6), ("Q.18", 1), ("C.1", 4), ("Q.14", 3),
    ("Q.12", 3), ("Q.16", 2), ("C.3", 1),
])
def test_integral_counts(eid, count):
    info = catalog.list_entries(eid)
    assert len(info) == 1 and info[0].integral_count == count


def test_filter_semantics():
    assert len(catalog.list_entries("Q.1")) == 1          # exact id wins
    assert len(catalog.list_entries("NOPE")) == 0
    assert {i.id for i in catalog.list_entries("Va")} == {"Q.1", "C.1"}


def test_unknown_entry():
    with pytest.raises(UnknownEntryError):
        catalog.get_entry("Q.99")


# ---------------------------------------------------------------------------
# canonical content


def test_q2_canonical_halving():
    pot, ints = catalog.instantiate("Q.2", {"a": 1.0, "b": 2.0, "c": 3.0})
    X = ints[0]
    assert X.coeffs.A111 == 0.5
    # canonical fields are half the published brackets
    x, y = 1.3, 0.8
    a, b, c = 1.0, 2.0, 3.0
    g1_expected = -(x * y * (-2 * c / y**3 + 2 * a * y)) / 2
    g2_expected = (x * y * (-2 * b / x**3 + 2 * a * x)) / 2
    assert float(X.corrections.g1(x, y)) == pytest.approx(g1_expected, rel=1e-14)
    assert float(X.corrections.g2(x, y)) == pytest.approx(g2_expected, rel=1e-14)


def test_q14_third_invariant_fields():
    pot, ints = catalog.instantiate("Q.14", {"a": 2.0, "hbar": 1.0})
    X3 = ints[2]
    assert X3.coeffs.A012 == 0.5
    assert float(X3.corrections.g1(0.4, 2.0)) == pytest.approx(1.0 / 4.0)
    assert float(X3.corrections.g2(0.4, 2.0)) == pytest.approx(2.0 * 2.0 / 2.0)


def test_q18_zero_branch_is_shifted_oscillator():
    a, hbar, K1 = 1.0, 1.0, 0.4
    pot, _ = catalog.instantiate("Q.18", {"K2": 0.0, "K1": K1})
    b1 = np.sqrt(8.0 * a)
    const = (-(hbar**2) * K1 + hbar * b1) / 6.0
    xs = np.linspace(0.3, 2.3, 7)
    ys = np.linspace(0.3, 2.3, 7)
    for x in xs:
        for y in ys:
            expected = a * (x**2 + y**2) + const
            assert pot.value(x, y) == pytest.approx(expected, abs=1e-12)


def test_q15_free_profile_is_callers_choice():
    from conftest import poly_potential

    vx = poly_potential("sin(x)")
    pot, ints = catalog.instantiate("Q.15", vx=vx)
    assert pot.v1.label == "sin(x)"
    # the y-only invariant is untouched by the x-profile
    assert ints[0].coeffs.A003 == 0.5


def test_table_labels_match_coefficient_patterns():
    for eid in catalog.entry_ids():
        _, ints = catalog.instantiate(eid)
        spec = catalog.get_entry(eid)
        for X, label in zip(ints, spec.integral_labels):
            pattern = catalog.LABEL_PATTERNS[label]
            nonzero = {k for k, v in X.coeffs.as_dict().items() if v != 0.0}
            assert nonzero == set(pattern), (eid, label)


@pytest.mark.parametrize("eid,mapper", PURE_HBAR_SQUARED)
def test_pure_hbar_squared_scaling(eid, mapper):
    hbar = 0.7
    pot1, _ = catalog.instantiate(eid, mapper(1.0))
    pot2, _ = catalog.instantiate(eid, mapper(hbar))
    spec = catalog.get_entry(eid)
    xs = np.linspace(*spec.x_range, 5)
    ys = np.linspace(*spec.y_range, 5)
    for x in xs:
        for y in ys:
            v1 = pot1.value(x, y)
            v2 = pot2.value(x, y)
            assert v2 == pytest.approx(hbar**2 * v1, rel=5e-14, abs=1e-14), \
                (eid, x, y)


def test_q12_scaling_with_matched_barrier():
    hbar = 0.7
    pot1, _ = catalog.instantiate("Q.12", {"hbar": 1.0, "a": 1.0})
    pot2, _ = catalog.instantiate("Q.12", {"hbar": hbar, "a": hbar**2})
    for x, y in ((0.5, 0.9), (1.4, 2.1)):
        assert pot2.value(x, y) == pytest.approx(hbar**2 * pot1.value(x, y),
                                                 rel=1e-14)


# ---------------------------------------------------------------------------
# classical limits


def test_limit_oscillator_family():
    target, mapped = catalog.classical_limit("Q.3", {"a": 2.5})
    assert target == "C.1" and mapped["a"] == 2.5


def test_limit_two_center_scaled_and_fixed():
    params = {"alpha": 2.0, "hbar": 1.0}
    target, mapped = catalog.classical_limit("Q.5", params,
                                             variant="alpha_scaled")
    assert target == "C.1"
    assert mapped["a"] == pytest.approx(1.0 / (8 * 2.0**4))
    target2, mapped2 = catalog.classical_limit("Q.5", params,
                                               variant="alpha_fixed")
    assert target2 == catalog.FREE_MOTION and dict(mapped2) == {}


def test_limit_case_ii_families():
    target, mapped = catalog.classical_limit("Q.20")
    assert target == "C.8" and mapped["d"] == 0.0
    target, mapped = catalog.classical_limit("Q.21", {"kappa": 1.0})
    assert target == "C.8"
    assert mapped["d"] == pytest.approx(1.0 * 1.0 * (1.5) ** 2 / 2.0)


def test_limit_undeclared():
    with pytest.raises(NoLimitDeclaredError):
        catalog.classical_limit("Q.14")
    with pytest.raises(NoLimitDeclaredError):
        catalog.classical_limit("Q.5", variant="nonsense")


# ---------------------------------------------------------------------------
# schemas


def test_schema_rejects_bad_values():
    with pytest.raises(SchemaViolationError):
        catalog.instantiate("Q.5", {"alpha": 0.0})
    with pytest.raises(SchemaViolationError):
        catalog.instantiate("Q.3", {"hbar": 0.0})
    with pytest.raises(SchemaViolationError):
        catalog.instantiate("Q.1", {"zzz": 1.0})
    with pytest.raises(SchemaViolationError):
        catalog.instantiate("Q.20", {"b": -1.0})


def test_reference_document_covers_catalog():
    doc = catalog.reference_document()
    for eid in catalog.entry_ids():
        assert f"## {eid}" in doc
    assert "canonical initial data" in doc
    assert "y-gradient condition" in doc   # adjudication note present
