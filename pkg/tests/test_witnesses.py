"""Witness constructors: normalizations, caps, anchor inequalities."""

import numpy as np
import pytest

import summlab as sl
from summlab.errors import BudgetError, DomainError, StructuralError
from summlab.maps import _poly_outputs
from summlab.spaces import coord_norm


def test_coefficient_rules():
    c = sl.witnesses.equal_coefficients_sum_rp(4, 0.5, 2.0)
    np.testing.assert_allclose(c.a, 4 ** (-0.25))
    assert abs((c.a ** (2.0 / 0.5)).sum() - 1.0) <= 1e-12

    c = sl.witnesses.equal_coefficients_sum_inv_p(3, 0.5)
    np.testing.assert_allclose(c.a, 3 ** (-0.5))
    assert abs((c.a ** (1.0 / 0.5)).sum() - 1.0) <= 1e-12

    with pytest.raises(StructuralError):
        sl.WitnessCoefficients(np.array([0.5, 0.5]), sl.CoefficientRule.SUM_INV_P, 0.5)


def test_tensor_witness_quotients():
    # m=2, n=3 basis families at p=q=2: numerator n^(m/2), denominators 1
    t = sl.tensor_witness(2, 3)
    fams = [sl.VectorFamily.basis(sl.lp(2, 3), 3)] * 2
    assert sl.mixed_power_sum(t, fams, 2.0) == pytest.approx(3.0, rel=1e-12)

    t = sl.tensor_witness(1, 5)
    assert sl.mixed_power_sum(t, [sl.VectorFamily.basis(sl.lp(2, 5), 5)], 2.0) == pytest.approx(
        np.sqrt(5), rel=1e-12
    )

    sample = sl.summing_quotient(sl.tensor_witness(2, 2), [sl.VectorFamily.basis(sl.lp(2, 2), 2)] * 2, 2, 2)
    assert sample.quotient == pytest.approx(2.0, rel=1e-12)

    with pytest.raises(BudgetError):
        sl.tensor_witness(3, 10, tuple_budget=100)


def test_cotype_witness_construction():
    poly, anchors = sl.cotype_witness(2, 0.5, sl.lp(2, 4), 2.0, 4)
    np.testing.assert_allclose(poly.body.a, 4 ** (-0.25), rtol=1e-15)
    assert poly.codomain == sl.lp(2, 4)
    # anchors are the basis, functionals norm them
    np.testing.assert_array_equal(anchors.matrix, np.eye(4))
    np.testing.assert_allclose(poly.body.functionals @ anchors.matrix.T, np.eye(4), atol=1e-12)

    with pytest.raises(DomainError):
        sl.cotype_witness(2, 2.5, sl.lp(2, 4), 2.0, 4)  # needs p < r
    with pytest.raises(DomainError):
        sl.cotype_witness(2, 0.5, sl.lp(2, 4), 1.5, 4)  # target cotype below 2
    with pytest.raises(StructuralError):
        sl.cotype_witness(2, 0.5, sl.lp(2, 3), 2.0, 4)  # basis anchors need dim >= n


def test_cotype_witness_norm_cap_and_anchor_floor(rng):
    for _ in range(8):
        n = int(rng.integers(2, 7))
        m = int(rng.choice([1, 2, 3]))
        r = float(rng.choice([2.0, 2.5, 3.0]))
        p = float(rng.uniform(0.2, min(1.5, r - 0.1)))
        rows = rng.standard_normal((n, n + 1))
        rows /= np.atleast_1d(coord_norm(sl.lp(2, n + 1), rows, axis=1))[:, None]
        anchors_in = sl.VectorFamily(sl.lp(2, n + 1), rows)
        poly, anchors = sl.cotype_witness(m, p, sl.lp(2, n + 1), r, n, anchors=anchors_in)
        assert sl.operator_norm(poly).value <= 1 + 1e-9
        outs = np.atleast_1d(coord_norm(poly.codomain, _poly_outputs(poly, anchors.matrix), axis=-1))
        floors = poly.body.weights * anchors.norms() ** m
        assert np.all(outs >= floors - 1e-10)


def test_real_even_witness_construction():
    poly, anchors = sl.real_even_witness(2, 0.5, sl.lp(2, 3), 3)
    np.testing.assert_allclose(poly.body.a, 3 ** (-0.5), rtol=1e-15)
    assert abs((poly.body.a ** 2.0).sum() - 1.0) <= 1e-12
    assert poly.codomain.dimension == 1

    with pytest.raises(DomainError):
        sl.real_even_witness(3, 0.5, sl.lp(2, 3), 3)  # odd degree
    with pytest.raises(DomainError):
        sl.real_even_witness(2, 1.0, sl.lp(2, 3), 3)  # needs p < 1


def test_real_even_witness_cap_and_floor(rng):
    for _ in range(8):
        n = int(rng.integers(2, 7))
        m = int(rng.choice([2, 4]))
        p = float(rng.uniform(0.15, 0.9))
        poly, anchors = sl.real_even_witness(m, p, sl.lp(2, n), n)
        assert sl.operator_norm(poly).value <= 1 + 1e-9
        outs = _poly_outputs(poly, anchors.matrix)[:, 0]
        floors = poly.body.weights * anchors.norms() ** m
        assert np.all(outs >= floors - 1e-10)


def test_identity_witness_quotients():
    # basis family at p=q=2 gives sqrt(d)
    ident = sl.identity_witness(sl.lp(2, 4))
    sample = sl.summing_quotient(ident, [sl.VectorFamily.basis(sl.lp(2, 4), 4)], 2, 2)
    assert sample.quotient == pytest.approx(2.0, rel=1e-12)

    # p = q > 2: numerator n^(1/p), searched weak norm must find 1
    for p in (3.0, 4.0):
        n = 5
        ident = sl.identity_witness(sl.lp(2, n))
        sample = sl.summing_quotient(ident, [sl.VectorFamily.basis(sl.lp(2, n), n)], p, p)
        assert sample.quotient == pytest.approx(n ** (1 / p), rel=1e-9)
        assert sample.family_descriptor.conservative  # searched denominator

    one = sl.identity_witness(sl.lp(2, 1))
    sample = sl.summing_quotient(one, [sl.VectorFamily.basis(sl.lp(2, 1), 1)], 2, 2)
    assert sample.quotient == pytest.approx(1.0, rel=1e-12)


def test_diagonal_product_map_shape_check():
    with pytest.raises(StructuralError):
        sl.diagonal_product_map(2, 3, sl.lp(1, 4))


def test_witness_spec_roundtrip(rng):
    from summlab.witnesses import witness_from_spec, witness_to_spec

    t = sl.tensor_witness(2, 3)
    spec = witness_to_spec(t)
    assert spec == {"kind": "tensor", "m": 2, "n": 3}
    t2 = witness_from_spec(spec)
    assert t2.domain == t.domain and t2.codomain == t.codomain

    ident = sl.identity_witness(sl.lp(1, 4))
    spec = witness_to_spec(ident)
    assert spec["kind"] == "identity"
    assert witness_from_spec(spec).domain == ident.domain

    poly, anchors = sl.cotype_witness(2, 0.5, sl.lp(2, 4), 2.5, 4)
    spec = witness_to_spec(poly, anchors=None)
    assert spec["anchors"] == "basis" and spec["target_r"] == 2.5
    poly2, anchors2 = witness_from_spec(spec)
    np.testing.assert_array_equal(poly2.body.a, poly.body.a)
    np.testing.assert_array_equal(anchors2.matrix, anchors.matrix)

    rows = rng.standard_normal((3, 4))
    rows /= np.atleast_1d(coord_norm(sl.lp(2, 4), rows, axis=1))[:, None]
    custom = sl.VectorFamily(sl.lp(2, 4), rows)
    peven, _ = sl.real_even_witness(2, 0.4, sl.lp(2, 4), 3, anchors=custom)
    spec = witness_to_spec(peven, anchors=custom)
    poly3, anchors3 = witness_from_spec(spec)
    np.testing.assert_allclose(anchors3.matrix, custom.matrix)
    np.testing.assert_allclose(poly3.body.functionals, peven.body.functionals)
