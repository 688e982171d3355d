"""Quotients, family search, regression, and the bound tables."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import summlab as sl
from summlab.errors import DegenerateInputError, DomainError, StructuralError, ValidityError
from summlab.index_lab import mult_upper_branch, pol_cotype_branch_value


def _basis(n):
    return sl.VectorFamily.basis(sl.lp(2, n), n)


# ---------------------------------------------------------------------------
# quotients
# ---------------------------------------------------------------------------


def test_summing_quotient_examples():
    q = sl.summing_quotient(sl.tensor_witness(2, 3), [_basis(3)] * 2, 2, 2)
    assert q.quotient == pytest.approx(3.0, rel=1e-12)
    assert not q.family_descriptor.conservative

    q = sl.summing_quotient(sl.identity_witness(sl.lp(2, 4)), [_basis(4)], 2, 2)
    assert q.quotient == pytest.approx(2.0, rel=1e-12)

    zero = sl.VectorFamily(sl.lp(2, 3), np.zeros((3, 3)))
    with pytest.raises(DegenerateInputError):
        sl.summing_quotient(sl.identity_witness(sl.lp(2, 3)), [zero], 2, 2)


def test_polynomial_quotient_matches_direct_evaluation():
    n, p = 4, 1 / 3
    poly, anchors = sl.real_even_witness(2, p, sl.lp(2, n), n)
    sample = sl.polynomial_quotient(poly, anchors, p, 2.0)
    # direct evaluation oracle: P(e_k) = a_k^(1/p); weak-2 norm of the basis is 1
    numerator = sum(float(v) ** p for v in poly.body.weights) ** (1 / p)
    assert numerator == pytest.approx(16.0, rel=1e-12)
    assert sample.quotient == pytest.approx(numerator, rel=1e-12)

    # m = 1 polynomial quotient coincides with the linear summing quotient
    ident = sl.identity_witness(sl.lp(2, 3))
    lin = sl.summing_quotient(ident, [_basis(3)], 2, 2)
    poly1 = sl.HomogeneousPolynomial(1, sl.lp(2, 3), sl.lp(2, 3), sl.DenseSymmetric(np.eye(3)))
    pol = sl.polynomial_quotient(poly1, _basis(3), 2, 2)
    assert pol.quotient == pytest.approx(lin.quotient, rel=1e-12)

    zero = sl.HomogeneousPolynomial(2, sl.lp(2, 3), sl.lp(2, 1), sl.DenseSymmetric(np.zeros((3, 3, 1))))
    assert sl.polynomial_quotient(zero, _basis(3), 2, 2).quotient == 0.0


def test_conservative_flag_propagates():
    # q != 2 on a Hilbert family forces the search path
    sample = sl.summing_quotient(sl.identity_witness(sl.lp(2, 3)), [_basis(3)], 3, 3)
    assert sample.family_descriptor.conservative
    assert sample.family_descriptor.weak_norm_exact == (False,)


def test_maximize_quotient_identity():
    for d in (1, 4, 9):
        best = sl.maximize_quotient(sl.identity_witness(sl.lp(2, d)), d, 2, 2, random_starts=2, sweeps=6)
        assert best.quotient == pytest.approx(math.sqrt(d), rel=1e-12)
        assert best.family_descriptor.strategy == "basis"


def test_maximize_quotient_tensor_witness_cap():
    n, m = 4, 2
    best, trace = sl.maximize_quotient(
        sl.tensor_witness(m, n), n, 2, 2, random_starts=3, sweeps=8, return_trace=True
    )
    cap = n ** (m / 2) * (1 + 1e-6)
    assert best.quotient >= n ** (m / 2) * (1 - 1e-12)
    assert all(s.quotient <= cap for s in trace)


def test_maximize_quotient_single_point():
    poly, anchors = sl.real_even_witness(2, 0.5, sl.lp(2, 2), 2)
    best = sl.maximize_quotient(poly, 1, 0.5, 2.0, anchor_families=anchors.permuted([0]), random_starts=1, sweeps=4)
    cap = sl.operator_norm(poly).value
    assert best.quotient <= cap + 1e-9


def test_maximize_quotient_deterministic():
    t = sl.tensor_witness(2, 3)
    a = sl.maximize_quotient(t, 3, 2, 2, random_starts=2, sweeps=5)
    b = sl.maximize_quotient(t, 3, 2, 2, random_starts=2, sweeps=5)
    assert a.quotient == b.quotient
    assert a.family_descriptor.strategy == b.family_descriptor.strategy


# ---------------------------------------------------------------------------
# regression
# ---------------------------------------------------------------------------


def _samples(pairs):
    return [sl.QuotientSample(n, v, sl.Provenance("synthetic", None, False, ())) for n, v in pairs]


def test_estimate_index_exact_power_law():
    est = sl.estimate_index(_samples([(2, 2.0), (4, 4.0), (8, 8.0)]))
    assert est.slope == pytest.approx(1.0, abs=1e-12)
    assert est.intercept == pytest.approx(0.0, abs=1e-12)
    assert est.residual <= 1e-12
    assert est.grid == (2, 4, 8)


def test_estimate_index_constant():
    est = sl.estimate_index(_samples([(2, 3.7), (4, 3.7), (8, 3.7), (16, 3.7)]))
    assert est.slope == pytest.approx(0.0, abs=1e-12)


def test_estimate_index_random_power_laws(rng):
    for _ in range(50):
        slope = float(rng.uniform(-2, 2))
        c = float(rng.uniform(0.1, 10))
        grid = [2, 4, 8, 16]
        est = sl.estimate_index(_samples([(n, c * n**slope) for n in grid]))
        assert est.slope == pytest.approx(slope, abs=1e-12)
        assert est.intercept == pytest.approx(math.log(c), abs=1e-12)
        assert est.residual <= 1e-12


def test_estimate_index_errors():
    with pytest.raises(StructuralError):
        sl.estimate_index(_samples([(2, 1.0), (4, 2.0)]))
    with pytest.raises(StructuralError):
        sl.estimate_index(_samples([(2, 1.0), (2, 2.0), (2, 3.0)]))
    with pytest.raises(DomainError):
        sl.estimate_index(_samples([(2, 1.0), (4, 0.0), (8, 2.0)]))


def test_soundness_extends_to_n16():
    # the module-level soundness invariant reaches n = 16
    for t, m in [
        (sl.identity_witness(sl.lp(2, 16)), 1),
        (sl.identity_witness(sl.lp(1, 16)), 1),
        (sl.tensor_witness(2, 16), 2),
    ]:
        norm = sl.operator_norm(t)
        assert norm.exact
        for p, q in [(1.0, 2.0), (2.0, 2.0), (3.0, 1.5), (1.5, 4.0)]:
            cap = norm.value * 16 ** sl.upper_bound_mult(m, p, q) * (1 + 1e-6)
            _, trace = sl.maximize_quotient(t, 16, p, q, random_starts=1, sweeps=3, return_trace=True)
            for s in trace:
                if not s.family_descriptor.conservative:
                    assert s.quotient <= cap


def test_tensor_witness_slopes():
    for m, grid in [(1, [2, 4, 8, 16]), (2, [2, 4, 8, 16]), (3, [2, 4, 8])]:
        samples = [
            sl.summing_quotient(sl.tensor_witness(m, n), [_basis(n)] * m, 2, 2) for n in grid
        ]
        est = sl.estimate_index(samples)
        assert est.slope == pytest.approx(m / 2, abs=1e-9)
        assert est.residual <= 1e-9


# ---------------------------------------------------------------------------
# bound tables
# ---------------------------------------------------------------------------


def test_upper_bound_mult_values():
    assert sl.upper_bound_mult(2, 2, 2) == pytest.approx(1.0, abs=1e-15)
    assert sl.upper_bound_mult(3, 4, 2) == pytest.approx(0.75, abs=1e-15)
    assert sl.upper_bound_mult(1, 1, 1) == pytest.approx(1.0, abs=1e-15)
    assert sl.upper_bound_mult(2, 1, 4) == pytest.approx(2.5, abs=1e-15)
    assert sl.upper_bound_mult(1, 3, 2) == pytest.approx(1 / 3, abs=1e-15)


@settings(deadline=None, max_examples=300)
@given(
    st.integers(min_value=1, max_value=5),
    st.floats(min_value=0.1, max_value=8.0),
    st.floats(min_value=2.0, max_value=8.0),
)
def test_upper_bound_mult_branch_continuity(m, p, q):
    # at p = q the two q >= 2 branches agree; at q = 2 all three agree
    assert mult_upper_branch(m, q, q, "p_ge_q") == pytest.approx(m / 2, rel=1e-12)
    assert mult_upper_branch(m, q, q, "p_lt_q") == pytest.approx(m / 2, rel=1e-12)
    assert mult_upper_branch(m, p, 2.0, "p_ge_q") == pytest.approx(m / p, rel=1e-12)
    assert mult_upper_branch(m, p, 2.0, "p_lt_q") == pytest.approx(m / p, rel=1e-12)


def test_upper_bound_pol_values():
    assert sl.upper_bound_pol(2, 0.5, 2) == pytest.approx(2.0, abs=1e-15)
    assert sl.upper_bound_pol(2, 1, 4) == pytest.approx(1.5, abs=1e-15)
    # m=1, q=3, p=2 satisfies p < q/m, so the bound is claimed there
    assert sl.upper_bound_pol(1, 2, 3) == pytest.approx(0.5 + 1 / 6, rel=1e-12)
    with pytest.raises(ValidityError):
        sl.upper_bound_pol(1, 3, 2)  # p >= q/m
    with pytest.raises(ValidityError):
        sl.upper_bound_pol(2, 1, 2)  # boundary p = q/m is excluded


def test_lower_bound_pol_cotype_values():
    # q=1, r=2: branch (b) collapses to 1/p - (m+1)/2
    m = 2
    for p in (0.42, 0.5, 0.62):
        assert sl.lower_bound_pol_cotype(m, p, 1, 2) == pytest.approx(1 / p - 1.5, rel=1e-12)
    # branch (d) example: m=1, q=2, r=3, p=2
    assert sl.lower_bound_pol_cotype(1, 2, 2, 3) == pytest.approx(1 / 6, rel=1e-12)
    # seam: q=2, m=2, r=2 at p = 2r/(mr+2) = 2/3
    p_seam = 2 * 2 / (2 * 2 + 2)
    assert sl.lower_bound_pol_cotype(2, p_seam, 2, 2) == pytest.approx(1.0, rel=1e-12)
    assert pol_cotype_branch_value("d", 2, p_seam, 2, 2) == pytest.approx(1.0, rel=1e-12)


def test_lower_bound_pol_cotype_errors():
    with pytest.raises(DomainError):
        sl.lower_bound_pol_cotype(2, 0.5, 1, 1.5)  # r < 2
    with pytest.raises(DomainError):
        sl.lower_bound_pol_cotype(2, 2.5, 1, 2)  # p >= r
    with pytest.raises(ValidityError):
        sl.lower_bound_pol_cotype(2, 1.5, 1, 2)  # q < 2, p past the (b) range
    with pytest.raises(ValidityError):
        sl.lower_bound_pol_cotype(2, 0.5, 0.5, 2)  # q < 1


def test_lower_bound_pol_real_even_values():
    assert sl.lower_bound_pol_real_even(2, 1 / 3, 1) == pytest.approx(1.0, rel=1e-12)
    assert sl.lower_bound_pol_real_even(2, 0.4, 3) == pytest.approx(1.0, rel=1e-12)
    assert sl.lower_bound_pol_real_even(2, 0.8, 2) == pytest.approx(0.25, rel=1e-12)
    with pytest.raises(DomainError):
        sl.lower_bound_pol_real_even(3, 0.4, 2)
    with pytest.raises(ValidityError):
        sl.lower_bound_pol_real_even(2, 1.2, 3)  # p >= 1 in branch (d)


def test_seam_continuity_sweep():
    for m in (2, 4):
        for q in (1.0, 1.5, 2.0, 3.0):
            for r in (2.0, 2.5, 3.0):
                gaps = sl.seam_continuity_gaps(m, q, r)
                assert gaps, f"no seams applicable at {(m, q, r)}"
                for name, gap in gaps.items():
                    assert gap <= 1e-12, (m, q, r, name, gap)


def test_lower_below_upper_where_both_valid(rng):
    # wherever a lower-bound branch and the polynomial upper bound are both
    # claimed, the lower bound cannot exceed the upper bound
    for _ in range(500):
        m = int(rng.integers(1, 5))
        p = float(rng.uniform(0.05, 4.0))
        q = float(rng.uniform(1.0, 6.0))
        r = float(rng.uniform(2.0, 4.0))
        try:
            upper = sl.upper_bound_pol(m, p, q)
        except (ValidityError, DomainError):
            continue
        try:
            lower = sl.lower_bound_pol_cotype(m, p, q, r)
            assert lower <= upper + 1e-12
        except (ValidityError, DomainError):
            pass
        if m % 2 == 0:
            try:
                lower = sl.lower_bound_pol_real_even(m, p, q)
                assert lower <= upper + 1e-12
            except (ValidityError, DomainError):
                pass


# ---------------------------------------------------------------------------
# exact cases, shifts, growth exponents
# ---------------------------------------------------------------------------


def test_exact_index_values():
    assert sl.exact_index("l2_to_c0", m=3).value == pytest.approx(1.5, abs=1e-15)
    assert sl.exact_index("l1_to_l2", m=1, p=0.8).value == pytest.approx(0.25, rel=1e-12)
    assert sl.exact_index("sup_to_cotype", p=1.5, r=2).value == pytest.approx(1 / 6, rel=1e-12)
    with pytest.raises(ValidityError):
        sl.exact_index("l1_to_l2", m=1, p=1.0)
    with pytest.raises(ValidityError):
        sl.exact_index("sup_to_cotype", p=4.0, r=2)
    with pytest.raises(ValidityError):
        sl.exact_index("no_such_case")


def test_exact_cases_match_lower_bound_branches(rng):
    for _ in range(100):
        m = int(rng.integers(1, 5))
        lo, hi = 2 / (2 * m + 1), 2 / (m + 1)
        p = float(rng.uniform(lo, hi * 0.999))
        got = sl.exact_index("l1_to_l2", m=m, p=p).value
        assert got == pytest.approx(sl.lower_bound_pol_cotype(m, p, 1, 2), abs=1e-12)
        assert got == pytest.approx(sl.index_shift(p, hi, 0.0), abs=1e-12)

        r = float(rng.uniform(2.0, 4.0))
        p2 = float(rng.uniform(2 * r / (r + 2) * 1.001, r * 0.999))
        got = sl.exact_index("sup_to_cotype", p=p2, r=r).value
        assert got == pytest.approx(sl.lower_bound_pol_cotype(1, p2, 2, r), abs=1e-12)
        assert got == pytest.approx(sl.index_shift(p2, r, 0.0), abs=1e-12)


def test_index_shift():
    assert sl.index_shift(0.8, 1.0, 0.0) == pytest.approx(0.25, rel=1e-12)
    eps = 1e-6
    assert sl.index_shift(1.0 - eps, 1.0, 0.0) == pytest.approx(eps, rel=1e-3)
    with pytest.raises(DomainError):
        sl.index_shift(1.0, 1.0, 0.0)


def test_interpolation_growth_exponent():
    assert sl.interpolation_growth_exponent(2, 2) == pytest.approx(0.5, abs=1e-15)
    assert sl.interpolation_growth_exponent(2, 1) == pytest.approx(0.0, abs=1e-15)
    assert sl.interpolation_growth_exponent(1.5, 1.5) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainError):
        sl.interpolation_growth_exponent(1.2, 1.5)


@settings(deadline=None, max_examples=200)
@given(st.floats(min_value=1.0, max_value=2.0))
def test_interpolation_diagonal_is_half(s):
    assert sl.interpolation_growth_exponent(s, s) == pytest.approx(0.5, rel=1e-12)


def test_weak2_growth_exponent():
    assert sl.weak2_growth_exponent(4.0) == pytest.approx(0.25, abs=1e-15)
    assert sl.weak2_growth_exponent(2.5) == pytest.approx(0.4, abs=1e-15)
    assert sl.weak2_growth_exponent(2.0 + 1e-9) == pytest.approx(0.5, rel=1e-6)
    with pytest.raises(DomainError):
        sl.weak2_growth_exponent(2.0)
    assert sl.WEAK2_GROWTH_CONSTANT == pytest.approx(1 / (2 * math.e), rel=1e-15)


def test_bound_table_assembly():
    entries = sl.bound_table(2, 2.0, 2.0, 2.0)
    kinds = {(e.kind, e.valid) for e in entries}
    assert ("mult_upper", True) in kinds
    # p = r = 2 sits outside the cotype lower bound's p < r range
    assert ("pol_lower_cotype", False) in kinds
    mult = next(e for e in entries if e.kind == "mult_upper")
    assert mult.value == pytest.approx(1.0)
    exact = [e for e in entries if e.kind == "exact" and e.valid]
    assert any(e.value == pytest.approx(1.0) for e in exact)
    # pol_upper is invalid at p = q = 2, m = 2 (needs p < q/m = 1)
    pol_up = next(e for e in entries if e.kind == "pol_upper")
    assert not pol_up.valid and pol_up.value is None

    entries = sl.bound_table(2, 0.5, 2.0, 2.0)
    cot = next(e for e in entries if e.kind == "pol_lower_cotype")
    assert cot.valid and cot.value == pytest.approx(1.0)
    even = next(e for e in entries if e.kind == "pol_lower_real_even")
    assert even.valid and even.value == pytest.approx(1.0)
