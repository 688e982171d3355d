"""Summing quotients, quotient maximization, exponent regression, bounds.

The central observable is the summing quotient of a map T at family
length n:

    ( sum over tuples ||T(x_{k_1}, ..., x_{k_m})||^p )^(1/p)
    ----------------------------------------------------------
            prod_i  weak-q norm of the i-th family

(for polynomials the denominator is the weak norm raised to the
degree).  Growth of the best quotient in n is what the piecewise bound
tables cap from above and the witness constructions push from below;
the regressed log-log slope is reported as an empirical growth
exponent, never as a converged index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DomainError, StructuralError, ValidityError
from .maps import (
    DEFAULT_TUPLE_BUDGET,
    HomogeneousPolynomial,
    MultilinearMap,
    mixed_power_sum,
    poly_power_sum,
)
from .search import DEFAULT_BUDGET, SearchBudget, derive_seed
from .spaces import coord_norm
from .weak_norms import VectorFamily, WeakNormResult, weak_norm

# ---------------------------------------------------------------------------
# samples and regression
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Provenance:
    """How a quotient sample was produced.

    ``conservative`` is True when any weak norm in the denominator came
    from search (a lower bound), in which case the quotient may
    overestimate and must not be used in upper-bound soundness
    assertions.
    """

    strategy: str
    seed: int | None
    conservative: bool
    weak_norm_exact: tuple[bool, ...]
    certificates: tuple[np.ndarray, ...] = ()


@dataclass(frozen=True, eq=False)
class QuotientSample:
    n: int
    quotient: float
    family_descriptor: Provenance

    def __post_init__(self) -> None:
        if not math.isfinite(self.quotient) or self.quotient < 0:
            raise StructuralError(f"quotient must be finite and >= 0, got {self.quotient}")


@dataclass(frozen=True)
class IndexEstimate:
    """Least-squares slope of log(quotient) against log(n).

    ``residual`` is the max absolute log-residual of the fit; it is
    part of the estimate and is never hidden.
    """

    slope: float
    intercept: float
    residual: float
    grid: tuple[int, ...]


def summing_quotient(
    t: MultilinearMap,
    families,
    p: float,
    q: float,
    budget: SearchBudget = DEFAULT_BUDGET,
    *,
    tuple_budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
    strategy: str = "direct",
    _weak_results: list[WeakNormResult] | None = None,
) -> QuotientSample:
    """Mixed power sum divided by the product of the families' weak-q norms."""
    families = list(families)
    if _weak_results is None:
        _weak_results = [weak_norm(fam, q, budget) for fam in families]
    denom = 1.0
    for res in _weak_results:
        if res.value == 0.0:
            raise DegenerateInputError("weak norm of an all-zero family: quotient undefined")
        denom *= res.value
    num = mixed_power_sum(t, families, p, tuple_budget=tuple_budget, threads=threads)
    prov = Provenance(
        strategy=strategy,
        seed=budget.seed,
        conservative=any(not res.exact for res in _weak_results),
        weak_norm_exact=tuple(res.exact for res in _weak_results),
        certificates=tuple(res.certificate.coords for res in _weak_results),
    )
    return QuotientSample(families[0].n, num / denom, prov)


def polynomial_quotient(
    p_map: HomogeneousPolynomial,
    family: VectorFamily,
    p: float,
    q: float,
    budget: SearchBudget = DEFAULT_BUDGET,
    *,
    tuple_budget: int = DEFAULT_TUPLE_BUDGET,
    strategy: str = "direct",
    _weak_result: WeakNormResult | None = None,
) -> QuotientSample:
    """Power sum of P over the family divided by (weak-q norm)^degree."""
    res = _weak_result if _weak_result is not None else weak_norm(family, q, budget)
    if res.value == 0.0:
        raise DegenerateInputError("weak norm of an all-zero family: quotient undefined")
    num = poly_power_sum(p_map, family, p, tuple_budget=tuple_budget)
    prov = Provenance(
        strategy=strategy,
        seed=budget.seed,
        conservative=not res.exact,
        weak_norm_exact=(res.exact,),
        certificates=(res.certificate.coords,),
    )
    return QuotientSample(family.n, num / res.value**p_map.degree, prov)


def maximize_quotient(
    map_obj,
    n: int,
    p: float,
    q: float,
    *,
    budget: SearchBudget = DEFAULT_BUDGET,
    strategies=("basis", "anchor", "random"),
    anchor_families=None,
    random_starts: int = 4,
    sweeps: int = 16,
    tuple_budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
    return_trace: bool = False,
):
    """Best quotient over basis, anchor, and refined random families.

    Strategies run in a fixed order and ties resolve toward the earlier
    strategy; the random strategy perturbs one vector at a time, keeps
    the move if the quotient rises, and halves the step once a full
    sweep fails.  Deterministic under a fixed budget seed.
    """
    if n < 1:
        raise DomainError("family length must be >= 1")
    is_poly = isinstance(map_obj, HomogeneousPolynomial)
    if not is_poly and not isinstance(map_obj, MultilinearMap):
        raise StructuralError(f"cannot maximize quotients of {type(map_obj).__name__}")
    domains = [map_obj.domain] if is_poly else list(map_obj.domain)

    weak_cache: dict[int, WeakNormResult] = {}

    def weak_of(fam: VectorFamily) -> WeakNormResult:
        res = weak_cache.get(id(fam))
        if res is None:
            res = weak_norm(fam, q, budget)
            weak_cache[id(fam)] = res
        return res

    def evaluate(fams, label: str) -> QuotientSample:
        results = [weak_of(f) for f in fams]
        if is_poly:
            return polynomial_quotient(
                map_obj, fams[0], p, q, budget, tuple_budget=tuple_budget, strategy=label, _weak_result=results[0]
            )
        return summing_quotient(
            map_obj, fams, p, q, budget, tuple_budget=tuple_budget, threads=threads, strategy=label, _weak_results=results
        )

    best: QuotientSample | None = None
    trace: list[QuotientSample] = []

    def consider(sample: QuotientSample) -> None:
        nonlocal best
        trace.append(sample)
        if best is None or sample.quotient > best.quotient:
            best = sample

    for strategy in strategies:
        if strategy == "basis":
            consider(evaluate([VectorFamily.basis(s, n) for s in domains], "basis"))
        elif strategy == "anchor":
            if anchor_families is None:
                continue
            fams = anchor_families if isinstance(anchor_families, (list, tuple)) else [anchor_families] * len(domains)
            fams = list(fams)
            if len(fams) != len(domains):
                raise StructuralError("one anchor family per domain slot is required")
            for fam, space in zip(fams, domains):
                if fam.space != space or fam.n != n:
                    raise StructuralError("anchor families must match the domains and the length n")
            consider(evaluate(fams, "anchor"))
        elif strategy == "random":
            rng = np.random.default_rng(
                derive_seed(budget.seed, "maximize_quotient", map_obj.fingerprint(), n, float(p), float(q))
            )
            for start in range(random_starts):
                fams = []
                for space in domains:
                    rows = rng.standard_normal((n, space.dimension))
                    norms = np.atleast_1d(coord_norm(space, rows, axis=1))
                    fams.append(VectorFamily(space, rows / norms[:, None]))
                label = f"random[{start}]"
                current = evaluate(fams, label)
                consider(current)
                sigma = 0.5
                for _ in range(sweeps):
                    improved = False
                    for slot, space in enumerate(domains):
                        for k in range(n):
                            mat = fams[slot].matrix.copy()
                            row = mat[k] + sigma * rng.standard_normal(space.dimension)
                            nr = float(coord_norm(space, row))
                            if nr == 0.0:
                                continue
                            mat[k] = row / nr
                            trial = list(fams)
                            trial[slot] = VectorFamily(space, mat)
                            sample = evaluate(trial, label + "+ascent")
                            consider(sample)
                            if sample.quotient > current.quotient:
                                fams = trial
                                current = sample
                                improved = True
                    if not improved:
                        sigma *= 0.5
                        if sigma < 1e-3:
                            break
        else:
            raise StructuralError(f"unknown strategy {strategy!r}")

    if best is None:
        raise StructuralError("no strategy produced a sample")
    return (best, trace) if return_trace else best


def estimate_index(samples) -> IndexEstimate:
    """OLS of log(quotient) on log(n); needs >= 3 samples at distinct n."""
    samples = list(samples)
    ns = [s.n for s in samples]
    if len(set(ns)) < 3:
        raise StructuralError("regression needs at least 3 samples at distinct n")
    for s in samples:
        if s.quotient <= 0:
            raise DomainError("regression needs strictly positive quotients")
    order = np.argsort(ns)
    x = np.log([float(ns[i]) for i in order])
    y = np.log([samples[i].quotient for i in order])
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.abs(y - (slope * x + intercept)).max())
    return IndexEstimate(float(slope), float(intercept), residual, tuple(int(ns[i]) for i in order))


# ---------------------------------------------------------------------------
# closed-form bound tables
# ---------------------------------------------------------------------------


def _check_mpq(m: int, p: float, q: float) -> None:
    if m < 1 or int(m) != m:
        raise DomainError(f"order m must be a positive integer, got {m}")
    if p <= 0 or q <= 0:
        raise DomainError(f"exponents must be positive, got p = {p}, q = {q}")


def upper_bound_mult(m: int, p: float, q: float) -> float:
    """Universal upper bound on the order-m growth exponent at (p, q).

    Piecewise: m/p for q <= 2; mq/(2p) for q >= 2 and p >= q;
    m(qp - 2p + 2q)/(2qp) for q >= 2 and p < q.  Continuous at p = q
    and at q = 2.
    """
    _check_mpq(m, p, q)
    if q <= 2.0:
        return m / p
    if p >= q:
        return m * q / (2.0 * p)
    return m * (q * p - 2.0 * p + 2.0 * q) / (2.0 * q * p)


def mult_upper_branch(m: int, p: float, q: float, which: str) -> float:
    """Raw branch formulas of :func:`upper_bound_mult` (for seam checks)."""
    _check_mpq(m, p, q)
    if which == "low_q":
        return m / p
    if which == "p_ge_q":
        return m * q / (2.0 * p)
    if which == "p_lt_q":
        return m * (q * p - 2.0 * p + 2.0 * q) / (2.0 * q * p)
    raise StructuralError(f"unknown branch {which!r}")


def upper_bound_pol(m: int, p: float, q: float) -> float:
    """Polynomial upper bound, claimed only for p < q/m.

    1/p for q <= 2 and 1/p + m(q - 2)/(2q) for q >= 2.
    """
    _check_mpq(m, p, q)
    if p >= q / m:
        raise ValidityError(f"polynomial upper bound is only claimed for p < q/m (p = {p}, q/m = {q / m})")
    if q <= 2.0:
        return 1.0 / p
    return 1.0 / p + m * (q - 2.0) / (2.0 * q)


def cotype_seam_points(m: int, q: float, r: float) -> tuple[float, float]:
    """The two breakpoints rq/(mr + q) and 2r/(mr + 2)."""
    return r * q / (m * r + q), 2.0 * r / (m * r + 2.0)


def pol_cotype_branch_value(branch: str, m: int, p: float, q: float, r: float) -> float:
    """Raw branch formulas of the cotype lower bound (for seam checks)."""
    if branch in ("a", "c"):
        return m / 2.0
    if branch == "b":
        return (m * p + 2.0) / (2.0 * p) - (m * r + q) / (r * q)
    if branch == "d":
        return (r - p) / (p * r)
    raise StructuralError(f"unknown branch {branch!r}")


def lower_bound_pol_cotype(m: int, p: float, q: float, r: float) -> float:
    """Lower bound on the polynomial growth exponent into a cotype-r target.

    Branches: (a) q in [1,2], p <= rq/(mr+q): m/2; (b) q in [1,2],
    rq/(mr+q) <= p <= 2r/(mr+2): (mp+2)/(2p) - (mr+q)/(rq); (c) q >= 2,
    p <= 2r/(mr+2): m/2; (d) q >= 2, 2r/(mr+2) < p < r: (r-p)/(pr).
    Adjacent branches agree at the breakpoints.
    """
    _check_mpq(m, p, q)
    if r < 2.0:
        raise DomainError(f"cotype parameter must satisfy r >= 2, got {r}")
    if p >= r:
        raise DomainError(f"requires p < r, got p = {p}, r = {r}")
    p_low, p_high = cotype_seam_points(m, q, r)
    if q >= 2.0:
        if p <= p_high:
            return pol_cotype_branch_value("c", m, p, q, r)
        return pol_cotype_branch_value("d", m, p, q, r)
    if q >= 1.0:
        if p <= p_low:
            return pol_cotype_branch_value("a", m, p, q, r)
        if p <= p_high:
            return pol_cotype_branch_value("b", m, p, q, r)
        raise ValidityError(f"no claim for q < 2 and p > 2r/(mr+2) (p = {p})")
    raise ValidityError(f"no claim for q < 1 (q = {q})")


def real_even_seam_points(m: int, q: float) -> tuple[float, float]:
    """The two breakpoints q/(m + q) and 2/(m + 2)."""
    return q / (m + q), 2.0 / (m + 2.0)


def pol_real_even_branch_value(branch: str, m: int, p: float, q: float) -> float:
    """Raw branch formulas of the scalar even-degree lower bound."""
    if branch in ("a", "c"):
        return m / 2.0
    if branch == "b":
        return (m * p + 2.0) / (2.0 * p) - (m + q) / q
    if branch == "d":
        return (1.0 - p) / p
    raise StructuralError(f"unknown branch {branch!r}")


def lower_bound_pol_real_even(m: int, p: float, q: float) -> float:
    """Lower bound on the scalar-valued even-degree growth exponent.

    Branches: (a) q in [1,2], p <= q/(m+q): m/2; (b) q in [1,2],
    q/(m+q) <= p <= 2/(m+2): (mp+2)/(2p) - (m+q)/q; (c) q >= 2,
    p <= 2/(m+2): m/2; (d) q >= 2, 2/(m+2) < p < 1: (1-p)/p.
    """
    _check_mpq(m, p, q)
    if m % 2 != 0:
        raise DomainError(f"even degree required, got m = {m}")
    p_low, p_high = real_even_seam_points(m, q)
    if q >= 2.0:
        if p <= p_high:
            return pol_real_even_branch_value("c", m, p, q)
        if p < 1.0:
            return pol_real_even_branch_value("d", m, p, q)
        raise ValidityError(f"no claim for q >= 2 and p >= 1 (p = {p})")
    if q >= 1.0:
        if p <= p_low:
            return pol_real_even_branch_value("a", m, p, q)
        if p <= p_high:
            return pol_real_even_branch_value("b", m, p, q)
        raise ValidityError(f"no claim for q < 2 and p > 2/(m+2) (p = {p})")
    raise ValidityError(f"no claim for q < 1 (q = {q})")


def seam_continuity_gaps(m: int, q: float, r: float | None = None) -> dict[str, float]:
    """Absolute gaps between adjacent branch values at every applicable seam."""
    gaps: dict[str, float] = {}
    if r is not None:
        p_low, p_high = cotype_seam_points(m, q, r)
        if 1.0 <= q <= 2.0:
            gaps["cotype_low"] = abs(
                pol_cotype_branch_value("a", m, p_low, q, r) - pol_cotype_branch_value("b", m, p_low, q, r)
            )
        if q >= 2.0:
            gaps["cotype_high"] = abs(
                pol_cotype_branch_value("c", m, p_high, q, r) - pol_cotype_branch_value("d", m, p_high, q, r)
            )
        if q == 2.0:
            gaps["cotype_q2"] = abs(
                pol_cotype_branch_value("b", m, p_high, q, r) - pol_cotype_branch_value("d", m, p_high, q, r)
            )
    if m % 2 == 0:
        p_low, p_high = real_even_seam_points(m, q)
        if 1.0 <= q <= 2.0:
            gaps["real_even_low"] = abs(
                pol_real_even_branch_value("a", m, p_low, q) - pol_real_even_branch_value("b", m, p_low, q)
            )
        if q >= 2.0:
            gaps["real_even_high"] = abs(
                pol_real_even_branch_value("c", m, p_high, q) - pol_real_even_branch_value("d", m, p_high, q)
            )
        if q == 2.0:
            gaps["real_even_q2"] = abs(
                pol_real_even_branch_value("b", m, p_high, q) - pol_real_even_branch_value("d", m, p_high, q)
            )
    return gaps


# ---------------------------------------------------------------------------
# exact cases, index shifting, classical growth exponents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactIndex:
    """A tabulated exact growth exponent with its validity range."""

    case: str
    value: float
    p_range: tuple[float, float] | None
    note: str


EXACT_CASES = ("l2_to_c0", "l1_to_l2", "sup_to_cotype")


def exact_index(case_id: str, *, m: int | None = None, p: float | None = None, r: float | None = None) -> ExactIndex:
    """Tabulated exact growth exponents.

    l2_to_c0: the order-m diagonal family at (2, 2) gives exactly m/2.
    l1_to_l2: degree-m polynomials at (p, 1) give 1/p - (m+1)/2 for
    2/(2m+1) <= p < 2/(m+1).  sup_to_cotype: linear maps from sup-norm
    spaces into a cotype-r target at (p, 2) give 1/p - 1/r for
    2r/(r+2) < p < r.
    """
    if case_id == "l2_to_c0":
        if m is None or m < 1:
            raise DomainError("l2_to_c0 needs the order m >= 1")
        return ExactIndex(case_id, m / 2.0, None, "holds at (p, q) = (2, 2) for every order m")
    if case_id == "l1_to_l2":
        if m is None or m < 1 or p is None:
            raise DomainError("l1_to_l2 needs the degree m >= 1 and p")
        lo, hi = 2.0 / (2.0 * m + 1.0), 2.0 / (m + 1.0)
        if not (lo <= p < hi):
            raise ValidityError(f"l1_to_l2 is exact only for {lo} <= p < {hi}, got p = {p}")
        return ExactIndex(case_id, 1.0 / p - (m + 1.0) / 2.0, (lo, hi), "q = 1; left end closed, right end open")
    if case_id == "sup_to_cotype":
        if p is None or r is None:
            raise DomainError("sup_to_cotype needs p and the target cotype r")
        if r < 2.0:
            raise DomainError(f"target cotype must satisfy r >= 2, got {r}")
        lo, hi = 2.0 * r / (r + 2.0), r
        if not (lo < p < hi):
            raise ValidityError(f"sup_to_cotype is exact only for {lo} < p < {hi}, got p = {p}")
        return ExactIndex(case_id, 1.0 / p - 1.0 / r, (lo, hi), "q = 2, m = 1; both ends open")
    raise ValidityError(f"unknown exact case {case_id!r}; known: {EXACT_CASES}")


def index_shift(p_target: float, p_known: float, eta_known: float) -> float:
    """Hoelder-padded exponent at a smaller power: eta + 1/p_target - 1/p_known."""
    if not (0.0 < p_target < p_known):
        raise DomainError(f"requires 0 < p_target < p_known, got {p_target} and {p_known}")
    return eta_known + 1.0 / p_target - 1.0 / p_known


def interpolation_growth_exponent(s: float, d: float) -> float:
    """Lower growth exponent (2d + s(d-2)) / (2sd) for 1 <= d <= s <= 2.

    Equals 1/2 along the diagonal s = d, matching the Hilbert identity
    growth at s = d = 2.
    """
    if not (1.0 <= d <= s <= 2.0):
        raise DomainError(f"requires 1 <= d <= s <= 2, got s = {s}, d = {d}")
    return (2.0 * d + s * (d - 2.0)) / (2.0 * s * d)


WEAK2_GROWTH_CONSTANT = 1.0 / (2.0 * math.e)


def weak2_growth_exponent(q: float) -> float:
    """Growth exponent 1/q of the (q, 2) identity quotient, for q > 2.

    The accompanying universal constant 1/(2e) is reported alongside as
    WEAK2_GROWTH_CONSTANT but never asserted in growth tests.
    """
    if q <= 2.0:
        raise DomainError(f"requires q > 2, got {q}")
    return 1.0 / q


# ---------------------------------------------------------------------------
# assembled bound table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundEntry:
    kind: str
    m: int
    p: float
    q: float
    r: float | None
    branch: str
    value: float | None
    valid: bool
    note: str = ""


def _mult_branch_label(p: float, q: float) -> str:
    if q <= 2.0:
        return "q<=2: m/p"
    if p >= q:
        return "q>=2, p>=q: mq/(2p)"
    return "q>=2, p<q: m(qp-2p+2q)/(2qp)"


def _cotype_branch_label(m: int, p: float, q: float, r: float) -> str:
    p_low, p_high = cotype_seam_points(m, q, r)
    if q >= 2.0:
        return "(c) m/2" if p <= p_high else "(d) (r-p)/(pr)"
    return "(a) m/2" if p <= p_low else "(b) (mp+2)/(2p) - (mr+q)/(rq)"


def _real_even_branch_label(m: int, p: float, q: float) -> str:
    p_low, p_high = real_even_seam_points(m, q)
    if q >= 2.0:
        return "(c) m/2" if p <= p_high else "(d) (1-p)/p"
    return "(a) m/2" if p <= p_low else "(b) (mp+2)/(2p) - (m+q)/q"


def bound_table(m: int, p: float, q: float, r: float | None = None) -> list[BoundEntry]:
    """Every applicable bound at (m, p, q[, r]), with validity flags."""
    entries: list[BoundEntry] = []

    def attempt(kind: str, branch: str, fn, note: str = "") -> None:
        try:
            value = fn()
        except (ValidityError, DomainError) as exc:
            entries.append(BoundEntry(kind, m, p, q, r, branch, None, False, str(exc)))
            return
        entries.append(BoundEntry(kind, m, p, q, r, branch, float(value), True, note))

    attempt("mult_upper", _mult_branch_label(p, q), lambda: upper_bound_mult(m, p, q))
    attempt("pol_upper", "1/p" if q <= 2 else "1/p + m(q-2)/(2q)", lambda: upper_bound_pol(m, p, q))
    if r is not None:
        attempt("pol_lower_cotype", _cotype_branch_label(m, p, q, r), lambda: lower_bound_pol_cotype(m, p, q, r))
    attempt("pol_lower_real_even", _real_even_branch_label(m, p, q), lambda: lower_bound_pol_real_even(m, p, q))
    if p == 2.0 and q == 2.0:
        attempt("exact", "l2_to_c0: m/2", lambda: exact_index("l2_to_c0", m=m).value)
    if q == 1.0:
        attempt("exact", "l1_to_l2: 1/p - (m+1)/2", lambda: exact_index("l1_to_l2", m=m, p=p).value)
    if q == 2.0 and m == 1 and r is not None:
        attempt("exact", "sup_to_cotype: 1/p - 1/r", lambda: exact_index("sup_to_cotype", p=p, r=r).value)
    return entries
