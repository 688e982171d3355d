"""Constructors for the extremal witness families.

Each constructor produces a map or polynomial together with the exact
coefficient normalization its lower-bound argument needs, and verifies
at construction time that the declared constraint holds, that the
anchor functionals norm their anchors, that the operator norm stays
below its closed-form cap, and that the anchor evaluations dominate
|a_k|^(1/p) ||x_k||^m.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DomainError, StructuralError
from .maps import (
    DEFAULT_TUPLE_BUDGET,
    CotypeWitnessBody,
    DenseTensor,
    DiagonalC0,
    HomogeneousPolynomial,
    MultilinearMap,
    RealEvenWitnessBody,
    _poly_outputs,
    operator_norm,
)
from .search import DEFAULT_BUDGET, SearchBudget
from .spaces import SpaceDescriptor, Vector, coord_norm, lp, norming_functional, real_line, sup_slice
from .weak_norms import VectorFamily

_VERIFY_BUDGET_RESTARTS = 16
_VERIFY_BUDGET_ITER = 150


class CoefficientRule(enum.Enum):
    """Which normalization the witness coefficients satisfy."""

    SUM_R_OVER_P = "sum_r_over_p"  # sum |a_j|^(r/p) = 1
    SUM_INV_P = "sum_inv_p"  # sum |a_j|^(1/p) = 1


@dataclass(frozen=True, eq=False)
class WitnessCoefficients:
    a: np.ndarray
    rule: CoefficientRule
    p: float
    r: float | None = None

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1 or np.any(a < 0) or not np.all(np.isfinite(a)):
            raise StructuralError("coefficients must be a flat nonnegative finite array")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        if self.p <= 0:
            raise DomainError(f"coefficient exponent must be positive, got {self.p}")
        if self.rule is CoefficientRule.SUM_R_OVER_P:
            if self.r is None:
                raise StructuralError("SUM_R_OVER_P rule needs r")
            total = float((a ** (self.r / self.p)).sum())
        else:
            total = float((a ** (1.0 / self.p)).sum())
        if abs(total - 1.0) > 1e-12:
            raise StructuralError(f"declared coefficient constraint fails: sum = {total}")


def equal_coefficients_sum_rp(n: int, p: float, r: float) -> WitnessCoefficients:
    """Equal coefficients a_j = n^(-p/r), satisfying sum a^(r/p) = 1."""
    a = np.full(n, float(n) ** (-p / r))
    return WitnessCoefficients(a, CoefficientRule.SUM_R_OVER_P, p, r)


def equal_coefficients_sum_inv_p(n: int, p: float) -> WitnessCoefficients:
    """Equal coefficients a_j = n^(-p), satisfying sum a^(1/p) = 1."""
    a = np.full(n, float(n) ** (-p))
    return WitnessCoefficients(a, CoefficientRule.SUM_INV_P, p)


def _verify_budget(budget: SearchBudget) -> SearchBudget:
    return SearchBudget(
        restarts=min(budget.restarts, _VERIFY_BUDGET_RESTARTS),
        max_iter=min(budget.max_iter, _VERIFY_BUDGET_ITER),
        rel_tol=budget.rel_tol,
        seed=budget.seed,
    )


def _resolve_anchors(space_in: SpaceDescriptor, n: int, anchors) -> VectorFamily:
    if isinstance(anchors, VectorFamily):
        if anchors.space != space_in or anchors.n != n:
            raise StructuralError("custom anchors must be n vectors of the domain space")
        if np.any(np.atleast_1d(coord_norm(space_in, anchors.matrix, axis=1)) == 0.0):
            raise StructuralError("anchors must be nonzero")
        return anchors
    if anchors != "basis":
        raise StructuralError(f"unknown anchor strategy {anchors!r}")
    if space_in.dimension < n:
        raise StructuralError(
            f"basis anchors need dimension >= n, got dim {space_in.dimension} < n = {n}"
        )
    return VectorFamily.basis(space_in, n)


def _anchor_functionals(space_in: SpaceDescriptor, anchors: VectorFamily) -> np.ndarray:
    rows = []
    for k in range(anchors.n):
        v = Vector(space_in, anchors.matrix[k])
        phi = norming_functional(space_in, v)
        if abs(phi(v) - v.norm()) > 1e-12 * max(1.0, v.norm()):
            raise StructuralError("anchor functional does not norm its anchor")
        rows.append(phi.coords)
    return np.vstack(rows)


def _verify_witness(poly: HomogeneousPolynomial, anchors: VectorFamily, cap: float, budget: SearchBudget) -> None:
    est = operator_norm(poly, _verify_budget(budget))
    if est.value > cap + 1e-9:
        raise StructuralError(f"witness norm search reached {est.value}, above the cap {cap}")
    outputs = _poly_outputs(poly, anchors.matrix)
    out_norms = np.atleast_1d(coord_norm(poly.codomain, outputs, axis=-1))
    anchor_norms = anchors.norms()
    floor = poly.body.weights * anchor_norms**poly.degree
    if np.any(out_norms < floor - 1e-10):
        raise StructuralError("witness anchor evaluation fell below |a_k|^(1/p) ||x_k||^m")


def tensor_witness(m: int, n: int, tuple_budget: int = DEFAULT_TUPLE_BUDGET) -> MultilinearMap:
    """The diagonal outer-product map of order m on l_2^n, operator norm 1."""
    if m < 1 or n < 1:
        raise DomainError("tensor witness needs m >= 1 and n >= 1")
    if float(n) ** m > tuple_budget:
        raise BudgetError(f"{n}^{m} output coordinates exceed the budget of {tuple_budget}")
    domain = tuple(lp(2.0, n) for _ in range(m))
    return MultilinearMap(domain, sup_slice(n**m), DiagonalC0(n))


def cotype_witness(
    m: int,
    p: float,
    space_in: SpaceDescriptor,
    target_r: float,
    n: int,
    anchors="basis",
    budget: SearchBudget = DEFAULT_BUDGET,
) -> tuple[HomogeneousPolynomial, VectorFamily]:
    """Witness polynomial into l_r^n with equal coefficients a_j = n^(-p/r).

    Targets are the canonical basis of l_r^n, which realizes the
    two-sided factoring estimate with both constants equal to 1.
    Requires p < r (the coefficient duality argument needs it) and
    r >= 2 so that the codomain's tabulated cotype equals r.
    """
    if n < 1 or m < 1:
        raise DomainError("witness needs m >= 1 and n >= 1")
    if target_r < 2.0:
        raise DomainError(f"target space needs r >= 2, got {target_r}")
    if not (0.0 < p < target_r):
        raise DomainError(f"witness requires 0 < p < r, got p = {p}, r = {target_r}")
    coeffs = equal_coefficients_sum_rp(n, p, target_r)
    anchors = _resolve_anchors(space_in, n, anchors)
    functionals = _anchor_functionals(space_in, anchors)
    codomain = lp(target_r, n)
    body = CotypeWitnessBody(coeffs.a, functionals, np.eye(n), p)
    poly = HomogeneousPolynomial(m, space_in, codomain, body)
    _verify_witness(poly, anchors, 1.0, budget)
    return poly, anchors


def real_even_witness(
    m: int,
    p: float,
    space_in: SpaceDescriptor,
    n: int,
    anchors="basis",
    budget: SearchBudget = DEFAULT_BUDGET,
) -> tuple[HomogeneousPolynomial, VectorFamily]:
    """Scalar witness of even degree with equal coefficients a_j = n^(-p).

    Requires m even and 0 < p < 1; the polynomial is pointwise
    nonnegative and has operator norm at most 1.
    """
    if m < 1 or m % 2 != 0:
        raise DomainError(f"scalar even witness needs even degree, got {m}")
    if not (0.0 < p < 1.0):
        raise DomainError(f"scalar even witness requires 0 < p < 1, got {p}")
    if n < 1:
        raise DomainError("witness needs n >= 1")
    coeffs = equal_coefficients_sum_inv_p(n, p)
    anchors = _resolve_anchors(space_in, n, anchors)
    functionals = _anchor_functionals(space_in, anchors)
    body = RealEvenWitnessBody(coeffs.a, functionals, p)
    poly = HomogeneousPolynomial(m, space_in, real_line(), body)
    _verify_witness(poly, anchors, 1.0, budget)
    return poly, anchors


def identity_witness(space: SpaceDescriptor) -> MultilinearMap:
    """The identity on ``space`` as an arity-1 dense map."""
    d = space.dimension
    return MultilinearMap((space,), space, DenseTensor(np.eye(d)))


def witness_to_spec(obj, anchors: VectorFamily | None = None) -> dict:
    """JSON spec {kind, m, p, n, space, anchors?} for a constructed witness."""
    from .maps import CotypeWitnessBody, RealEvenWitnessBody
    from .spaces import space_to_json

    if isinstance(obj, MultilinearMap):
        if isinstance(obj.body, DiagonalC0):
            return {"kind": "tensor", "m": obj.arity, "n": obj.body.n}
        if obj.arity == 1 and obj.domain[0] == obj.codomain:
            a = obj.body.coefficients
            if a.shape[0] == a.shape[1] and bool(np.all(a == np.eye(a.shape[0]))):
                return {"kind": "identity", "space": space_to_json(obj.domain[0])}
        raise StructuralError("only witness-form maps serialize to a spec")
    body = obj.body
    if isinstance(body, CotypeWitnessBody):
        spec = {
            "kind": "cotype",
            "m": obj.degree,
            "p": body.p,
            "n": int(body.a.shape[0]),
            "space": space_to_json(obj.domain),
            "target_r": obj.codomain.exponent,
        }
    elif isinstance(body, RealEvenWitnessBody):
        spec = {
            "kind": "real_even",
            "m": obj.degree,
            "p": body.p,
            "n": int(body.a.shape[0]),
            "space": space_to_json(obj.domain),
        }
    else:
        raise StructuralError("dense polynomials have no witness spec")
    if anchors is None:
        spec["anchors"] = "basis"
    else:
        spec["anchors"] = {"custom": anchors.matrix.tolist()}
    return spec


def witness_from_spec(spec: dict, budget: SearchBudget = DEFAULT_BUDGET):
    """Rebuild a witness from its JSON spec.

    Returns the map for "tensor"/"identity" kinds and a (polynomial,
    anchors) pair for the anchored kinds.
    """
    from .spaces import space_from_json

    kind = spec.get("kind")
    if kind == "tensor":
        return tensor_witness(int(spec["m"]), int(spec["n"]))
    if kind == "identity":
        return identity_witness(space_from_json(spec["space"]))
    if kind in ("cotype", "real_even"):
        space = space_from_json(spec["space"])
        n = int(spec["n"])
        anchors = spec.get("anchors", "basis")
        if isinstance(anchors, dict):
            anchors = VectorFamily(space, np.asarray(anchors["custom"], dtype=float))
        if kind == "cotype":
            return cotype_witness(
                int(spec["m"]), float(spec["p"]), space, float(spec["target_r"]), n, anchors=anchors, budget=budget
            )
        return real_even_witness(int(spec["m"]), float(spec["p"]), space, n, anchors=anchors, budget=budget)
    raise StructuralError(f"unknown witness kind {kind!r}")


def diagonal_product_map(m: int, n: int, domain_space: SpaceDescriptor) -> MultilinearMap:
    """Dense outer-product map on m copies of a d = n domain space.

    Same coordinates as the diagonal witness but with an arbitrary
    domain norm; on all-l_1 domains its operator norm has the exact
    closed form max over basis tuples (= 1 here), which makes it the
    natural order-m instance for soundness checks on exact weak-norm
    paths.
    """
    if domain_space.dimension != n:
        raise StructuralError("domain space dimension must equal n")
    if m < 1 or n < 1:
        raise DomainError("needs m >= 1 and n >= 1")
    coeffs = np.eye(n**m).reshape((n,) * m + (n**m,))
    return MultilinearMap(tuple(domain_space for _ in range(m)), sup_slice(n**m), DenseTensor(coeffs))
