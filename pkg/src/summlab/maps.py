"""Bounded multilinear maps and homogeneous polynomials.

Two multilinear bodies: a dense coefficient tensor (shape d_1 x ... x
d_m x d_out) and the diagonal outer-product map into a sup slice,

    T(x^(1), ..., x^(m)) = ( x^(1)_{j_1} ... x^(m)_{j_m} )_{j_1..j_m},

whose operator norm is exactly 1.  Three polynomial bodies: a dense
symmetric tensor, and the two structured witness forms

    P(x) = sum_j |a_j|^(1/p) phi_j(x)^m y_j      (vector targets y_j)
    P(x) = sum_j |a_j|^(1/p) phi_j(x)^m          (scalar, m even)

with the coefficient normalizations sum |a_j|^(r/p) = 1 resp.
sum |a_j|^(1/p) = 1 enforced at construction.

The mixed power sum enumerates all n^m argument tuples exactly;
enumeration is partitioned on the leading index and accumulated with
compensated (exact) summation so the result does not depend on the
partitioning.
"""

from __future__ import annotations

import base64
import json
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, DomainError, StructuralError
from .search import DEFAULT_BUDGET, SearchBudget, derive_seed, quasi_random_directions
from .spaces import (
    Family,
    SpaceDescriptor,
    Vector,
    coord_norm,
    dual_coord_norm,
    linear_argmax,
    lp,
    sup_slice,
)
from .weak_norms import VectorFamily

DEFAULT_TUPLE_BUDGET = 10**8
_CHUNK_ELEMS = 1 << 20
_DOM_LETTERS = "abcdef"
_TUP_LETTERS = "uvwxyz"


# ---------------------------------------------------------------------------
# bodies and map types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """Dense coefficient array of shape d_1 x ... x d_m x d_out."""

    coefficients: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.coefficients, dtype=float)
        if a.ndim < 2:
            raise StructuralError("dense tensor needs at least one domain axis plus the output axis")
        if not np.all(np.isfinite(a)):
            raise StructuralError("tensor entries must be finite")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "coefficients", a)


@dataclass(frozen=True, eq=False)
class DiagonalC0:
    """Outer-product map of order m on l_2^n, valued in a sup slice of dim n^m."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise StructuralError("diagonal map needs n >= 1")


@dataclass(frozen=True, eq=False)
class MultilinearMap:
    domain: tuple[SpaceDescriptor, ...]
    codomain: SpaceDescriptor
    body: DenseTensor | DiagonalC0

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", tuple(self.domain))
        m = len(self.domain)
        if m < 1:
            raise StructuralError("multilinear map needs arity >= 1")
        if isinstance(self.body, DenseTensor):
            want = tuple(s.dimension for s in self.domain) + (self.codomain.dimension,)
            if self.body.coefficients.shape != want:
                raise StructuralError(
                    f"tensor shape {self.body.coefficients.shape} does not match descriptors {want}"
                )
        else:
            n = self.body.n
            for s in self.domain:
                if s != lp(2.0, n):
                    raise StructuralError("diagonal body requires every domain space to be l_2^n")
            if self.codomain != sup_slice(n**m):
                raise StructuralError("diagonal body requires a sup-slice codomain of dimension n^m")

    @property
    def arity(self) -> int:
        return len(self.domain)

    def fingerprint(self) -> bytes:
        if isinstance(self.body, DiagonalC0):
            return b"diag" + struct.pack("<qq", self.arity, self.body.n)
        return b"denseT" + repr(self.body.coefficients.shape).encode() + self.body.coefficients.tobytes()


@dataclass(frozen=True, eq=False)
class DenseSymmetric:
    """Symmetric coefficient tensor of shape (d,)*m x d_out."""

    coefficients: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.coefficients, dtype=float)
        if a.ndim < 2:
            raise StructuralError("symmetric tensor needs domain axes plus the output axis")
        if not np.all(np.isfinite(a)):
            raise StructuralError("tensor entries must be finite")
        m = a.ndim - 1
        scale = max(1.0, float(np.abs(a).max()))
        for i in range(m - 1):
            axes = list(range(a.ndim))
            axes[i], axes[i + 1] = axes[i + 1], axes[i]
            if np.abs(a - np.transpose(a, axes)).max() > 1e-12 * scale:
                raise StructuralError("coefficient tensor is not symmetric in its domain axes")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "coefficients", a)


def _validate_witness_arrays(a, functionals, p: float):
    av = np.asarray(a, dtype=float)
    fv = np.asarray(functionals, dtype=float)
    if av.ndim != 1 or np.any(av < 0) or not np.all(np.isfinite(av)):
        raise StructuralError("witness coefficients must be a flat nonnegative finite array")
    if fv.ndim != 2 or fv.shape[0] != av.shape[0]:
        raise StructuralError("witness functionals must be one row per coefficient")
    if p <= 0:
        raise DomainError(f"witness exponent must be positive, got {p}")
    av, fv = av.copy(), fv.copy()
    av.setflags(write=False)
    fv.setflags(write=False)
    return av, fv


@dataclass(frozen=True, eq=False)
class CotypeWitnessBody:
    """P(x) = sum_j |a_j|^(1/p) phi_j(x)^m y_j with sum |a_j|^(r/p) = 1."""

    a: np.ndarray
    functionals: np.ndarray
    targets: np.ndarray
    p: float
    weights: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        av, fv = _validate_witness_arrays(self.a, self.functionals, self.p)
        tv = np.asarray(self.targets, dtype=float)
        if tv.ndim != 2 or tv.shape[0] != av.shape[0]:
            raise StructuralError("witness targets must be one row per coefficient")
        tv = tv.copy()
        tv.setflags(write=False)
        object.__setattr__(self, "a", av)
        object.__setattr__(self, "functionals", fv)
        object.__setattr__(self, "targets", tv)
        w = av ** (1.0 / self.p)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True, eq=False)
class RealEvenWitnessBody:
    """P(x) = sum_j |a_j|^(1/p) phi_j(x)^m, scalar valued, m even."""

    a: np.ndarray
    functionals: np.ndarray
    p: float
    weights: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        av, fv = _validate_witness_arrays(self.a, self.functionals, self.p)
        object.__setattr__(self, "a", av)
        object.__setattr__(self, "functionals", fv)
        w = av ** (1.0 / self.p)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True, eq=False)
class HomogeneousPolynomial:
    degree: int
    domain: SpaceDescriptor
    codomain: SpaceDescriptor
    body: DenseSymmetric | CotypeWitnessBody | RealEvenWitnessBody

    def __post_init__(self) -> None:
        m = self.degree
        if m < 1:
            raise StructuralError("polynomial degree must be >= 1")
        d = self.domain.dimension
        if isinstance(self.body, DenseSymmetric):
            want = (d,) * m + (self.codomain.dimension,)
            if self.body.coefficients.shape != want:
                raise StructuralError(
                    f"tensor shape {self.body.coefficients.shape} does not match descriptors {want}"
                )
            return
        if self.body.functionals.shape[1] != d:
            raise StructuralError("witness functionals do not match the domain dimension")
        if np.any(dual_coord_norm(self.domain, self.body.functionals, axis=1) > 1.0 + 1e-12):
            raise StructuralError("witness functionals must lie in the dual unit ball")
        if isinstance(self.body, CotypeWitnessBody):
            if self.body.targets.shape[1] != self.codomain.dimension:
                raise StructuralError("witness targets do not match the codomain dimension")
            r = self.codomain.cotype
            if not np.isfinite(r):
                raise StructuralError("cotype witness needs a codomain with finite cotype")
            total = float((self.body.a ** (r / self.body.p)).sum())
            if abs(total - 1.0) > 1e-12:
                raise StructuralError(f"coefficient normalization sum a^(r/p) = {total}, expected 1")
        else:
            if m % 2 != 0:
                raise StructuralError("scalar even witness requires even degree")
            if self.codomain.dimension != 1:
                raise StructuralError("scalar even witness requires a 1-dimensional codomain")
            total = float((self.body.a ** (1.0 / self.body.p)).sum())
            if abs(total - 1.0) > 1e-12:
                raise StructuralError(f"coefficient normalization sum a^(1/p) = {total}, expected 1")

    def fingerprint(self) -> bytes:
        if isinstance(self.body, DenseSymmetric):
            return b"denseP" + struct.pack("<q", self.degree) + self.body.coefficients.tobytes()
        tag = b"cot" if isinstance(self.body, CotypeWitnessBody) else b"even"
        parts = [tag, struct.pack("<qd", self.degree, self.body.p), self.body.a.tobytes(), self.body.functionals.tobytes()]
        if isinstance(self.body, CotypeWitnessBody):
            parts.append(self.body.targets.tobytes())
        return b"".join(parts)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def eval_multilinear(t: MultilinearMap, args) -> Vector:
    """Pointwise evaluation T(x^(1), ..., x^(m))."""
    args = list(args)
    if len(args) != t.arity:
        raise StructuralError(f"map of arity {t.arity} called with {len(args)} arguments")
    for x, s in zip(args, t.domain):
        if x.space != s:
            raise StructuralError(f"argument in {x.space} does not match domain slot {s}")
    if isinstance(t.body, DiagonalC0):
        out = args[0].coords
        for x in args[1:]:
            out = np.multiply.outer(out, x.coords)
        return Vector(t.codomain, out.ravel())
    out = t.body.coefficients
    for x in args:
        out = np.tensordot(x.coords, out, axes=(0, 0))
    return Vector(t.codomain, out)


def eval_polynomial(p: HomogeneousPolynomial, x: Vector) -> Vector:
    """Pointwise evaluation P(x)."""
    if x.space != p.domain:
        raise StructuralError(f"argument in {x.space} does not match domain {p.domain}")
    body = p.body
    if isinstance(body, DenseSymmetric):
        out = body.coefficients
        for _ in range(p.degree):
            out = np.tensordot(x.coords, out, axes=(0, 0))
        return Vector(p.codomain, out)
    g = body.functionals @ x.coords
    terms = body.weights * g**p.degree
    if isinstance(body, CotypeWitnessBody):
        return Vector(p.codomain, terms @ body.targets)
    return Vector(p.codomain, np.array([terms.sum()]))


def _poly_outputs(p: HomogeneousPolynomial, rows: np.ndarray) -> np.ndarray:
    """P applied to every row of an (k, d) matrix -> (k, d_out)."""
    body = p.body
    if isinstance(body, DenseSymmetric):
        m = p.degree
        subs = [f"k{_DOM_LETTERS[i]}" for i in range(m)]
        expr = ",".join(subs + ["".join(_DOM_LETTERS[:m]) + "o"]) + "->ko"
        return np.einsum(expr, *([rows] * m), body.coefficients, optimize=True)
    g = rows @ body.functionals.T
    terms = body.weights * g**p.degree
    if isinstance(body, CotypeWitnessBody):
        return terms @ body.targets
    return terms.sum(axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# power sums
# ---------------------------------------------------------------------------


def _check_families(t: MultilinearMap, families) -> int:
    families = list(families)
    if len(families) != t.arity:
        raise StructuralError(f"map of arity {t.arity} given {len(families)} families")
    for fam, s in zip(families, t.domain):
        if fam.space != s:
            raise StructuralError(f"family in {fam.space} does not match domain slot {s}")
    lengths = {fam.n for fam in families}
    if len(lengths) != 1:
        raise StructuralError(f"families must share one length, got {sorted(lengths)}")
    return lengths.pop()


def _leading_chunks(n: int, block_rows: int):
    for lo in range(0, n, block_rows):
        yield lo, min(lo + block_rows, n)


def mixed_power_sum(
    t: MultilinearMap,
    families,
    p: float,
    *,
    tuple_budget: int = DEFAULT_TUPLE_BUDGET,
    threads: int = 1,
) -> float:
    """( sum over all n^m tuples of ||T(x_{k_1}, ..., x_{k_m})||^p )^(1/p).

    Exact enumeration; the leading index is partitioned into chunks and
    each chunk is reduced with exact (Shewchuk) summation, so the value
    is independent of the partitioning.
    """
    if p <= 0:
        raise DomainError(f"power sum requires p > 0, got {p}")
    families = list(families)
    n = _check_families(t, families)
    m = t.arity
    if float(n) ** m > tuple_budget:
        raise BudgetError(f"{n}^{m} tuples exceed the budget of {tuple_budget}")

    d_out = t.codomain.dimension
    if isinstance(t.body, DiagonalC0):
        # per-tuple sup norm of the outer product = product of row maxima;
        # the n^m-dimensional output never gets materialized
        maxima = [np.abs(fam.matrix).max(axis=1) for fam in families]
        tail = None
        for vec in maxima[1:]:
            tail = vec if tail is None else np.multiply.outer(tail, vec)

        def chunk_sum(lo: int, hi: int) -> float:
            block = maxima[0][lo:hi]
            if tail is not None:
                block = np.multiply.outer(block, tail)
            return math.fsum((block**p).ravel().tolist())

        per_tuple = max(1, n ** (m - 1))
    else:
        mats = [fam.matrix for fam in families]
        subs = [f"{_TUP_LETTERS[i]}{_DOM_LETTERS[i]}" for i in range(m)]
        expr = ",".join(subs + ["".join(_DOM_LETTERS[:m]) + "o"]) + "->" + "".join(_TUP_LETTERS[:m]) + "o"

        def chunk_sum(lo: int, hi: int) -> float:
            block = np.einsum(expr, mats[0][lo:hi], *mats[1:], t.body.coefficients, optimize=True)
            norms = coord_norm(t.codomain, block, axis=-1)
            return math.fsum((norms**p).ravel().tolist())

        per_tuple = max(1, n ** (m - 1) * d_out)

    block_rows = max(1, _CHUNK_ELEMS // per_tuple)
    ranges = list(_leading_chunks(n, block_rows))
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(lambda r: chunk_sum(*r), ranges))
    else:
        partials = [chunk_sum(lo, hi) for lo, hi in ranges]
    return math.fsum(partials) ** (1.0 / p)


def poly_power_sum(
    p_map: HomogeneousPolynomial,
    family: VectorFamily,
    p: float,
    *,
    tuple_budget: int = DEFAULT_TUPLE_BUDGET,
) -> float:
    """( sum_k ||P(x_k)||^p )^(1/p) over the n family members."""
    if p <= 0:
        raise DomainError(f"power sum requires p > 0, got {p}")
    if family.space != p_map.domain:
        raise StructuralError(f"family in {family.space} does not match domain {p_map.domain}")
    if family.n > tuple_budget:
        raise BudgetError(f"{family.n} terms exceed the budget of {tuple_budget}")
    outputs = _poly_outputs(p_map, family.matrix)
    norms = np.atleast_1d(coord_norm(p_map.codomain, outputs, axis=-1))
    return math.fsum((norms**p).tolist()) ** (1.0 / p)


# ---------------------------------------------------------------------------
# operator norms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OperatorNormResult:
    """Operator-norm estimate with the maximizing input(s) found.

    exact=True only on closed-form paths; searched values are certified
    lower bounds of the true supremum.
    """

    value: float
    certificate: tuple[Vector, ...]
    exact: bool


def _norming_rows(space: SpaceDescriptor, rows: np.ndarray) -> np.ndarray:
    """Row-wise norming-functional coordinates (zero rows get e_1)."""
    out = np.zeros_like(rows)
    norms = np.atleast_1d(coord_norm(space, rows, axis=1)).astype(float)
    dead = norms == 0.0
    if space.is_sup:
        idx = np.argmax(np.abs(rows), axis=1)
        out[np.arange(rows.shape[0]), idx] = np.where(rows[np.arange(rows.shape[0]), idx] >= 0, 1.0, -1.0)
    elif space.exponent == 1.0:
        out = np.sign(rows)
    else:
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.sign(rows) * (np.abs(rows) / np.where(norms == 0.0, 1.0, norms)[:, None]) ** (
                space.exponent - 1.0
            )
    out[dead] = 0.0
    out[dead, 0] = 1.0
    return out


def _linear_argmax_rows(space: SpaceDescriptor, c: np.ndarray) -> np.ndarray:
    """Row-wise unit vectors maximizing <c_r, x> over the unit ball."""
    out = np.empty_like(c)
    for r in range(c.shape[0]):
        out[r] = linear_argmax(space, c[r])
    return out


def _unit_rows(space: SpaceDescriptor, rows: np.ndarray) -> np.ndarray:
    norms = np.atleast_1d(coord_norm(space, rows, axis=1)).astype(float)
    dead = norms == 0.0
    if np.any(dead):
        rows = rows.copy()
        rows[dead] = 0.0
        rows[dead, 0] = 1.0
        norms = np.atleast_1d(coord_norm(space, rows, axis=1)).astype(float)
    return rows / norms[:, None]


def _sphere_starts(space: SpaceDescriptor, count: int, seed: int, offset: int = 0) -> np.ndarray:
    d = space.dimension
    rows = np.zeros((count, d))
    n_basis = min(count, d)
    for r in range(n_basis):
        rows[r, (r + offset) % d] = 1.0
    if count > n_basis:
        rows[n_basis:] = quasi_random_directions(count - n_basis, d, seed)
    return _unit_rows(space, rows)


def _batch_multilinear_outputs(t: MultilinearMap, xs: list[np.ndarray]) -> np.ndarray:
    m = t.arity
    subs = [f"r{_DOM_LETTERS[i]}" for i in range(m)]
    expr = ",".join(subs + ["".join(_DOM_LETTERS[:m]) + "o"]) + "->ro"
    return np.einsum(expr, *xs, t.body.coefficients, optimize=True)


def _batch_slot_coefficients(t: MultilinearMap, xs: list[np.ndarray], slot: int, u: np.ndarray) -> np.ndarray:
    m = t.arity
    subs = [f"r{_DOM_LETTERS[i]}" for i in range(m) if i != slot]
    expr = ",".join(subs + ["".join(_DOM_LETTERS[:m]) + "o", "ro"]) + f"->r{_DOM_LETTERS[slot]}"
    mats = [xs[i] for i in range(m) if i != slot]
    return np.einsum(expr, *mats, t.body.coefficients, u, optimize=True)


def _search_multilinear_norm(t: MultilinearMap, budget: SearchBudget) -> OperatorNormResult:
    seed = derive_seed(budget.seed, "operator_norm", t.fingerprint())
    r = budget.restarts
    xs = [_sphere_starts(s, r, derive_seed(seed, f"slot{i}"), offset=i) for i, s in enumerate(t.domain)]
    y = _batch_multilinear_outputs(t, xs)
    f = np.atleast_1d(coord_norm(t.codomain, y, axis=1)).astype(float)
    best_prev = float(f.max())
    stall = 0
    for _ in range(budget.max_iter):
        u = _norming_rows(t.codomain, y)
        for i in range(t.arity):
            c = _batch_slot_coefficients(t, xs, i, u)
            xs[i] = _linear_argmax_rows(t.domain[i], c)
        y = _batch_multilinear_outputs(t, xs)
        f = np.atleast_1d(coord_norm(t.codomain, y, axis=1)).astype(float)
        best = float(f.max())
        if best <= best_prev * (1.0 + budget.rel_tol):
            stall += 1
        else:
            stall = 0
        best_prev = best
        if stall >= 2:
            break
    i = int(np.argmax(f))
    cert = tuple(Vector(s, xs[j][i]) for j, s in enumerate(t.domain))
    return OperatorNormResult(float(f[i]), cert, exact=False)


def _batch_poly_gradients(p: HomogeneousPolynomial, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    body = p.body
    m = p.degree
    if isinstance(body, DenseSymmetric):
        grad = np.zeros_like(x)
        for slot in range(m):
            subs = [f"r{_DOM_LETTERS[i]}" for i in range(m) if i != slot]
            expr = ",".join(subs + ["".join(_DOM_LETTERS[:m]) + "o", "ro"]) + f"->r{_DOM_LETTERS[slot]}"
            mats = [x] * (m - 1)
            grad += np.einsum(expr, *mats, body.coefficients, u, optimize=True)
        return grad
    g = x @ body.functionals.T
    if isinstance(body, CotypeWitnessBody):
        tau = u @ body.targets.T
    else:
        tau = u[:, :1]
    coef = body.weights * m * g ** (m - 1) * tau
    return coef @ body.functionals


def _search_polynomial_norm(p: HomogeneousPolynomial, budget: SearchBudget) -> OperatorNormResult:
    seed = derive_seed(budget.seed, "operator_norm", p.fingerprint())
    x = _sphere_starts(p.domain, budget.restarts, seed)
    y = _poly_outputs(p, x)
    f = np.atleast_1d(coord_norm(p.codomain, y, axis=1)).astype(float)
    step = np.full(x.shape[0], 1.0)
    best_prev = float(f.max())
    stall = 0
    for _ in range(budget.max_iter):
        u = _norming_rows(p.codomain, y)
        g = _batch_poly_gradients(p, x, u)
        gn = np.linalg.norm(g, axis=1)
        gn[gn == 0.0] = 1.0
        trial = _unit_rows(p.domain, x + (step / gn)[:, None] * g)
        ft = np.atleast_1d(coord_norm(p.codomain, _poly_outputs(p, trial), axis=1)).astype(float)
        improved = ft > f
        x[improved] = trial[improved]
        f[improved] = ft[improved]
        step[~improved] *= 0.5
        y = _poly_outputs(p, x)
        best = float(f.max())
        if best <= best_prev * (1.0 + budget.rel_tol):
            stall += 1
        else:
            stall = 0
        best_prev = best
        if stall >= 3 or float(step.max()) < 1e-16:
            break
    i = int(np.argmax(f))
    return OperatorNormResult(float(f[i]), (Vector(p.domain, x[i]),), exact=False)


def _basis_vector(space: SpaceDescriptor, index: int, sign: float = 1.0) -> Vector:
    coords = np.zeros(space.dimension)
    coords[index] = sign
    return Vector(space, coords)


def operator_norm(obj, budget: SearchBudget = DEFAULT_BUDGET) -> OperatorNormResult:
    """Operator norm: exact where a closed form exists, else a searched lower bound.

    Closed forms: the diagonal outer-product map (norm exactly 1);
    dense maps whose domains are all l_1 (the sup over products of l_1
    balls is attained at basis tuples); linear maps into sup-norm
    spaces (max dual norm of an output-coordinate functional); and
    linear maps between Hilbert spaces (top singular value).
    """
    if isinstance(obj, HomogeneousPolynomial):
        return _search_polynomial_norm(obj, budget)
    if not isinstance(obj, MultilinearMap):
        raise StructuralError(f"cannot take the operator norm of {type(obj).__name__}")
    t = obj
    if isinstance(t.body, DiagonalC0):
        cert = tuple(_basis_vector(s, 0) for s in t.domain)
        return OperatorNormResult(1.0, cert, exact=True)
    a = t.body.coefficients
    if all(s.family is Family.SEQUENCE_LP and s.exponent == 1.0 for s in t.domain):
        entry_norms = np.atleast_1d(coord_norm(t.codomain, a, axis=-1))
        flat = int(np.argmax(entry_norms))
        idx = np.unravel_index(flat, entry_norms.shape) if entry_norms.ndim else ()
        cert = tuple(_basis_vector(s, idx[i]) for i, s in enumerate(t.domain))
        return OperatorNormResult(float(entry_norms.ravel()[flat]), cert, exact=True)
    if t.arity == 1:
        dom = t.domain[0]
        if t.codomain.is_sup:
            colnorms = np.atleast_1d(dual_coord_norm(dom, a.T, axis=1))
            o = int(np.argmax(colnorms))
            cert = (Vector(dom, linear_argmax(dom, a[:, o])),)
            return OperatorNormResult(float(colnorms[o]), cert, exact=True)
        if dom.family is Family.SEQUENCE_LP and dom.exponent == 2.0 and not t.codomain.is_sup and t.codomain.exponent == 2.0:
            u_mat, svals, _ = np.linalg.svd(a, full_matrices=False)
            return OperatorNormResult(float(svals[0]), (Vector(dom, u_mat[:, 0]),), exact=True)
    return _search_multilinear_norm(t, budget)


# ---------------------------------------------------------------------------
# dense tensor containers
# ---------------------------------------------------------------------------


def dense_container_to_array(obj: dict) -> np.ndarray:
    """Decode {shape, row-major float64 payload} (list or base64) to an array."""
    try:
        shape = tuple(int(s) for s in obj["shape"])
    except (KeyError, TypeError, ValueError) as exc:
        raise StructuralError(f"bad dense container: {exc}") from exc
    if "data_b64" in obj:
        raw = base64.b64decode(obj["data_b64"])
        flat = np.frombuffer(raw, dtype="<f8")
    elif "data" in obj:
        flat = np.asarray(obj["data"], dtype=float)
    else:
        raise StructuralError("dense container needs 'data' or 'data_b64'")
    if flat.size != int(np.prod(shape)):
        raise StructuralError(f"payload of {flat.size} values does not fill shape {shape}")
    return flat.reshape(shape)


def array_to_dense_container(arr: np.ndarray, binary: bool = False) -> dict:
    a = np.ascontiguousarray(arr, dtype="<f8")
    if binary:
        return {"shape": list(a.shape), "data_b64": base64.b64encode(a.tobytes()).decode("ascii")}
    return {"shape": list(a.shape), "data": a.ravel().tolist()}


def load_dense_container(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return dense_container_to_array(json.load(fh))
