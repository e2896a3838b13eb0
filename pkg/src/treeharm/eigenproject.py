"""Constructive projection machinery: confluent-Vandermonde interpolation
polynomials, partition-of-unity eigenprojections, radial generalized
eigenbases, and polynomial-growth probes.

Given distinct targets A_1..A_j and an order N, the polynomial P_i of degree
<= jN-1 is pinned by P_i(A_i) = 1 and vanishing of P_i and its first N-1
derivatives at every node (value excluded at A_i itself).  Applying P_i to a
multiplier then projects onto the generalized eigenspace of A_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P

from .errors import (
    DegenerateError,
    DistinctnessError,
    IllConditionedError,
    ParameterError,
    TruncationError,
    UnsupportedOrderError,
)
from .multipliers import MultiplierOperator
from .spectral import conjugate_index, phi_deriv_profile
from .transforms import RadialFunction, VertexFunction

MAX_SYSTEM_SIZE = 64
CONDITION_CUTOFF = 1e12
MIN_NODE_SEPARATION = 1e-10


@dataclass(frozen=True)
class ProjectionPolynomial:
    """Interpolation polynomial P_i for target node `index` (0-based)."""

    coeffs: np.ndarray          # ascending, in the original z variable
    nodes: np.ndarray           # A_1..A_j
    index: int
    order: int                  # N
    condition_number: float

    def value(self, w) -> complex | np.ndarray:
        out = P.polyval(np.asarray(w, dtype=complex), self.coeffs)
        return out[()] if np.ndim(out) == 0 else out

    def deriv_value(self, w, m: int) -> complex | np.ndarray:
        out = P.polyval(np.asarray(w, dtype=complex), P.polyder(self.coeffs, m))
        return out[()] if np.ndim(out) == 0 else out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def _check_nodes(nodes: np.ndarray, order: int, index: int) -> None:
    j = len(nodes)
    if order < 1:
        raise ParameterError(f"order N must be >= 1, got {order}")
    if not 0 <= index < j:
        raise ParameterError(f"target index {index} outside [0, {j})")
    if j * order > MAX_SYSTEM_SIZE:
        raise ParameterError(
            f"system size jN = {j * order} exceeds supported {MAX_SYSTEM_SIZE}")
    if j > 1:
        sep = min(abs(nodes[a] - nodes[b])
                  for a in range(j) for b in range(a + 1, j))
        if sep <= MIN_NODE_SEPARATION:
            raise DistinctnessError(
                f"nodes must be pairwise distinct; min separation {sep:.3e}")


def confluent_vandermonde_solve(nodes, order: int, index: int) -> ProjectionPolynomial:
    """Solve the jN x jN confluent-Vandermonde system for P_index.

    Nodes are centered and scaled before building the matrix (raw
    Vandermonde conditioning is catastrophic for clustered nodes); the
    condition number of the scaled system is reported and capped.
    """
    a = np.asarray(nodes, dtype=complex)
    _check_nodes(a, order, index)
    j = len(a)
    size = j * order
    mu = a.mean()
    scale = float(np.max(np.abs(a - mu)))
    if scale == 0.0:
        scale = 1.0
    b = (a - mu) / scale

    mat = np.zeros((size, size), dtype=complex)
    rhs = np.zeros(size, dtype=complex)
    for m in range(order):
        for k in range(j):
            row = m * j + k
            for col in range(m, size):
                fall = math.perm(col, m)
                mat[row, col] = fall * b[k] ** (col - m)
    rhs[index] = 1.0

    cond = float(np.linalg.cond(mat))
    if cond > CONDITION_CUTOFF:
        raise IllConditionedError(
            f"confluent Vandermonde condition number {cond:.3e} exceeds "
            f"{CONDITION_CUTOFF:.0e}; nodes too clustered", condition_number=cond)
    coef_w = np.linalg.solve(mat, rhs)
    # transform back: P(z) = P_w((z - mu)/scale)
    poly_z = Polynomial(coef_w)(Polynomial([-mu / scale, 1.0 / scale]))
    coeffs = np.zeros(size, dtype=complex)
    coeffs[: len(poly_z.coef)] = poly_z.coef
    return ProjectionPolynomial(coeffs=coeffs, nodes=a, index=index,
                                order=order, condition_number=cond)


def q_factor(nodes, order: int, index: int) -> complex:
    """Residual factor Q_i(A_i) = prod_{k != i} (A_i - A_k)^{-N}."""
    a = np.asarray(nodes, dtype=complex)
    _check_nodes(a, order, index)
    acc = 1.0 + 0.0j
    for k in range(len(a)):
        if k != index:
            acc *= (a[index] - a[k]) ** (-order)
    return acc


def q_factor_from_polynomial(pp: ProjectionPolynomial) -> complex:
    """Deflate P_i by prod_{k != i} (z - A_k)^N and evaluate at A_i.

    Consistency oracle for q_factor: deflation of the solved polynomial must
    reproduce the closed-form product.
    """
    divisor = np.array([1.0 + 0j])
    for k, node in enumerate(pp.nodes):
        if k == pp.index:
            continue
        for _ in range(pp.order):
            divisor = P.polymul(divisor, np.array([-node, 1.0], dtype=complex))
    quot, rem = P.polydiv(pp.coeffs, divisor)
    if np.max(np.abs(rem)) > 1e-6 * max(1.0, float(np.max(np.abs(pp.coeffs)))):
        raise DegenerateError("projection polynomial failed exact deflation")
    return complex(P.polyval(pp.nodes[pp.index], quot))


def partition_of_unity_defect(nodes, order: int) -> float:
    """Max coefficient of |sum_i P_i - 1|; zero in exact arithmetic."""
    a = np.asarray(nodes, dtype=complex)
    total = np.zeros(len(a) * order, dtype=complex)
    for i in range(len(a)):
        total += confluent_vandermonde_solve(a, order, i).coeffs
    total[0] -= 1.0
    return float(np.max(np.abs(total)))


@dataclass
class EigenDecomposition:
    """Components f_i = P_i(Lambda) f with their residual diagnostics."""

    components: list[VertexFunction]
    eigenvalues: np.ndarray
    order: int
    residuals: list[float] | None
    reconstruction_error: float
    residuals_skipped: bool = False
    meta: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "eigenvalues": [[v.real, v.imag] for v in self.eigenvalues],
            "order": self.order,
            "residuals": self.residuals,
            "residuals_skipped": self.residuals_skipped,
            "reconstruction_error": self.reconstruction_error,
            "meta": self.meta,
        }


def _apply_poly_in_op(op: MultiplierOperator, coeffs: np.ndarray,
                      f: VertexFunction) -> VertexFunction:
    """Horner evaluation of a polynomial in an arbitrary multiplier."""
    acc = f * coeffs[-1]
    for k in range(len(coeffs) - 2, -1, -1):
        acc = op.apply(acc) + f * coeffs[k]
    return acc


def eigen_decompose(f: VertexFunction, op: MultiplierOperator, nodes,
                    order: int = 1, compute_residuals: bool | None = None
                    ) -> EigenDecomposition:
    """Split f into generalized eigencomponents of op at the given values.

    Components always satisfy the partition of unity sum_i f_i = f up to
    roundoff.  Residuals ||(op - A_i)^order f_i|| cost another order *
    level_cost levels of validity; with compute_residuals=None they are
    computed exactly when slack allows and skipped (flagged) otherwise.
    """
    a = np.asarray(nodes, dtype=complex)
    j = len(a)
    degree = j * order - 1
    slack_needed = degree * op.level_cost
    if f.valid_radius - slack_needed < 0:
        raise TruncationError(
            f"decomposition needs {slack_needed} levels of slack "
            f"(degree {degree} x cost {op.level_cost}); only {f.valid_radius} valid")
    resid_cost = order * op.level_cost
    if compute_residuals is None:
        compute_residuals = f.valid_radius - slack_needed - resid_cost >= 0

    comps = []
    conds = []
    for i in range(j):
        pp = confluent_vandermonde_solve(a, order, i)
        comps.append(_apply_poly_in_op(op, pp.coeffs, f))
        conds.append(pp.condition_number)

    total = comps[0]
    for c in comps[1:]:
        total = total + c
    recon = (total - f).sup_norm()

    residuals = None
    skipped = not compute_residuals
    if compute_residuals:
        residuals = []
        for i, comp in enumerate(comps):
            anni = comp
            for _ in range(order):
                anni = op.apply(anni) - anni * a[i]
            residuals.append(anni.sup_norm())
    return EigenDecomposition(
        components=comps, eigenvalues=a, order=order, residuals=residuals,
        reconstruction_error=recon, residuals_skipped=skipped,
        meta={"condition_numbers": conds, "operator": op.name,
              "slack_used": slack_needed})


def generalized_eigen_basis(q: int, z0: complex, n_orders: int,
                            radius: int) -> list[RadialFunction]:
    """Radial generalized eigenbasis D^m phi_z |_{z0}, m = 0..n_orders-1.

    The m-th element is annihilated by (L - gamma(z0))^{m+1} but not by the
    m-th power: the annihilation ladder is strict.
    """
    if n_orders < 1:
        raise ParameterError(f"need at least one basis element, got {n_orders}")
    if n_orders > 8:
        raise UnsupportedOrderError(
            f"basis order {n_orders} beyond supported maximum 8")
    table = phi_deriv_profile(q, z0, radius, n_orders - 1)
    return [RadialFunction(q, table[m].copy(), {"deriv_order": m, "z0": z0})
            for m in range(n_orders)]


@dataclass(frozen=True)
class GrowthReport:
    slope: float
    intercept: float
    r_squared: float
    n_window: tuple[int, int]
    p: float

    def to_json_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "r_squared": self.r_squared, "n_window": list(self.n_window),
                "p": self.p}


def growth_order_probe(f: RadialFunction, p: float,
                       min_radius: int = 12) -> GrowthReport:
    """Fit log(|f(n)| q^{n/p'}) against log n over n in [support/2, support].

    The fitted slope estimates the polynomial growth order k of f relative
    to the boundary decay q^{-n/p'}; k >= 1 certifies departure from
    weak-L^{p'}.
    """
    if f.support < min_radius:
        raise ParameterError(
            f"growth probe needs support >= {min_radius}, got {f.support}")
    if not np.any(f.values):
        raise DegenerateError("growth probe on identically zero input")
    pp = conjugate_index(p)
    ns = np.arange(f.support // 2, f.support + 1)
    weights = np.abs(f.values[ns])
    if pp != math.inf:
        weights = weights * np.exp(math.log(f.q) * ns / pp)
    mask = weights > 0
    if mask.sum() < 2:
        raise DegenerateError("growth probe window collapsed to < 2 points")
    x = np.log(ns[mask].astype(float))
    y = np.log(weights[mask])
    design = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), res, *_ = np.linalg.lstsq(design, y, rcond=None)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(res[0]) if res.size else float(np.sum((y - design @ [slope, intercept]) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return GrowthReport(slope=float(slope), intercept=float(intercept),
                        r_squared=r2,
                        n_window=(int(ns[0]), int(ns[-1])), p=p)
