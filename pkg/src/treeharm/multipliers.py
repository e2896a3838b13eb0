"""Concrete radial-multiplier operators on vertex functions: the Laplacian,
sphere/ball averages, polynomials in the Laplacian, the complex-time heat
operator, and inverses of nonvanishing symbols.

Every application records its truncation cost: one Laplacian stencil eats
one level of validity, a kernel of support s eats s levels.  Operators are
immutable once built and applications are data-parallel over vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import InvertibilityError, ParameterError, TruncationError
from .spectral import (
    SpectralSymbol,
    gamma,
    strip_min_modulus,
    symbol_ball,
    symbol_heat,
    symbol_laplacian,
    symbol_poly,
    symbol_sphere,
)
from .transforms import (
    RadialFunction,
    VertexFunction,
    convolve_radial,
    convolve_radial_profiles,
    sphere_means_stack,
    synthesize_kernel_adaptive,
)
from .tree import TreeGeometry, ball_size, sphere_size


def laplacian_apply(f: VertexFunction) -> VertexFunction:
    """(Lf)(x) = f(x) - mean of f over the neighbors of x.

    The boundary level loses its children to truncation, so validity
    shrinks by one level.
    """
    g = f.geometry
    vals = f.values - g.neighbor_sum(f.values) / (g.q + 1)
    return VertexFunction(g, vals, valid_radius=f.valid_radius - 1)


def laplacian_radial(rf: RadialFunction) -> RadialFunction:
    """Laplacian of a truncated radial profile; the last entry is dropped
    (its stencil would need data beyond the profile).  Identical to the
    vertex stencil on radial inputs: the root sees q+1 children, every other
    level one parent and q children."""
    q = rf.q
    n = rf.support
    v = rf.values
    if n == 0:
        raise ParameterError("radial Laplacian needs support >= 1")
    out = np.zeros(n, dtype=complex)
    out[0] = v[0] - v[1]
    inner = np.arange(1, n)
    out[inner] = v[inner] - (v[inner - 1] + q * v[inner + 1]) / (q + 1)
    return RadialFunction(q, out)


def laplacian_radial_extend(rf: RadialFunction) -> RadialFunction:
    """Laplacian of a finitely supported radial profile, exact on the
    infinite tree: support grows by one level."""
    q = rf.q
    v = np.concatenate([rf.values, [0.0, 0.0]])
    n = rf.support + 1
    out = np.zeros(n + 1, dtype=complex)
    out[0] = v[0] - v[1]
    inner = np.arange(1, n + 1)
    out[inner] = v[inner] - (v[inner - 1] + q * v[inner + 1]) / (q + 1)
    return RadialFunction(q, out)


def sphere_avg(f: VertexFunction, n: int) -> VertexFunction:
    """Average over S(x, n) via the three-term recursion (fast path)."""
    if n < 0:
        raise ParameterError(f"sphere radius must be >= 0, got {n}")
    g = f.geometry
    stack = sphere_means_stack(g, f.values, n)
    return VertexFunction(g, stack[n], valid_radius=f.valid_radius - n)


def sphere_avg_direct(f: VertexFunction, n: int) -> VertexFunction:
    """Average over S(x, n) by BFS enumeration; oracle for small trees."""
    g = f.geometry
    out = np.full(g.n_vertices, np.nan + 0j)
    for x in range(g.n_vertices):
        if g.level(x) + n <= g.R:
            sph = g.sphere_around(x, n)
            out[x] = f.values[sph].mean()
        else:
            out[x] = 0.0
    return VertexFunction(g, out, valid_radius=f.valid_radius - n)


def ball_avg(f: VertexFunction, n: int) -> VertexFunction:
    """Average over B(x, n) = sphere-size weighted mean of S_j f, j <= n."""
    if n < 0:
        raise ParameterError(f"ball radius must be >= 0, got {n}")
    g = f.geometry
    stack = sphere_means_stack(g, f.values, n)
    sizes = np.array([sphere_size(g.q, j) for j in range(n + 1)], dtype=float)
    vals = (sizes[:, None] * stack).sum(axis=0) / ball_size(g.q, n)
    return VertexFunction(g, vals, valid_radius=f.valid_radius - n)


def psi_of_L_apply(coeffs, f: VertexFunction) -> VertexFunction:
    """Horner evaluation of a polynomial in the Laplacian applied to f."""
    c = np.asarray(coeffs, dtype=complex)
    degree = len(c) - 1
    if f.valid_radius - degree < 0:
        raise TruncationError(
            f"polynomial degree {degree} exceeds available boundary slack "
            f"{f.valid_radius}; increase R")
    if degree == 0:
        return f * c[0]
    acc = f * c[-1]
    for k in range(degree - 1, -1, -1):
        acc = laplacian_apply(acc) + f * c[k]
    return acc


def heat_taylor_order(xi: complex, tol: float) -> int:
    """Smallest M with exp(2|xi|) (2|xi|)^{M+1} / (M+1)! below tol.

    Uses the operator bound ||L|| <= 2 (the symbol maps S_1 into the closed
    disk of radius 2, attained at tau/2 - i/2).
    """
    r = 2.0 * abs(xi)
    bound = math.exp(r)
    term = 1.0
    m = 0
    while True:
        term = term * r / (m + 1)
        if bound * term < tol:
            return m
        m += 1
        if m > 400:
            raise ParameterError(f"heat Taylor order diverged for xi={xi}")


def heat_apply(xi: complex, f: VertexFunction, tol: float = 1e-10) -> VertexFunction:
    """exp(xi L) f by adaptive Taylor truncation in powers of L."""
    if xi == 0:
        raise ParameterError("heat time xi must be nonzero")
    m_order = heat_taylor_order(xi, tol)
    if f.valid_radius - m_order < 0:
        raise TruncationError(
            f"heat Taylor order {m_order} exceeds boundary slack {f.valid_radius}; "
            f"increase R or loosen tol")
    acc = f.copy()
    term = f
    for m in range(1, m_order + 1):
        term = laplacian_apply(term) * (xi / m)
        acc = acc + term
    acc.meta["taylor_order"] = m_order
    acc.meta["taylor_tol"] = tol
    return acc


# ---------------------------------------------------------------------------
# operator objects
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiplierOperator:
    """A radial multiplier: how to apply it, its symbol, and its level cost.

    kind is "polynomial" (exact repeated stencils) or "kernel" (synthesized
    radial kernel with a recorded residual); every operator knows which path
    produced it so tests can budget error accordingly.
    """

    q: int
    name: str
    kind: str
    symbol: SpectralSymbol
    level_cost: int
    poly_coeffs: np.ndarray | None = None
    kernel: RadialFunction | None = None
    apply_fn: Callable[[VertexFunction], VertexFunction] | None = field(
        default=None, repr=False)

    def apply(self, f: VertexFunction) -> VertexFunction:
        if f.valid_radius - self.level_cost < 0:
            raise TruncationError(
                f"operator {self.name} costs {self.level_cost} levels; "
                f"only {f.valid_radius} valid levels remain")
        if self.apply_fn is not None:
            return self.apply_fn(f)
        if self.kind == "polynomial":
            return psi_of_L_apply(self.poly_coeffs, f)
        return convolve_radial(f, self.kernel)

    def apply_radial(self, rf: RadialFunction) -> RadialFunction:
        """Action on finitely supported radial profiles, exact on the
        infinite tree (the support grows by the operator's level cost)."""
        if self.kind == "polynomial":
            c = self.poly_coeffs
            acc = RadialFunction(self.q, c[-1] * rf.values)
            for k in range(len(c) - 2, -1, -1):
                lap = laplacian_radial_extend(acc)
                term = np.zeros(lap.support + 1, dtype=complex)
                term[: rf.support + 1] = c[k] * rf.values
                acc = RadialFunction(self.q, lap.values + term)
            return acc
        return convolve_radial_profiles(rf, self.kernel)

    def to_json_dict(self) -> dict:
        out = {"kind": self.kind, "name": self.name, "q": self.q,
               "valid_radius_cost": self.level_cost}
        if self.poly_coeffs is not None:
            out["coefficients"] = [[c.real, c.imag] for c in self.poly_coeffs]
        if self.kernel is not None:
            out["kernel"] = [[c.real, c.imag] for c in self.kernel.values]
            out["synthesis"] = self.kernel.meta.get("synthesis")
        t = np.linspace(0.0, math.pi / math.log(self.q), 9)
        out["symbol_samples"] = [[float(z.real), float(z.imag)]
                                 for z in np.atleast_1d(self.symbol(t))]
        return out


def identity_op(q: int) -> MultiplierOperator:
    return MultiplierOperator(
        q=q, name="identity", kind="polynomial",
        symbol=symbol_poly(q, [1.0]), level_cost=0,
        poly_coeffs=np.array([1.0 + 0j]))


def laplacian_op(q: int) -> MultiplierOperator:
    return MultiplierOperator(
        q=q, name="laplacian", kind="polynomial",
        symbol=symbol_laplacian(q), level_cost=1,
        poly_coeffs=np.array([0.0, 1.0], dtype=complex))


def _sphere_poly(q: int, n: int) -> np.ndarray:
    """Coefficients (in L) of the sphere-average operator S_n."""
    p0 = np.array([1.0], dtype=complex)
    if n == 0:
        return p0
    p1 = np.array([1.0, -1.0], dtype=complex)   # S_1 = I - L
    if n == 1:
        return p1
    prev, cur = p0, p1
    for _ in range(2, n + 1):
        prev, cur = cur, P.polysub((q + 1) / q * P.polymul(p1, cur), prev / q)
    return cur


def sphere_avg_op(q: int, n: int) -> MultiplierOperator:
    return MultiplierOperator(
        q=q, name=f"sphere_avg[{n}]", kind="polynomial",
        symbol=symbol_sphere(q, n), level_cost=n,
        poly_coeffs=_sphere_poly(q, n),
        apply_fn=lambda f: sphere_avg(f, n))


def ball_avg_op(q: int, n: int) -> MultiplierOperator:
    sizes = np.array([sphere_size(q, j) for j in range(n + 1)], dtype=float)
    coeffs = np.zeros(n + 1, dtype=complex)
    for j in range(n + 1):
        pj = _sphere_poly(q, j)
        coeffs[: j + 1] += sizes[j] * pj
    coeffs /= ball_size(q, n)
    return MultiplierOperator(
        q=q, name=f"ball_avg[{n}]", kind="polynomial",
        symbol=symbol_ball(q, n), level_cost=n,
        poly_coeffs=coeffs,
        apply_fn=lambda f: ball_avg(f, n))


def psi_of_L_op(q: int, coeffs) -> MultiplierOperator:
    c = np.asarray(coeffs, dtype=complex)
    return MultiplierOperator(
        q=q, name="poly(L)", kind="polynomial",
        symbol=symbol_poly(q, c), level_cost=len(c) - 1,
        poly_coeffs=c)


def heat_op(q: int, xi: complex, tol: float = 1e-10) -> MultiplierOperator:
    m_order = heat_taylor_order(xi, tol)
    return MultiplierOperator(
        q=q, name=f"heat[{xi}]", kind="polynomial",
        symbol=symbol_heat(q, xi), level_cost=m_order,
        poly_coeffs=np.array([xi**m / math.factorial(m) for m in range(m_order + 1)],
                             dtype=complex),
        apply_fn=lambda f: heat_apply(xi, f, tol))


def kernel_op(kernel: RadialFunction, symbol: SpectralSymbol | None = None,
              name: str = "kernel") -> MultiplierOperator:
    from .transforms import spherical_ft

    sym = symbol if symbol is not None else SpectralSymbol(
        q=kernel.q, func=lambda z: spherical_ft(kernel, z), name=name)
    return MultiplierOperator(
        q=kernel.q, name=name, kind="kernel", symbol=sym,
        level_cost=kernel.support, kernel=kernel)


#: symbols below this modulus anywhere on the strip are treated as vanishing
MIN_SYMBOL_MODULUS = 1e-6


def invert_multiplier(op: MultiplierOperator, p: float,
                      support: int = 48, tol: float = 1e-8) -> MultiplierOperator:
    """Inverse multiplier with symbol 1/kappa, realized by kernel synthesis.

    The nonvanishing hypothesis is checked on a grid over the whole closed
    strip (interior zeros, e.g. of the averaging symbols on the real axis,
    must be caught; the boundary alone would miss them).
    """
    min_mod, argmin = strip_min_modulus(op.symbol, p)
    if min_mod <= MIN_SYMBOL_MODULUS:
        raise InvertibilityError(
            f"symbol {op.symbol.name} has modulus {min_mod:.3e} at z={argmin}; "
            f"no inverse multiplier on S_p", min_modulus=min_mod, argmin=argmin)
    inv_sym = SpectralSymbol(
        q=op.q, func=lambda z: 1.0 / np.asarray(op.symbol(z), dtype=complex),
        name=f"inv({op.symbol.name})", nonvanishing=True)
    kern, report = synthesize_kernel_adaptive(inv_sym, p, tol=tol,
                                              max_support=support)
    out = kernel_op(kern, symbol=inv_sym, name=f"inv({op.name})")
    kern.meta["inverse_of"] = op.name
    return out


def eigen_transport_residual(op: MultiplierOperator, f: VertexFunction,
                             kappa: complex) -> float:
    """Relative sup residual of op(f) - kappa f on the valid region."""
    out = op.apply(f)
    diff = out - f * kappa
    denom = f.sup_norm(diff.valid_radius)
    if denom == 0 or math.isnan(denom):
        return math.nan
    return diff.sup_norm() / denom
