"""Spectral objects on the strip: gamma, the c-function, spherical function
values and z-derivatives, averaging and heat symbols, and boundary extrema.

Every function here is a pure function of its arguments and accepts numpy
arrays for the spectral variable z wherever that makes sense.  All spectral
objects are even and tau-periodic in z with tau = 2 pi / log q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    DegenerateError,
    EvaluationError,
    ParameterError,
    SingularityError,
    UnsupportedOrderError,
)
from .tree import ball_size, sphere_size

#: largest supported z-derivative order (roundoff accumulates beyond this)
MAX_DERIV_ORDER = 8


def tau(q: int) -> float:
    """Common period 2 pi / log q of all symbols in z."""
    return 2.0 * math.pi / math.log(q)


def delta(p: float) -> float:
    """The index 1/p - 1/2, with the conventions delta_1 = -delta_inf = 1/2."""
    if p == math.inf:
        return -0.5
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    return 1.0 / p - 0.5


def conjugate_index(p: float) -> float:
    if p == 1:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class StripParams:
    """Derived constants of the strip S_p for a fixed (p, q)."""

    p: float
    q: int

    def __post_init__(self):
        if not 1 <= self.p < 2:
            raise ParameterError(f"p must lie in [1, 2), got {self.p}")

    @property
    def p_prime(self) -> float:
        return conjugate_index(self.p)

    @property
    def delta_p(self) -> float:
        return delta(self.p)

    @property
    def delta_p_prime(self) -> float:
        return -delta(self.p)

    @property
    def tau(self) -> float:
        return tau(self.q)

    @property
    def half_width(self) -> float:
        """|Im z| bound of S_p."""
        return abs(self.delta_p)


def wrap_alpha(q: int, alpha: float) -> float:
    """Wrap a real spectral angle into the canonical interval (-tau/2, tau/2]."""
    t = tau(q)
    a = math.remainder(alpha, t)
    if a <= -t / 2:
        a += t
    elif a > t / 2:
        a -= t
    return a


def _qpow(q: int, w):
    """q**w for complex scalar or array w."""
    return np.exp(math.log(q) * np.asarray(w, dtype=complex))


# ---------------------------------------------------------------------------
# gamma and the c-function
# ---------------------------------------------------------------------------

def gamma(q: int, z) -> complex | np.ndarray:
    """Laplacian symbol 1 - (q^(1/2+iz) + q^(1/2-iz)) / (q+1); entire in z."""
    z = np.asarray(z, dtype=complex)
    out = 1.0 - (_qpow(q, 0.5 + 1j * z) + _qpow(q, 0.5 - 1j * z)) / (q + 1)
    return out[()] if out.ndim == 0 else out


def gamma_deriv(q: int, z, m: int) -> complex | np.ndarray:
    """m-th z-derivative of gamma (exact)."""
    if m < 0:
        raise ParameterError(f"derivative order must be >= 0, got {m}")
    if m == 0:
        return gamma(q, z)
    z = np.asarray(z, dtype=complex)
    lnq = math.log(q)
    out = -(q**0.5 / (q + 1)) * (1j * lnq) ** m * (
        _qpow(q, 1j * z) + (-1) ** m * _qpow(q, -1j * z)
    )
    return out[()] if out.ndim == 0 else out


def c_func(q: int, z: complex) -> complex:
    """Meromorphic coefficient of the two-exponential expansion of phi_z.

    Defined off (tau/2) Z, where q^{iz} - q^{-iz} vanishes.
    """
    z = complex(z)
    den = _qpow(q, 1j * z) - _qpow(q, -1j * z)
    if abs(den) < 1e-12:
        raise SingularityError(f"c-function evaluated too close to (tau/2)Z: z={z}")
    return complex(
        (q**0.5 / (q + 1)) * (_qpow(q, 0.5 + 1j * z) - _qpow(q, -0.5 - 1j * z)) / den
    )


def _c_deriv_polys(m_max: int, q: int) -> list[np.ndarray]:
    """Coefficient arrays of D^m f as polynomials in f = 1/(q^{2iz} - 1).

    f' = -s (f + f^2) with s = 2 i log q, so each derivative stays a
    polynomial in f.
    """
    s = 2j * math.log(q)
    polys = [np.array([0.0, 1.0], dtype=complex)]
    for _ in range(m_max):
        d = P.polyder(polys[-1])
        polys.append(P.polymul(d, -s * np.array([0.0, 1.0, 1.0], dtype=complex)))
    return polys


def c_deriv(q: int, z: complex, m: int) -> complex:
    """Exact m-th derivative of the c-function via c = q/(q+1) + beta/(q^{2iz}-1)."""
    if m < 0:
        raise ParameterError(f"derivative order must be >= 0, got {m}")
    if m == 0:
        return c_func(q, z)
    w = _qpow(q, 2j * complex(z))
    if abs(w - 1.0) < 1e-12:
        raise SingularityError(f"c-function derivative at a pole: z={z}")
    f = 1.0 / (w - 1.0)
    beta = (q - 1) / (q + 1)
    poly = _c_deriv_polys(m, q)[m]
    return complex(beta * P.polyval(f, poly))


# ---------------------------------------------------------------------------
# spherical function values phi_z(n) and z-derivatives
# ---------------------------------------------------------------------------

def phi_profile(q: int, z, n_max: int) -> np.ndarray:
    """phi_z(n) for n = 0..n_max via the singularity-free three-term recursion.

    phi(0) = 1, phi(1) = 1 - gamma(z),
    phi(n) = (q+1)/q * phi(1) * phi(n-1) - phi(n-2)/q.
    Broadcasts over array z: output shape (n_max+1,) + shape(z).
    """
    if n_max < 0:
        raise ParameterError(f"n_max must be >= 0, got {n_max}")
    z = np.asarray(z, dtype=complex)
    out = np.empty((n_max + 1,) + z.shape, dtype=complex)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 - gamma(q, z)
    for n in range(2, n_max + 1):
        out[n] = (q + 1) / q * out[1] * out[n - 1] - out[n - 2] / q
    return out


def phi(q: int, z, n: int) -> complex | np.ndarray:
    """Value of the spherical function phi_z on the sphere of radius n."""
    if n < 0:
        raise ParameterError(f"sphere radius must be >= 0, got {n}")
    out = phi_profile(q, z, n)[n]
    return out


def phi_closed(q: int, z: complex, n: int) -> complex:
    """Closed-form phi_z(n): c-function expansion off (tau/2)Z, polynomial
    special cases on it.  Validation oracle for the recursion."""
    if n < 0:
        raise ParameterError(f"sphere radius must be >= 0, got {n}")
    z = complex(z)
    t = tau(q)
    k = round(z.real / (t / 2))
    if abs(z.imag) < 1e-14 and abs(z.real - k * t / 2) < 1e-12:
        base = ((q - 1) / (q + 1) * n + 1.0) * q ** (-n / 2)
        return base * ((-1) ** (n * (k % 2)))
    return c_func(q, z) * complex(_qpow(q, (1j * z - 0.5) * n)) + c_func(q, -z) * complex(
        _qpow(q, (-1j * z - 0.5) * n)
    )


def phi_deriv_profile(q: int, z: complex, n_max: int, m_max: int) -> np.ndarray:
    """D^m phi_z(n) for m <= m_max, n <= n_max by differentiating the recursion.

    Returns array of shape (m_max+1, n_max+1).  Exact in the same sense as
    the recursion itself; the Leibniz/c-function path is the cross-check.
    """
    if m_max < 0:
        raise ParameterError(f"derivative order must be >= 0, got {m_max}")
    if m_max > MAX_DERIV_ORDER:
        raise UnsupportedOrderError(
            f"derivative order {m_max} exceeds supported maximum {MAX_DERIV_ORDER}"
        )
    if n_max < 0:
        raise ParameterError(f"n_max must be >= 0, got {n_max}")
    g = np.zeros((m_max + 1, n_max + 1), dtype=complex)
    g[0, 0] = 1.0
    if n_max == 0:
        return g
    g[0, 1] = 1.0 - gamma(q, z)
    for m in range(1, m_max + 1):
        g[m, 1] = -gamma_deriv(q, z, m)
    coef = (q + 1) / q
    binom = [[math.comb(m, k) for k in range(m + 1)] for m in range(m_max + 1)]
    for n in range(2, n_max + 1):
        for m in range(m_max + 1):
            acc = 0.0 + 0.0j
            for k in range(m + 1):
                acc += binom[m][k] * g[k, 1] * g[m - k, n - 1]
            g[m, n] = coef * acc - g[m, n - 2] / q
    return g


def phi_deriv(q: int, z: complex, n: int, m: int) -> complex:
    """m-th z-derivative of phi_z(n) (recursion path)."""
    return complex(phi_deriv_profile(q, z, n, m)[m, n])


def phi_deriv_leibniz(q: int, z: complex, n: int, m: int) -> complex:
    """Validation path: Leibniz expansion of the c-function form of phi_z(n).

    Only valid off (tau/2)Z.  D^j of the composite c(-z) carries the factor
    (-1)^j relative to the plain derivative of c at -z.
    """
    lnq = math.log(q)
    acc = 0.0 + 0.0j
    for j in range(m + 1):
        pre = math.comb(m, j) * (1j * n * lnq) ** j * q ** (-n / 2)
        comp = (-1) ** (m - j) * c_deriv(q, -z, m - j)
        acc += pre * (
            complex(_qpow(q, 1j * z * n)) * c_deriv(q, z, m - j)
            + (-1) ** j * complex(_qpow(q, -1j * z * n)) * comp
        )
    return acc


# ---------------------------------------------------------------------------
# averaging and heat symbols
# ---------------------------------------------------------------------------

def gamma_j(q: int, z, j: int) -> complex | np.ndarray:
    """q^{izj} + q^{-izj}; the elementary bricks of the averaging symbols."""
    if j < 0:
        raise ParameterError(f"j must be >= 0, got {j}")
    z = np.asarray(z, dtype=complex)
    out = _qpow(q, 1j * z * j) + _qpow(q, -1j * z * j)
    return out[()] if out.ndim == 0 else out


def ball_symbol(q: int, z, n: int) -> complex | np.ndarray:
    """Ball-average symbol psi_z(n) = sum_{j<=n} #S(o,j) phi_z(j) / #B(o,n)."""
    if n < 0:
        raise ParameterError(f"ball radius must be >= 0, got {n}")
    prof = phi_profile(q, z, n)
    sizes = np.array([sphere_size(q, j) for j in range(n + 1)], dtype=float)
    shape = (n + 1,) + (1,) * (prof.ndim - 1)
    out = (prof * sizes.reshape(shape)).sum(axis=0) / ball_size(q, n)
    return out[()] if np.ndim(out) == 0 else out


def ball_symbol_closed(q: int, z: complex, n: int) -> complex:
    """Geometric-sum closed form of psi_z(n), valid off (tau/2)Z.

    Uses phi_z(j) = q^{-j/2} [q sin((j+1)th) - sin((j-1)th)] / ((q+1) sin th)
    with th = z log q, and sums the two exponential halves of sin in closed
    form (the a -> 1 limits are the degenerate sums).
    """
    import cmath

    th = complex(z) * math.log(q)
    sin_th = cmath.sin(th)
    if abs(sin_th) < 1e-12:
        raise SingularityError(f"psi closed form at sin(z log q) = 0: z={z}")
    a = q**0.5 * cmath.exp(1j * th)
    b = q**0.5 * cmath.exp(-1j * th)

    def gsum(w: complex) -> complex:
        if abs(w - 1.0) < 1e-9:
            return complex(n)
        return w * (w**n - 1.0) / (w - 1.0)

    s = (
        (q * cmath.exp(1j * th) - cmath.exp(-1j * th)) * gsum(a)
        - (q * cmath.exp(-1j * th) - cmath.exp(1j * th)) * gsum(b)
    ) / 2j
    return (1.0 + s / (q * sin_th)) / ball_size(q, n)


def heat_symbol(q: int, xi: complex, z) -> complex | np.ndarray:
    """Symbol exp(xi * gamma(z)) of the complex-time heat operator."""
    if xi == 0:
        raise ParameterError("heat time xi must be nonzero")
    z = np.asarray(z, dtype=complex)
    out = np.exp(xi * gamma(q, z))
    return out[()] if out.ndim == 0 else out


def phi_cap(q: int, p: float, xi: complex) -> float:
    """Heat-extremum amplitude: the max of Re(xi*gamma) over the boundary
    line exceeds Re(xi) by exactly this amount (and the min falls short of
    it by the same)."""
    if not 1 <= p < 2:
        raise ParameterError(f"p must lie in [1, 2), got {p}")
    if xi == 0:
        raise ParameterError("heat time xi must be nonzero")
    dpp = -delta(p)
    lnq = math.log(q)
    amp = 1.0 - float(np.real(gamma(q, 1j * dpp)))
    return amp * math.sqrt(xi.real**2 + math.tanh(dpp * lnq) ** 2 * xi.imag**2)


def beta_points(q: int, p: float, xi: complex) -> tuple[float, float]:
    """Unique angles (beta1, beta2) in (-tau/2, tau/2] where |exp(xi gamma)|
    attains its max (beta1) and min (beta2) on the boundary line Im z =
    delta_{p'}.

    Solved in the phase variable theta = alpha log q via atan2 of the
    defining cos/sin relations and reported as alpha = theta / log q.
    """
    if xi == 0:
        raise ParameterError("heat time xi must be nonzero")
    cap = phi_cap(q, p, xi)
    if cap <= 0.0:
        raise DegenerateError(f"Phi_p(xi) vanished for q={q}, p={p}, xi={xi}")
    dpp = -delta(p)
    lnq = math.log(q)
    a = 1.0 - float(np.real(gamma(q, 1j * dpp)))
    b = float(np.imag(gamma(q, tau(q) / 4 + 1j * dpp)))
    th1 = math.atan2(-xi.imag * b, -xi.real * a)
    th2 = math.atan2(xi.imag * b, xi.real * a)
    if th1 <= -math.pi:
        th1 += 2 * math.pi
    if th2 <= -math.pi:
        th2 += 2 * math.pi
    return th1 / lnq, th2 / lnq


# ---------------------------------------------------------------------------
# symbols as first-class objects
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralSymbol:
    """Evaluatable symbol kappa(z) with its declared strip contract."""

    q: int
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    name: str = "symbol"
    even: bool = True
    tau_periodic: bool = True
    nonvanishing: bool | None = None
    spec: dict = field(default_factory=dict)

    def __call__(self, z) -> complex | np.ndarray:
        out = np.asarray(self.func(np.asarray(z, dtype=complex)))
        return out[()] if out.ndim == 0 else out

    def check_symmetries(self, z_points, tol: float = 1e-10) -> bool:
        """Verify the declared even / tau-periodic flags at sample points."""
        z = np.asarray(z_points, dtype=complex)
        v = self(z)
        scale = np.maximum(1.0, np.abs(v))
        ok = True
        if self.even:
            ok &= bool(np.all(np.abs(self(-z) - v) <= tol * scale))
        if self.tau_periodic:
            ok &= bool(np.all(np.abs(self(z + tau(self.q)) - v) <= tol * scale))
        return ok


def symbol_laplacian(q: int) -> SpectralSymbol:
    return SpectralSymbol(q=q, func=lambda z: gamma(q, z), name="laplacian",
                          nonvanishing=False, spec={"kind": "laplacian"})


def symbol_sphere(q: int, n: int) -> SpectralSymbol:
    if n < 0:
        raise ParameterError(f"sphere radius must be >= 0, got {n}")
    return SpectralSymbol(q=q, func=lambda z: phi(q, z, n), name=f"sphere_avg[{n}]",
                          nonvanishing=False, spec={"kind": "sphere", "n": n})


def symbol_ball(q: int, n: int) -> SpectralSymbol:
    if n < 0:
        raise ParameterError(f"ball radius must be >= 0, got {n}")
    return SpectralSymbol(q=q, func=lambda z: ball_symbol(q, z, n), name=f"ball_avg[{n}]",
                          nonvanishing=False, spec={"kind": "ball", "n": n})


def symbol_heat(q: int, xi: complex) -> SpectralSymbol:
    if xi == 0:
        raise ParameterError("heat time xi must be nonzero")
    return SpectralSymbol(q=q, func=lambda z: heat_symbol(q, xi, z), name=f"heat[{xi}]",
                          nonvanishing=True,
                          spec={"kind": "heat", "xi": [xi.real, xi.imag]})


def symbol_poly(q: int, coeffs) -> SpectralSymbol:
    """Symbol of a polynomial in the Laplacian: (Psi o gamma)(z)."""
    c = np.asarray(coeffs, dtype=complex)
    return SpectralSymbol(
        q=q, func=lambda z: P.polyval(gamma(q, z), c), name="poly(L)",
        nonvanishing=None,
        spec={"kind": "poly", "coeffs": [[v.real, v.imag] for v in c]},
    )


# ---------------------------------------------------------------------------
# boundary extrema
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtremaReport:
    """Extrema of |kappa| over the boundary line Im z = delta_{p'}."""

    max_mod: float
    argmax: tuple[float, ...]
    min_mod: float
    argmin: tuple[float, ...]
    p: float
    grid_size: int
    symbol: str = "symbol"

    def to_json_dict(self) -> dict:
        return {
            "max_mod": self.max_mod,
            "argmax": list(self.argmax),
            "min_mod": self.min_mod,
            "argmin": list(self.argmin),
            "p": self.p,
            "grid_size": self.grid_size,
            "symbol": self.symbol,
        }


def _golden_section(f: Callable[[float], float], lo: float, hi: float,
                    tol: float = 1e-12, max_iter: int = 200) -> tuple[float, float]:
    """Minimize f on [lo, hi]; returns (argmin, min)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > tol and it < max_iter:
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
        it += 1
    xm = 0.5 * (a + b)
    return xm, f(xm)


def symbol_extrema(sym: SpectralSymbol, p: float, grid_size: int = 4096) -> ExtremaReport:
    """Extrema of |kappa| over {alpha + i delta_{p'} : alpha in (-tau/2, tau/2]}.

    Dense periodic grid plus golden-section refinement of every local
    extremum; the arg sets collect all refined extremizers within 1e-9 of
    the global value, deduplicated at 1e-6 angular separation.
    """
    if not 1 <= p < 2:
        raise ParameterError(f"p must lie in [1, 2), got {p}")
    q = sym.q
    t = tau(q)
    dpp = -delta(p)
    alphas = np.linspace(-t / 2, t / 2, grid_size, endpoint=False) + t / grid_size
    vals = np.abs(sym(alphas + 1j * dpp))
    if not np.all(np.isfinite(vals)):
        raise EvaluationError(f"symbol {sym.name} non-finite on the boundary grid")

    def mod_at(alpha: float) -> float:
        return float(abs(sym(alpha + 1j * dpp)))

    def refine(idx: np.ndarray, sign: float) -> list[tuple[float, float]]:
        step = t / grid_size
        out = []
        for i in idx:
            lo = alphas[i] - step
            hi = alphas[i] + step
            x, fx = _golden_section(lambda a: sign * mod_at(a), lo, hi)
            a = wrap_alpha(q, x)
            # locating a smooth extremum is limited to ~sqrt(eps); snap the
            # period seam to its canonical representative within that band
            if t / 2 - abs(a) < 1e-7 * t:
                a = t / 2
            out.append((a, sign * fx))
        return out

    prev = np.roll(vals, 1)
    nxt = np.roll(vals, -1)
    loc_max = np.where((vals >= prev) & (vals >= nxt))[0]
    loc_min = np.where((vals <= prev) & (vals <= nxt))[0]
    maxima = refine(loc_max, -1.0)
    minima = refine(loc_min, +1.0)
    vmax = max(v for _, v in maxima)
    vmin = min(v for _, v in minima)

    def collect(cands: list[tuple[float, float]], target: float) -> tuple[float, ...]:
        keep = [a for a, v in cands if abs(v - target) <= 1e-9 * max(1.0, abs(target))]
        keep.sort()
        dedup: list[float] = []
        for a in keep:
            if all(_circ_dist(a, b, t) > 1e-6 for b in dedup):
                dedup.append(a)
        return tuple(dedup)

    return ExtremaReport(
        max_mod=vmax, argmax=collect(maxima, vmax),
        min_mod=vmin, argmin=collect(minima, vmin),
        p=p, grid_size=grid_size, symbol=sym.name,
    )


def _circ_dist(a: float, b: float, period: float) -> float:
    d = abs(math.remainder(a - b, period))
    return d


def strip_min_modulus(sym: SpectralSymbol, p: float, n_alpha: int = 1024,
                      n_beta: int = 17) -> tuple[float, complex]:
    """Minimum of |kappa| over the whole closed strip S_p.

    Unlike the boundary extrema (where the maximum always lives, by the
    maximum principle), the minimum can hide at an interior zero, so the
    nonvanishing check must scan interior lines too.  The grid minimum is
    sharpened by coordinate-descent golden sections so that genuine zeros
    are resolved well below any practical vanishing threshold.
    """
    q = sym.q
    t = tau(q)
    hw = abs(delta(p))
    alphas = np.linspace(-t / 2, t / 2, n_alpha, endpoint=False) + t / n_alpha
    betas = np.linspace(-hw, hw, n_beta)
    zg = alphas[None, :] + 1j * betas[:, None]
    vals = np.abs(sym(zg))
    if not np.all(np.isfinite(vals)):
        raise EvaluationError(f"symbol {sym.name} non-finite on the strip grid")
    k = int(np.argmin(vals))
    i, j = divmod(k, n_alpha)
    a, b = float(alphas[j]), float(betas[i])
    da, db = t / n_alpha, (2 * hw / (n_beta - 1)) if n_beta > 1 else 0.0
    best = float(vals[i, j])
    for _ in range(4):
        a, best = _golden_section(lambda x: float(abs(sym(x + 1j * b))),
                                  a - da, a + da)
        if db > 0:
            lo = max(-hw, b - db)
            hi = min(hw, b + db)
            b, best = _golden_section(lambda y: float(abs(sym(a + 1j * y))), lo, hi)
        da, db = da / 8, db / 8
    return best, complex(a, b)
