"""Norms and seminorms on the truncated tree: Schwartz seminorms, weak-L^p
and L^p norms, Hardy-type sphere norms, and the ball-sum growth diagnostic.

Every norm is reported with a stabilization flag: the value is recomputed on
the three largest usable radii and flagged stable only when consecutive
relative increments stay below 1%.  That flag is the truncation-honesty
contract: unstable values must not back acceptance verdicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, ParameterError
from .spectral import conjugate_index, delta, phi_profile
from .transforms import VertexFunction

STABILIZATION_TOL = 0.01


@dataclass(frozen=True)
class NormReport:
    value: float
    kind: str
    p: float | None = None
    r: float | None = None
    m: int | None = None
    radius: int = 0
    history: tuple[float, ...] = ()
    stabilized: bool = False

    def to_json_dict(self) -> dict:
        return {
            "value": self.value, "kind": self.kind, "p": _json_num(self.p),
            "r": _json_num(self.r), "m": self.m, "radius": self.radius,
            "history": list(self.history), "stabilized": self.stabilized,
        }


def _json_num(v):
    if v is None:
        return None
    if v == math.inf:
        return "inf"
    return v


def _stabilize(value_at, radius: int) -> tuple[float, tuple[float, ...], bool]:
    radii = [r for r in (radius - 2, radius - 1, radius) if r >= 0]
    history = tuple(float(value_at(r)) for r in radii)
    value = history[-1]
    stable = len(history) == 3
    for a, b in zip(history, history[1:]):
        denom = max(abs(b), 1e-300)
        if abs(b - a) / denom > STABILIZATION_TOL:
            stable = False
    return value, history, stable


def _effective_radius(f: VertexFunction) -> int:
    r = min(f.valid_radius, f.geometry.R)
    if r < 0:
        raise DegenerateError("no valid levels remain on this function")
    return r


def schwartz_seminorm(f: VertexFunction, p: float, m: int) -> NormReport:
    """sup over valid x of (1+|x|)^m q^{|x|/p} |f(x)|."""
    if m < 0:
        raise ParameterError(f"seminorm order m must be >= 0, got {m}")
    g = f.geometry
    radius = _effective_radius(f)
    absvals = np.abs(f.values)
    levels = np.arange(g.R + 1, dtype=float)
    weights = (1.0 + levels) ** m * np.exp(math.log(g.q) * levels / p)
    per_level = np.array([
        absvals[g.sphere_slice(n)].max() * weights[n] for n in range(radius + 1)
    ])

    def value_at(r: int) -> float:
        return float(per_level[: r + 1].max())

    value, history, stable = _stabilize(value_at, radius)
    return NormReport(value=value, kind="schwartz", p=p, m=m, radius=radius,
                      history=history, stabilized=stable)


def lp_norm(f: VertexFunction, p: float) -> NormReport:
    """Counting-measure L^p norm over the valid ball."""
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    radius = _effective_radius(f)

    def value_at(r: int) -> float:
        vals = np.abs(f.restricted(r))
        if p == math.inf:
            return float(vals.max())
        return float((vals**p).sum() ** (1.0 / p))

    value, history, stable = _stabilize(value_at, radius)
    return NormReport(value=value, kind="lp", p=p, radius=radius,
                      history=history, stabilized=stable)


def weak_lp_norm(f: VertexFunction, p: float) -> NormReport:
    """sup_t t d_f(t)^{1/p}, evaluated exactly at the jump points.

    With finitely many values the sup is attained just below some |f(x)|:
    sorting magnitudes descending, it equals max_k |f|_(k) k^{1/p}.
    Weak-L^infinity is the sup norm.
    """
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    radius = _effective_radius(f)

    def value_at(r: int) -> float:
        vals = np.sort(np.abs(f.restricted(r)))[::-1]
        if vals.size == 0:
            return 0.0
        if p == math.inf:
            return float(vals[0])
        ranks = np.arange(1, vals.size + 1, dtype=float)
        return float(np.max(vals * ranks ** (1.0 / p)))

    value, history, stable = _stabilize(value_at, radius)
    return NormReport(value=value, kind="weak_lp", p=p, radius=radius,
                      history=history, stabilized=stable)


def hardy_norm(f: VertexFunction, p: float, r: float) -> NormReport:
    """Hardy-type norm: sphere-wise L^r means weighted by 1/phi_{i delta_p}.

    r = inf compares pointwise; the phi weight is strictly positive, and is
    comparable to q^{-n/p'} with two-sided constants.
    """
    if not 1 <= p < 2:
        raise ParameterError(f"p must lie in [1, 2), got {p}")
    if r < 1:
        raise ParameterError(f"r must be >= 1, got {r}")
    g = f.geometry
    radius = _effective_radius(f)
    weight = np.real(phi_profile(g.q, 1j * delta(p), g.R))  # phi_{i delta_p}(n) > 0
    absvals = np.abs(f.values)
    if r == math.inf:
        per_level = np.array([
            absvals[g.sphere_slice(n)].max() / weight[n] for n in range(radius + 1)
        ])
    else:
        per_level = np.array([
            (absvals[g.sphere_slice(n)] ** r).mean() ** (1.0 / r) / weight[n]
            for n in range(radius + 1)
        ])

    def value_at(rad: int) -> float:
        return float(per_level[: rad + 1].max())

    value, history, stable = _stabilize(value_at, radius)
    return NormReport(value=value, kind="hardy", p=p, r=r, radius=radius,
                      history=history, stabilized=stable)


def hardy_norm_power_weighted(f: VertexFunction, p: float, r: float) -> NormReport:
    """Variant with the explicit q^{n/p'} weight (equivalent norm)."""
    if not 1 <= p < 2:
        raise ParameterError(f"p must lie in [1, 2), got {p}")
    if r < 1:
        raise ParameterError(f"r must be >= 1, got {r}")
    g = f.geometry
    radius = _effective_radius(f)
    pp = conjugate_index(p)
    levels = np.arange(g.R + 1, dtype=float)
    weight = np.exp(math.log(g.q) * levels / pp) if pp != math.inf else np.ones(g.R + 1)
    absvals = np.abs(f.values)
    if r == math.inf:
        per_level = np.array([
            absvals[g.sphere_slice(n)].max() * weight[n] for n in range(radius + 1)
        ])
    else:
        per_level = np.array([
            (absvals[g.sphere_slice(n)] ** r).mean() ** (1.0 / r) * weight[n]
            for n in range(radius + 1)
        ])

    def value_at(rad: int) -> float:
        return float(per_level[: rad + 1].max())

    value, history, stable = _stabilize(value_at, radius)
    return NormReport(value=value, kind="hardy_power", p=p, r=r, radius=radius,
                      history=history, stabilized=stable)


@dataclass(frozen=True)
class BallSumTable:
    """Values (1/n) sum_{B(o,n)} |f|^{p'} for n = 1..radius."""

    n: np.ndarray
    values: np.ndarray
    p: float
    p_prime: float

    @property
    def max_value(self) -> float:
        return float(self.values.max())

    def log_log_slope(self, lo: int | None = None, hi: int | None = None) -> float:
        """Least-squares slope of log value against log n over [lo, hi]."""
        hi = int(self.n[-1]) if hi is None else hi
        lo = hi // 2 if lo is None else lo
        mask = (self.n >= lo) & (self.n <= hi) & (self.values > 0)
        if mask.sum() < 2:
            raise DegenerateError("ball-sum slope window has < 2 usable points")
        x = np.log(self.n[mask].astype(float))
        y = np.log(self.values[mask])
        design = np.vstack([x, np.ones_like(x)]).T
        (slope, _), *_ = np.linalg.lstsq(design, y, rcond=None)
        return float(slope)

    def to_rows(self) -> list[tuple[int, float]]:
        return [(int(n), float(v)) for n, v in zip(self.n, self.values)]


def ball_sum_diagnostic(f: VertexFunction, p: float) -> BallSumTable:
    """Per-n table of (1/n) sum over B(o,n) of |f|^{p'}.

    Bounded for weak-L^{p'} inputs; polynomial growth flags functions (such
    as z-derivatives of the spherical function at boundary points) that
    escape weak-L^{p'}.
    """
    if not 1 < p < 2:
        raise ParameterError(f"ball-sum diagnostic needs 1 < p < 2, got {p}")
    if not np.any(f.values):
        raise DegenerateError("ball-sum diagnostic on identically zero input")
    g = f.geometry
    radius = _effective_radius(f)
    if radius < 1:
        raise DegenerateError("ball-sum diagnostic needs radius >= 1")
    pp = conjugate_index(p)
    powered = np.abs(f.values) ** pp
    level_sums = np.add.reduceat(powered, g.offsets[:-1])[: radius + 1]
    cums = np.cumsum(level_sums)
    ns = np.arange(1, radius + 1)
    return BallSumTable(n=ns, values=cums[1:] / ns, p=p, p_prime=pp)
