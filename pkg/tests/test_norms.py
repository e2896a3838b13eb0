import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeharm import (
    DegenerateError,
    ParameterError,
    RadialFunction,
    VertexFunction,
    ball_size,
    ball_sum_diagnostic,
    build_tree,
    delta,
    dirac,
    generalized_eigen_basis,
    hardy_norm,
    hardy_norm_power_weighted,
    lp_norm,
    phi_profile,
    schwartz_seminorm,
    tau,
    weak_lp_norm,
)
from oracles import brute_weak_norm


def phi_vertex(g, z):
    return VertexFunction(g, phi_profile(g.q, z, g.R)[g.levels])


def test_schwartz_dirac(tree26):
    for p, m in ((1.0, 0), (1.5, 3), (1.9, 7)):
        rep = schwartz_seminorm(dirac(tree26), p, m)
        assert rep.value == 1.0


def test_schwartz_constant():
    g = build_tree(2, 5)
    ones = VertexFunction(g, np.ones(g.n_vertices, dtype=complex))
    rep = schwartz_seminorm(ones, 1.0, 0)
    assert abs(rep.value - 2**5) < 1e-9


def test_schwartz_monotone_in_m(tree26):
    rng = np.random.default_rng(0)
    f = VertexFunction(tree26, rng.normal(size=tree26.n_vertices) + 0j)
    f.values[0] = 0.0  # force the sup away from the root
    vals = [schwartz_seminorm(f, 1.2, m).value for m in range(4)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ParameterError):
        schwartz_seminorm(f, 1.2, -1)


def test_weak_norm_examples(tree26):
    assert weak_lp_norm(dirac(tree26), 2.5).value == 1.0
    # indicator of a ball: single jump, d = #B
    n = 3
    vals = np.zeros(tree26.n_vertices, dtype=complex)
    vals[: tree26.offsets[n + 1]] = 1.0
    ind = VertexFunction(tree26, vals)
    for p in (1.0, 1.7, 3.0):
        want = ball_size(2, n) ** (1 / p)
        assert abs(weak_lp_norm(ind, p).value - want) < 1e-12
    # weak-L^infinity is the sup norm
    rng = np.random.default_rng(1)
    f = VertexFunction(tree26, rng.normal(size=tree26.n_vertices) + 0j)
    assert weak_lp_norm(f, math.inf).value == pytest.approx(np.abs(f.values).max())


def test_weak_norm_against_grid_oracle(tree24):
    rng = np.random.default_rng(2)
    for _ in range(10):
        f = VertexFunction(tree24, rng.normal(size=tree24.n_vertices)
                           + 1j * rng.normal(size=tree24.n_vertices))
        for p in (1.0, 1.8, 3.0):
            exact = weak_lp_norm(f, p).value
            grid = brute_weak_norm(f.values, p)
            assert grid <= exact * (1 + 1e-9)
            assert exact <= grid * (1 + 1e-3)  # grid sits just below jumps


def test_weak_below_strong(tree26):
    rng = np.random.default_rng(3)
    for _ in range(100):
        f = VertexFunction(tree26, rng.normal(size=tree26.n_vertices)
                           + 1j * rng.normal(size=tree26.n_vertices))
        for p in (1.0, 1.5, 2.0, 4.0):
            assert weak_lp_norm(f, p).value <= lp_norm(f, p).value * (1 + 1e-12)


def test_hardy_norm_phi_weight_is_one():
    g = build_tree(2, 10)
    p = 1.4
    f = phi_vertex(g, 1j * delta(p))
    for r in (1.0, 2.0, math.inf):
        rep = hardy_norm(f, p, r)
        assert abs(rep.value - 1.0) < 1e-12


def test_hardy_p1_rinf_is_sup(tree26):
    rng = np.random.default_rng(4)
    f = VertexFunction(tree26, rng.normal(size=tree26.n_vertices) + 0j)
    rep = hardy_norm(f, 1.0, math.inf)
    assert rep.value == pytest.approx(np.abs(f.values).max())
    with pytest.raises(ParameterError):
        hardy_norm(f, 1.0, 0.5)


def test_hardy_boundary_phi_finite_and_stable():
    g = build_tree(2, 14)
    p = 1.5
    alpha = 0.7
    f = phi_vertex(g, alpha - 1j * delta(p / (p - 1)))
    rep = hardy_norm(f, p, math.inf)
    assert np.isfinite(rep.value)
    assert rep.stabilized


def test_hardy_monotone_in_r():
    g = build_tree(2, 8)
    rng = np.random.default_rng(5)
    f = VertexFunction(g, rng.normal(size=g.n_vertices)
                       + 1j * rng.normal(size=g.n_vertices))
    vals = [hardy_norm(f, 1.3, r).value for r in (1, 2, 4, math.inf)]
    assert all(a <= b * (1 + 1e-12) for a, b in zip(vals, vals[1:]))


def test_hardy_phi_vs_power_weights_comparable():
    # the two weightings differ by a factor bounded by the two-sided
    # constants of phi_{i delta_p}, uniformly over functions
    g = build_tree(2, 12)
    p = 1.5
    rng = np.random.default_rng(6)
    ratios = []
    for _ in range(20):
        f = VertexFunction(g, rng.normal(size=g.n_vertices)
                           + 1j * rng.normal(size=g.n_vertices))
        a = hardy_norm(f, p, math.inf).value
        b = hardy_norm_power_weighted(f, p, math.inf).value
        ratios.append(a / b)
    ratios = np.array(ratios)
    assert ratios.max() / ratios.min() < 20


def test_ball_sum_dirac(tree26):
    table = ball_sum_diagnostic(dirac(tree26), 1.5)
    assert np.allclose(table.values, 1.0 / table.n)
    assert table.max_value <= 1.0


def test_ball_sum_bounded_for_boundary_phi():
    g = build_tree(2, 14)
    p = 1.5
    f = phi_vertex(g, 0.9 - 1j * delta(p / (p - 1)))
    table = ball_sum_diagnostic(f, p)
    # bounded table: log-log slope near zero
    assert abs(table.log_log_slope()) < 0.5


def test_ball_sum_growth_for_derivative():
    # first derivative escapes weak-L^{p'}; the table grows polynomially
    q = 2
    p = 1.425
    pp = p / (p - 1)
    alpha = 0.055 * tau(q)
    basis = generalized_eigen_basis(q, alpha - 1j * delta(pp), 2, 14)
    g = build_tree(2, 14)
    f = basis[1].to_vertex(g)
    table = ball_sum_diagnostic(f, p)
    slope = table.log_log_slope()
    assert abs(slope - (pp - 1)) < 0.2


def test_ball_sum_guards(tree26):
    with pytest.raises(ParameterError):
        ball_sum_diagnostic(dirac(tree26), 1.0)
    z = VertexFunction(tree26, np.zeros(tree26.n_vertices, dtype=complex))
    with pytest.raises(DegenerateError):
        ball_sum_diagnostic(z, 1.5)


def test_stabilization_contract():
    # rapidly decaying input: reports agree across radii and the flag sets
    g = build_tree(2, 10)
    vals = np.exp(-2.0 * g.levels.astype(float)) + 0j
    f = VertexFunction(g, vals)
    for rep in (weak_lp_norm(f, 2.0), lp_norm(f, 2.0),
                schwartz_seminorm(f, 1.1, 0), hardy_norm(f, 1.5, math.inf)):
        assert rep.stabilized
        assert abs(rep.history[-1] - rep.history[-2]) <= 0.01 * abs(rep.history[-1])
    # slowly growing input: flag honestly refuses
    g2 = build_tree(2, 6)
    grow = VertexFunction(g2, np.exp(1.5 * g2.levels.astype(float)) + 0j)
    assert not lp_norm(grow, 1.0).stabilized


def test_valid_radius_respected(tree26):
    rng = np.random.default_rng(7)
    vals = rng.normal(size=tree26.n_vertices) + 0j
    f_full = VertexFunction(tree26, vals)
    f_cut = VertexFunction(tree26, vals, valid_radius=3)
    a = weak_lp_norm(f_cut, 2.0).value
    b = weak_lp_norm(VertexFunction(tree26, vals * (tree26.levels <= 3)), 2.0).value
    assert a == pytest.approx(b)
    assert weak_lp_norm(f_full, 2.0).radius == tree26.R
    assert weak_lp_norm(f_cut, 2.0).radius == 3


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), p=st.sampled_from([1.0, 1.3, 2.0, 3.5]))
def test_weak_below_strong_property(seed, p):
    g = build_tree(2, 4)
    rng = np.random.default_rng(seed)
    f = VertexFunction(g, rng.normal(size=g.n_vertices)
                       + 1j * rng.normal(size=g.n_vertices))
    assert weak_lp_norm(f, p).value <= lp_norm(f, p).value * (1 + 1e-12)
