import math

import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from treeharm import (
    DegenerateError,
    DistinctnessError,
    ParameterError,
    RadialFunction,
    TruncationError,
    UnsupportedOrderError,
    VertexFunction,
    build_tree,
    confluent_vandermonde_solve,
    delta,
    eigen_decompose,
    gamma,
    gamma_deriv,
    generalized_eigen_basis,
    growth_order_probe,
    heat_op,
    laplacian_op,
    laplacian_radial,
    laplacian_radial_extend,
    phi,
    phi_profile,
    q_factor,
    q_factor_from_polynomial,
    sphere_avg_op,
    ball_avg_op,
    tau,
)
from treeharm.eigenproject import partition_of_unity_defect


def phi_vertex(g, z):
    return VertexFunction(g, phi_profile(g.q, z, g.R)[g.levels])


def random_nodes(rng, j):
    # well-separated complex nodes
    while True:
        a = rng.normal(size=j) + 1j * rng.normal(size=j)
        sep = min((abs(a[i] - a[k]) for i in range(j) for k in range(i + 1, j)),
                  default=1.0)
        if sep > 0.3:
            return a


def test_two_point_lagrange():
    pp = confluent_vandermonde_solve([1.0, -1.0], 1, 0)
    # forced interpolation: P(z) = (1 + z)/2
    assert np.allclose(pp.coeffs, [0.5, 0.5], atol=1e-14)


def test_hand_checkable_confluent_case():
    # nodes {0, 1}, N = 2, target 0: P(z) = (z-1)^2 (2z+1) = 1 - 3 z^2 + 2 z^3
    pp = confluent_vandermonde_solve([0.0, 1.0], 2, 0)
    assert np.max(np.abs(pp.coeffs - np.array([1.0, 0.0, -3.0, 2.0]))) < 1e-12
    # Q_0(0) = (0 - 1)^{-2} = 1
    assert abs(q_factor([0.0, 1.0], 2, 0) - 1.0) < 1e-15
    assert abs(q_factor_from_polynomial(pp) - 1.0) < 1e-8


def test_duplicate_nodes_rejected():
    with pytest.raises(DistinctnessError):
        confluent_vandermonde_solve([1.0, 1.0], 1, 0)
    with pytest.raises(DistinctnessError):
        confluent_vandermonde_solve([0.3, 0.3 + 1e-12], 2, 0)


def test_parameter_validation():
    with pytest.raises(ParameterError):
        confluent_vandermonde_solve([0.0, 1.0], 0, 0)
    with pytest.raises(ParameterError):
        confluent_vandermonde_solve([0.0, 1.0], 1, 2)
    with pytest.raises(ParameterError):
        confluent_vandermonde_solve(list(range(40)), 2, 0)  # jN > 64


def test_interpolation_conditions_random():
    rng = np.random.default_rng(0)
    for _ in range(50):
        j = int(rng.integers(2, 5))
        order = int(rng.integers(1, 4))
        nodes = random_nodes(rng, j)
        i = int(rng.integers(0, j))
        pp = confluent_vandermonde_solve(nodes, order, i)
        for k in range(j):
            for m in range(order):
                want = 1.0 if (k == i and m == 0) else 0.0
                got = pp.deriv_value(nodes[k], m)
                assert abs(got - want) < 1e-8


def test_partition_of_unity():
    rng = np.random.default_rng(1)
    for _ in range(25):
        j = int(rng.integers(2, 5))
        order = int(rng.integers(1, 4))
        if j * order > 16:
            continue
        nodes = random_nodes(rng, j)
        assert partition_of_unity_defect(nodes, order) < 1e-8
        # pointwise partition at random arguments
        w = complex(rng.normal(), rng.normal())
        total = sum(confluent_vandermonde_solve(nodes, order, i).value(w)
                    for i in range(j))
        assert abs(total - 1.0) < 1e-8


def test_q_factor_examples_and_consistency():
    assert abs(q_factor([1.0, -1.0], 1, 0) - 0.5) < 1e-15
    rng = np.random.default_rng(2)
    for _ in range(100):
        j = int(rng.integers(2, 5))
        order = int(rng.integers(1, 3))
        nodes = random_nodes(rng, j)
        i = int(rng.integers(0, j))
        pp = confluent_vandermonde_solve(nodes, order, i)
        assert abs(q_factor(nodes, order, i) - q_factor_from_polynomial(pp)) < 1e-8


def test_eigen_decompose_planted_single():
    g = build_tree(2, 10)
    z1, z2 = 0.4 - 0.2j, 1.1 - 0.2j
    op = laplacian_op(2)
    f = phi_vertex(g, z1)
    nodes = [complex(gamma(2, z1)), complex(gamma(2, z2))]
    dec = eigen_decompose(f, op, nodes, order=1)
    assert (dec.components[0] - f).sup_norm() < 1e-9 * f.sup_norm()
    assert dec.components[1].sup_norm() < 1e-9 * f.sup_norm()
    assert dec.reconstruction_error < 1e-9 * f.sup_norm()
    assert dec.residuals is not None
    assert max(dec.residuals) < 1e-9 * f.sup_norm()


def test_eigen_decompose_planted_mixture_recovers_coefficients():
    g = build_tree(2, 12)
    dpp = -delta(1.5)
    t = tau(2)
    z1, z2 = t / 8 + 1j * dpp, -t / 8 + 1j * dpp
    op = sphere_avg_op(2, 2)
    f = phi_vertex(g, z1) * 2.0 + phi_vertex(g, z2) * 3.0
    nodes = [complex(op.symbol(z1)), complex(op.symbol(z2))]
    dec = eigen_decompose(f, op, nodes, order=1)
    assert abs(dec.components[0].values[0] - 2.0) < 1e-8
    assert abs(dec.components[1].values[0] - 3.0) < 1e-8
    # uniqueness for order 1: solving in the other order gives the same split
    dec2 = eigen_decompose(f, op, nodes[::-1], order=1)
    r = min(dec.components[0].valid_radius, dec2.components[1].valid_radius)
    assert np.max(np.abs(dec.components[0].restricted(r)
                         - dec2.components[1].restricted(r))) < 1e-10


def test_eigen_decompose_partition_always_holds():
    g = build_tree(2, 10)
    rng = np.random.default_rng(3)
    f = VertexFunction(g, rng.normal(size=g.n_vertices)
                       + 1j * rng.normal(size=g.n_vertices))
    nodes = [0.3 + 0j, 1.2 + 0j, 0.8 + 0.5j]
    dec = eigen_decompose(f, laplacian_op(2), nodes, order=1)
    assert dec.reconstruction_error < 1e-8 * f.sup_norm()
    # residuals are large for a random f, but the partition still holds
    assert dec.residuals is not None and max(dec.residuals) > 1e-3


def test_eigen_decompose_truncation_guard():
    g = build_tree(2, 4)
    f = VertexFunction(g, np.ones(g.n_vertices, dtype=complex))
    nodes = [0.1 + 0j, 0.5 + 0j, 1.0 + 0j]
    with pytest.raises(TruncationError):
        eigen_decompose(f, laplacian_op(2), nodes, order=2)


def test_eigen_decompose_heat_skips_residuals_when_tight():
    g = build_tree(2, 12)
    dpp = -delta(1.5)
    t = tau(2)
    op = heat_op(2, 0.25j, tol=1e-10)
    z1, z2 = 1j * dpp, t / 2 + 1j * dpp
    f = phi_vertex(g, z1) * 2.0 + phi_vertex(g, z2) * 3.0
    nodes = [complex(op.symbol(z1)), complex(op.symbol(z2))]
    dec = eigen_decompose(f, op, nodes, order=1)
    assert dec.residuals_skipped and dec.residuals is None
    assert abs(dec.components[0].values[0] - 2.0) < 1e-8
    assert abs(dec.components[1].values[0] - 3.0) < 1e-8


def test_generalized_eigen_basis_annealing_ladder():
    q = 2
    z0 = 0.3 - 1j * delta(math.inf)  # boundary line for p = 1
    R = 16
    basis = generalized_eigen_basis(q, z0, 3, R)
    gam = complex(gamma(q, z0))
    for m, g_m in enumerate(basis):
        # (L - gamma)^{m+1} annihilates, (L - gamma)^m does not
        cur = g_m
        norms = []
        for _ in range(m + 2):
            norms.append(np.abs(cur.values[: R - 3]).max())
            lap = laplacian_radial(cur)
            cur = RadialFunction(q, lap.values - gam * cur.values[: lap.support + 1])
        # after m+1 applications the profile vanishes
        assert norms[m + 1] < 1e-8 * max(norms[0], 1.0)
        if m >= 1:
            assert norms[m] > 1e4 * norms[m + 1]


def test_generalized_basis_first_order_identity():
    # (L - gamma(z0)) D phi = gamma'(z0) phi, cross-checked by differences
    q = 2
    z0 = 0.45 - 0.19j
    R = 14
    basis = generalized_eigen_basis(q, z0, 2, R)
    g0, g1 = basis
    gam = complex(gamma(q, z0))
    dgam = complex(gamma_deriv(q, z0, 1))
    lap = laplacian_radial_extend(g1)
    lhs = lap.values[: R + 1] - gam * g1.values
    want = dgam * g0.values
    assert np.max(np.abs(lhs[: R - 1] - want[: R - 1])) < 1e-8
    # finite-difference cross-check of the same identity
    h = 1e-6
    fd = (phi_profile(q, z0 + h, R) - phi_profile(q, z0 - h, R)) / (2 * h)
    assert np.max(np.abs(fd - g1.values)) < 1e-6


def test_generalized_basis_guards():
    with pytest.raises(UnsupportedOrderError):
        generalized_eigen_basis(2, 0.3, 9, 12)
    with pytest.raises(ParameterError):
        generalized_eigen_basis(2, 0.3, 0, 12)


def test_growth_probe_slopes():
    q = 2
    # probe point chosen where the asymptotic regime governs at radius 14:
    # at alpha = 0 the c'(z0)/c(z0) offset shifts the fit visibly
    p = 1.02
    alpha = 0.075 * tau(q)
    z0 = alpha - 1j * delta(p / (p - 1))
    basis = generalized_eigen_basis(q, z0, 3, 14)
    slopes = [growth_order_probe(b, p).slope for b in basis]
    assert abs(slopes[0] - 0) < 0.15
    assert abs(slopes[1] - 1) < 0.15
    assert abs(slopes[2] - 2) < 0.15
    # r^2 of the fits is high
    assert growth_order_probe(basis[2], p).r_squared > 0.98


def test_growth_probe_guards():
    with pytest.raises(ParameterError):
        growth_order_probe(RadialFunction(2, np.ones(6)), 1.5)
    with pytest.raises(DegenerateError):
        growth_order_probe(RadialFunction(2, np.zeros(16)), 1.5)
