import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeharm import (
    DepthError,
    ParameterError,
    ball_size,
    build_tree,
    gjn_count,
    height,
    height_matrix,
    sectors,
    sphere_size,
)
from oracles import bfs_distances, brute_confluence, enumerate_gjn


def test_sphere_size_values():
    assert sphere_size(2, 0) == 1
    assert sphere_size(2, 3) == 12
    assert sphere_size(3, 2) == 12
    with pytest.raises(ParameterError):
        sphere_size(2, -1)


def test_vertex_counts():
    assert build_tree(2, 1).n_vertices == 4
    assert build_tree(2, 3).n_vertices == 1 + 3 + 6 + 12
    assert build_tree(3, 2).n_vertices == 1 + 4 + 12
    for q in (2, 3, 5):
        for R in (1, 2, 4):
            g = build_tree(q, R)
            assert g.n_vertices == sum(sphere_size(q, n) for n in range(R + 1))
            assert g.n_vertices == ball_size(q, R)


def test_build_tree_parameter_errors():
    with pytest.raises(ParameterError):
        build_tree(1, 4)
    with pytest.raises(ParameterError):
        build_tree(2, 0)
    with pytest.raises(ParameterError):
        build_tree(2, 17)


def test_degrees(tree24):
    g = tree24
    assert len(g.neighbors(0)) == 3
    for x in range(1, g.offsets[g.R]):
        assert len(g.neighbors(x)) == 3  # parent + q children
    for x in range(g.offsets[g.R], g.n_vertices):
        assert len(g.neighbors(x)) == 1  # truncation boundary


def test_parents_consistent(tree24):
    g = tree24
    for x in range(g.n_vertices):
        for c in range(*g.children_range(x)):
            assert g.parent(c) == x
    ix = np.arange(g.n_vertices)
    vec = g.parents(ix)
    scal = np.array([g.parent(int(x)) for x in ix])
    assert np.array_equal(vec, scal)


def test_distance_examples(tree24):
    g = tree24
    assert g.distance(0, 0) == 0
    sl = g.sphere_slice(3)
    for y in range(sl.start, sl.stop):
        assert g.distance(0, y) == 3
    kids = list(range(*g.children_range(0)))
    assert g.distance(kids[0], kids[1]) == 2
    with pytest.raises(IndexError):
        g.distance(0, g.n_vertices)


def test_distance_matches_bfs(tree26):
    g = tree26
    rng = np.random.default_rng(7)
    for src in rng.integers(0, g.n_vertices, size=6):
        dist = bfs_distances(g, int(src))
        sample = rng.integers(0, g.n_vertices, size=40)
        for y in sample:
            assert g.distance(int(src), int(y)) == dist[y]


def test_confluence_examples(tree26):
    g = tree26
    assert g.confluence(5, 5) == 5
    assert g.confluence(0, 17) == 0
    rng = np.random.default_rng(3)
    for _ in range(200):
        x, y = rng.integers(0, g.n_vertices, size=2)
        c = g.confluence(int(x), int(y))
        assert c == brute_confluence(g, int(x), int(y))
        # confluence distance identity
        assert (g.distance(0, int(y)) + g.distance(int(x), int(y))
                == g.distance(0, int(x)) + 2 * g.distance(c, int(y)))


def test_confluence_identity_exhaustive_small():
    g = build_tree(2, 4)
    for x in range(g.n_vertices):
        for y in range(g.n_vertices):
            c = g.confluence(x, y)
            assert (g.distance(0, y) + g.distance(x, y)
                    == g.distance(0, x) + 2 * g.distance(c, y))


def test_gjn_count_formula(tree28):
    g = tree28
    x = g.sphere_slice(3).start  # some vertex with |x| = 3
    assert gjn_count(g, x, 1, 0) == 1
    assert gjn_count(g, x, 0, 2) == 4      # q^n with q=2, n=2
    assert gjn_count(g, x, 3, 2) == 4      # j = |x| also q^n
    assert gjn_count(g, x, 1, 2) == 2      # (q-1) q^{n-1}
    with pytest.raises(ParameterError):
        gjn_count(g, x, 4, 1)
    with pytest.raises(ParameterError):
        gjn_count(g, x, 0, -1)


def test_gjn_count_matches_enumeration(tree28):
    g = tree28
    x = g.sphere_slice(3).start + 5
    for j in range(0, 4):
        for n in range(0, 4):
            if j + n <= g.R:
                assert gjn_count(g, x, j, n) == enumerate_gjn(g, x, j, n)


def test_gjn_partition_exhaustive():
    # cells G_{j,n}(x) partition the truncated vertex set
    g = build_tree(2, 6)
    for x in (0, 1, g.sphere_slice(2).start, g.sphere_slice(4).stop - 1):
        lx = g.level(x)
        total = 0
        for j in range(lx + 1):
            for n in range(0, g.R - j + 1):
                total += gjn_count(g, x, j, n)
        assert total == g.n_vertices


def test_gjn_count_at_root(tree28):
    g = tree28
    for n in range(5):
        assert gjn_count(g, 0, 0, n) == sphere_size(2, n)
        assert gjn_count(g, 0, 0, n) == enumerate_gjn(g, 0, 0, n)


def test_sectors_masses():
    g = build_tree(2, 4)
    s1 = sectors(g, 1)
    assert len(s1) == 3 and all(abs(s.mass - 1 / 3) < 1e-15 for s in s1)
    s2 = sectors(g, 2)
    assert len(s2) == 6 and all(abs(s.mass - 1 / 6) < 1e-15 for s in s2)
    for D in range(1, g.R + 1):
        assert abs(sum(s.mass for s in sectors(g, D)) - 1.0) < 1e-12
    with pytest.raises(ParameterError):
        sectors(g, 0)
    with pytest.raises(ParameterError):
        sectors(g, g.R + 1)


def test_height_examples(tree26):
    g = tree26
    secs = sectors(g, 4)
    s = secs[0]
    assert height(g, 0, s) == 0
    # along the ray to the anchor: height equals the level
    path = g.path_to_root(s.anchor)
    for v in path:
        assert height(g, v, s) == g.level(v)
    # a level-2 vertex meeting the ray only at the root has height -2
    sl = g.sphere_slice(2)
    found = False
    for x in range(sl.start, sl.stop):
        if g.confluence(x, s.anchor) == 0:
            assert height(g, x, s) == -2
            found = True
    assert found
    deep = g.sphere_slice(5).start
    with pytest.raises(DepthError):
        height(g, deep, s)


def test_height_matrix_matches_scalar(tree26):
    g = tree26
    D = 3
    secs = sectors(g, D)
    hm = height_matrix(g, D)
    for si in (0, 4, len(secs) - 1):
        col = [height(g, x, secs[si]) for x in range(int(g.offsets[D + 1]))]
        assert np.array_equal(hm[:, si], np.array(col))


@settings(max_examples=25, deadline=None)
@given(q=st.integers(2, 4), R=st.integers(1, 5), seed=st.integers(0, 2**31))
def test_confluence_identity_property(q, R, seed):
    g = build_tree(q, R)
    rng = np.random.default_rng(seed)
    x, y = (int(v) for v in rng.integers(0, g.n_vertices, size=2))
    c = g.confluence(x, y)
    assert (g.distance(0, y) + g.distance(x, y)
            == g.distance(0, x) + 2 * g.distance(c, y))
    assert g.distance(x, y) == g.distance(y, x)
