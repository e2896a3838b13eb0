"""Truncated homogeneous trees: BFS indexing, distances, confluence, sectors.

A homogeneous tree of degree q+1 is rooted at a reference vertex o and
truncated at radius R.  Vertices are indexed in breadth-first order, so the
sphere S(o, n) is the contiguous index range [offsets[n], offsets[n+1]) and
children of a vertex form a contiguous block.  All query methods are
read-only; a built geometry is immutable and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DepthError, ParameterError

#: default cap on the truncation radius (q=2 gives ~98k vertices at R=16)
MAX_RADIUS = 16


def sphere_size(q: int, n: int) -> int:
    """Number of vertices at distance exactly n from any fixed vertex."""
    if n < 0:
        raise ParameterError(f"sphere radius must be >= 0, got {n}")
    if n == 0:
        return 1
    return (q + 1) * q ** (n - 1)


def ball_size(q: int, n: int) -> int:
    """Number of vertices at distance <= n from any fixed vertex."""
    if n < 0:
        raise ParameterError(f"ball radius must be >= 0, got {n}")
    return 1 + (q + 1) * (q**n - 1) // (q - 1)


@dataclass(frozen=True)
class Sector:
    """Boundary cylinder of rays through `anchor`, with its measure mass.

    The mass is (q+1)^{-1} q^{-(depth-1)}; over all depth-D sectors the
    masses sum to 1.
    """

    anchor: int
    depth: int
    mass: float


@dataclass(frozen=True, eq=False)
class TreeGeometry:
    """Truncated homogeneous tree of branching parameter q and radius R."""

    q: int
    R: int
    offsets: np.ndarray        # offsets[l] = first index of level l; offsets[R+1] = V
    levels: np.ndarray         # level of each vertex, int16
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_vertices(self) -> int:
        return int(self.offsets[-1])

    # -- level structure ---------------------------------------------------

    def level(self, x: int) -> int:
        return int(self.levels[x])

    def sphere_slice(self, n: int) -> slice:
        """Index slice of S(o, n)."""
        if not 0 <= n <= self.R:
            raise ParameterError(f"level {n} outside [0, {self.R}]")
        return slice(int(self.offsets[n]), int(self.offsets[n + 1]))

    def level_counts(self) -> np.ndarray:
        return np.diff(self.offsets)

    # -- parents and children ----------------------------------------------

    def parent(self, x: int) -> int:
        """Parent index, or -1 for the root."""
        if x == 0:
            return -1
        lvl = int(self.levels[x])
        if lvl == 1:
            return 0
        return int(self.offsets[lvl - 1]) + (x - int(self.offsets[lvl])) // self.q

    def parents(self, ix: np.ndarray) -> np.ndarray:
        """Vectorized parent lookup (root maps to -1)."""
        ix = np.asarray(ix, dtype=np.int64)
        lvl = self.levels[ix].astype(np.int64)
        out = np.where(
            lvl <= 1,
            np.where(ix == 0, -1, 0),
            self.offsets[np.maximum(lvl - 1, 0)] + (ix - self.offsets[lvl]) // self.q,
        )
        return out

    def children_range(self, x: int) -> tuple[int, int]:
        """Contiguous [start, stop) of children (empty at the boundary level)."""
        lvl = int(self.levels[x])
        if lvl == self.R:
            return (0, 0)
        if x == 0:
            return (int(self.offsets[1]), int(self.offsets[2]))
        start = int(self.offsets[lvl + 1]) + (x - int(self.offsets[lvl])) * self.q
        return (start, start + self.q)

    def neighbors(self, x: int) -> list[int]:
        out = []
        if x != 0:
            out.append(self.parent(x))
        out.extend(range(*self.children_range(x)))
        return out

    # -- metric -------------------------------------------------------------

    def path_to_root(self, x: int) -> list[int]:
        """Geodesic o -> x returned as [o, x_1, ..., x]."""
        path = [x]
        while x != 0:
            x = self.parent(x)
            path.append(x)
        return path[::-1]

    def ancestor_at(self, x: int, lvl: int) -> int:
        """Vertex at the given level on the geodesic o -> x."""
        cur = int(self.levels[x])
        if not 0 <= lvl <= cur:
            raise ParameterError(f"ancestor level {lvl} outside [0, {cur}]")
        while cur > lvl:
            x = self.parent(x)
            cur -= 1
        return x

    def confluence(self, x: int, y: int) -> int:
        """Last common vertex of the geodesics o -> x and o -> y."""
        self._check_index(x)
        self._check_index(y)
        lx, ly = int(self.levels[x]), int(self.levels[y])
        while lx > ly:
            x = self.parent(x)
            lx -= 1
        while ly > lx:
            y = self.parent(y)
            ly -= 1
        while x != y:
            x, y = self.parent(x), self.parent(y)
        return x

    def distance(self, x: int, y: int) -> int:
        """Edge count of the unique geodesic between x and y."""
        self._check_index(x)
        self._check_index(y)
        c = self.confluence(x, y)
        return int(self.levels[x]) + int(self.levels[y]) - 2 * int(self.levels[c])

    def _check_index(self, x: int) -> None:
        if not 0 <= x < self.n_vertices:
            raise IndexError(f"vertex index {x} outside [0, {self.n_vertices})")

    # -- local sums (the stencil primitive for all multipliers) -------------

    def neighbor_sum(self, values: np.ndarray) -> np.ndarray:
        """Sum of `values` over the neighbors of each vertex.

        At the boundary level R the children are missing, so entries there
        only see the parent; callers must treat level R as invalid.
        """
        out = np.zeros_like(values)
        off = self.offsets
        for lvl in range(1, self.R + 1):
            par = values[off[lvl - 1]:off[lvl]]
            blk = values[off[lvl]:off[lvl + 1]]
            width = blk.shape[0] // par.shape[0]
            out[off[lvl]:off[lvl + 1]] += np.repeat(par, width)
            out[off[lvl - 1]:off[lvl]] += blk.reshape(par.shape[0], width).sum(axis=1)
        return out

    # -- spheres around arbitrary centers (oracle path) ---------------------

    def sphere_around(self, x: int, n: int) -> np.ndarray:
        """Vertices at distance exactly n from x (BFS; intended for small trees)."""
        self._check_index(x)
        if n < 0:
            raise ParameterError(f"sphere radius must be >= 0, got {n}")
        if n == 0:
            return np.array([x], dtype=np.int64)
        prev, cur = {x}, set(self.neighbors(x))
        for _ in range(n - 1):
            nxt = set()
            for v in cur:
                nxt.update(self.neighbors(v))
            nxt -= prev | cur
            prev, cur = cur, nxt
        return np.array(sorted(cur), dtype=np.int64)


def build_tree(q: int, R: int, max_radius: int = MAX_RADIUS) -> TreeGeometry:
    """Construct the truncated homogeneous tree with parameters (q, R).

    Memory grows like q^R: roughly 16 * (q+1) * q^(R-1) bytes per complex
    vertex array (q=2, R=16 is ~98k vertices; q=3, R=10 is ~89k).
    """
    if q < 2:
        raise ParameterError(f"branching parameter q must be >= 2, got {q}")
    if not 1 <= R <= max_radius:
        raise ParameterError(f"truncation radius R={R} outside [1, {max_radius}]")
    counts = [sphere_size(q, n) for n in range(R + 1)]
    offsets = np.zeros(R + 2, dtype=np.int64)
    offsets[1:] = np.cumsum(counts)
    levels = np.repeat(np.arange(R + 1, dtype=np.int16), counts)
    return TreeGeometry(q=q, R=R, offsets=offsets, levels=levels)


def gjn_count(g: TreeGeometry, x: int, j: int, n: int) -> int:
    """Size of {y : c(x,y) = x_j and d(x_j, y) = n} on the infinite tree.

    x_j is the level-j vertex on the geodesic o -> x.  For |x| >= 1 the
    counts are 1 (n=0), q^n (j in {0,|x|}), (q-1) q^{n-1} otherwise; for
    x = o the cell is the whole sphere S(o, n).
    """
    g._check_index(x)
    lx = g.level(x)
    if not 0 <= j <= lx:
        raise ParameterError(f"geodesic index j={j} outside [0, {lx}]")
    if n < 0:
        raise ParameterError(f"distance n must be >= 0, got {n}")
    if n == 0:
        return 1
    if lx == 0:
        return sphere_size(g.q, n)
    if j == 0 or j == lx:
        return g.q**n
    return (g.q - 1) * g.q ** (n - 1)


def sectors(g: TreeGeometry, D: int) -> list[Sector]:
    """One boundary sector per depth-D vertex; masses sum to 1."""
    if not 1 <= D <= g.R:
        raise ParameterError(f"sector depth D={D} outside [1, {g.R}]")
    mass = 1.0 / ((g.q + 1) * g.q ** (D - 1))
    sl = g.sphere_slice(D)
    return [Sector(anchor=a, depth=D, mass=mass) for a in range(sl.start, sl.stop)]


def height(g: TreeGeometry, x: int, sector: Sector) -> int:
    """Height 2|c(x, omega)| - |x| of x against the ray through the anchor.

    Only defined for |x| <= sector depth: deeper vertices may branch past
    the anchor, where the truncated ray no longer determines the confluence.
    """
    g._check_index(x)
    if g.level(x) > sector.depth:
        raise DepthError(
            f"height undefined: |x|={g.level(x)} exceeds sector depth {sector.depth}"
        )
    c = g.confluence(x, sector.anchor)
    return 2 * g.level(c) - g.level(x)


def height_matrix(g: TreeGeometry, D: int) -> np.ndarray:
    """Heights H[x, s] for all |x| <= D against every depth-D sector.

    Cached on the geometry; int16 (heights lie in [-D, D]).
    """
    key = ("height_matrix", D)
    if key in g._cache:
        return g._cache[key]
    if not 1 <= D <= g.R:
        raise ParameterError(f"sector depth D={D} outside [1, {g.R}]")
    off = g.offsets
    anchors = np.arange(off[D], off[D + 1], dtype=np.int64)
    n_sec = anchors.shape[0]
    # ancestor-of-anchor table: ray[l, s] = level-l vertex on the ray to anchor s
    ray = np.empty((D + 1, n_sec), dtype=np.int64)
    ray[D] = anchors
    for lvl in range(D - 1, -1, -1):
        ray[lvl] = g.parents(ray[lvl + 1])
    n_vd = int(off[D + 1])
    conf = np.zeros((n_vd, n_sec), dtype=np.int16)  # |c(x, anchor_s)|
    for lvl in range(1, D + 1):
        ix = np.arange(off[lvl], off[lvl + 1], dtype=np.int64)
        par = g.parents(ix)
        on_ray = ix[:, None] == ray[lvl][None, :]
        conf[ix] = np.where(on_ray, np.int16(lvl), conf[par])
    hmat = (2 * conf - g.levels[:n_vd, None]).astype(np.int16)
    g._cache[key] = hmat
    return hmat
