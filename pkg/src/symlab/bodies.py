"""Set representations and the metrics experiments are judged by.

Three interchangeable representations of compact subsets of R^n:

* ``Polytope``      -- deduplicated extreme vertices of a convex hull,
* ``SupportVector`` -- support-function samples on a ``DirectionGrid``,
* ``VoxelSet``      -- boolean occupancy over an axis-aligned uniform grid
                       (n = 2 or 3), the only representation that can hold
                       non-convex compact sets,

plus ``OriginBall`` for the round limits everything is compared against.

Metrics: volume, mean width (average support sum over antipodal pairs),
Hausdorff distance, and deviation from the best centered ball.  Conversions
between representations are explicit and the lossy ones say so.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.ndimage
import scipy.spatial
import scipy.special
from scipy.spatial import QhullError, cKDTree
from scipy.stats import qmc

from .errors import InputError, NumericalError
from .subspaces import Subspace

# Points this close to a cell or facet boundary count as inside; keeps
# rasterization decisions deterministic instead of depending on roundoff.
BOUNDARY_TOL = 1e-12


# --------------------------------------------------------------------------
# direction grids
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DirectionGrid:
    """Unit directions closed under negation (and optionally reflections).

    The antipodal map is exact by construction: directions are stored as a
    half-set followed by its negation, so ``antipode(j) = j +- M/2``.
    """

    directions: np.ndarray

    def __post_init__(self):
        dirs = np.asarray(self.directions, dtype=float)
        if dirs.ndim != 2 or dirs.shape[0] < 2:
            raise InputError("directions must be a (M, n) array, M >= 2")
        norms = np.linalg.norm(dirs, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise InputError("grid directions must be unit vectors")
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "_cache", {})

    # -- constructors ------------------------------------------------------

    @classmethod
    def uniform_circle(cls, m: int = 720) -> "DirectionGrid":
        """Uniform angular grid on S^1; m must be divisible by 4 so that
        negation and axis reflections permute the grid."""
        if m % 4 != 0:
            raise InputError("circle grid size must be divisible by 4")
        phi = 2 * np.pi * np.arange(m // 2) / m
        half = np.column_stack([np.cos(phi), np.sin(phi)])
        # storing [half; -half] makes the antipodal map an exact index shift
        return cls(np.vstack([half, -half]))

    @classmethod
    def sphere(cls, n: int, m: int = 4096) -> "DirectionGrid":
        """Symmetrized low-discrepancy directions on S^{n-1} for n >= 3.

        Half the points come from a scrambled-free Sobol sequence pushed
        through the inverse normal CDF and normalized; the other half are
        their negations.
        """
        if n < 3:
            raise InputError("use uniform_circle for n = 2")
        if m % 2 != 0:
            raise InputError("sphere grid size must be even")
        sob = qmc.Sobol(d=n, scramble=True, seed=20240811)
        # draw a power-of-two block (Sobol balance), keep the half we need
        draw = 1 << int(np.ceil(np.log2(m // 2)))
        raw = sob.random(draw)[: m // 2]
        g = scipy.special.ndtri(np.clip(raw, 1e-12, 1 - 1e-12))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        g /= norms
        return cls(np.vstack([g, -g]))

    @classmethod
    def for_dimension(cls, n: int, m: Optional[int] = None) -> "DirectionGrid":
        if n == 2:
            return cls.uniform_circle(m or 720)
        return cls.sphere(n, m or 4096)

    def closed_under(self, subspaces: Sequence[Subspace], max_rounds: int = 8) -> "DirectionGrid":
        """Extend the grid so each reflection R_H maps it onto itself.

        Reflections with angles incommensurable to pi generate infinite
        orbits, so closure under several of those cannot terminate; the
        round limit turns that into an explicit failure.
        """
        dirs = self.directions
        mats = [h.reflection_matrix() for h in subspaces]
        for _ in range(max_rounds):
            images = [dirs] + [dirs @ r.T for r in mats] + [-dirs]
            merged = _dedup_rows(np.vstack(images))
            if merged.shape[0] == dirs.shape[0]:
                return DirectionGrid(_pair_antipodes(merged))
            dirs = merged
        raise NumericalError(
            "direction grid did not close under the requested reflections "
            f"within {max_rounds} rounds ({dirs.shape[0]} directions so far); "
            "the reflections likely generate an infinite orbit"
        )

    # -- structure ---------------------------------------------------------

    @property
    def n(self) -> int:
        return self.directions.shape[1]

    @property
    def size(self) -> int:
        return self.directions.shape[0]

    def _tree(self) -> cKDTree:
        cache = self.__dict__["_cache"]
        if "tree" not in cache:
            cache["tree"] = cKDTree(self.directions)
        return cache["tree"]

    @property
    def antipode(self) -> np.ndarray:
        """Index map j -> index of -u_j; exact by construction."""
        cache = self.__dict__["_cache"]
        if "antipode" not in cache:
            m = self.size
            if m % 2 == 0:
                half = m // 2
                idx = np.concatenate([np.arange(half) + half, np.arange(half)])
                if np.allclose(
                    self.directions[idx], -self.directions, atol=1e-12
                ):
                    cache["antipode"] = idx
                    return idx
            dist, idx = self._tree().query(-self.directions)
            if np.max(dist) > 1e-9:
                raise InputError("grid is not closed under negation")
            cache["antipode"] = idx
        return cache["antipode"]

    def reflection_index_map(self, h: Subspace) -> np.ndarray:
        """Index map j -> index of R_H u_j.  Raises when the grid is not
        closed under R_H; no interpolation is ever attempted."""
        reflected = self.directions @ h.reflection_matrix().T
        dist, idx = self._tree().query(reflected)
        if np.max(dist) > 1e-9:
            raise InputError(
                "grid is not closed under the reflection through the given "
                f"subspace (worst mismatch {np.max(dist):.2e}); build the grid "
                "with closed_under([H])"
            )
        return idx


def _dedup_rows(rows: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Greedy merge of rows closer than tol (KD-tree, order-stable)."""
    tree = cKDTree(rows)
    claimed = np.zeros(rows.shape[0], dtype=bool)
    keep = []
    for j in range(rows.shape[0]):
        if claimed[j]:
            continue
        keep.append(j)
        for other in tree.query_ball_point(rows[j], tol):
            claimed[other] = True
    return rows[keep]


def _pair_antipodes(dirs: np.ndarray) -> np.ndarray:
    """Order directions as [half; -half] so the antipode map is an index
    shift.  Requires the set to be negation-closed."""
    tree = cKDTree(dirs)
    dist, idx = tree.query(-dirs)
    if np.max(dist) > 1e-9:
        raise NumericalError("direction set lost negation closure")
    seen = np.zeros(len(dirs), dtype=bool)
    half = []
    for j in range(len(dirs)):
        if not seen[j]:
            half.append(dirs[j])
            seen[j] = True
            seen[idx[j]] = True
    half = np.array(half)
    return np.vstack([half, -half])


# --------------------------------------------------------------------------
# polytopes
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex polytope stored as deduplicated extreme vertices.

    In the plane the vertices are kept in counterclockwise hull order, which
    makes the shoelace area exact.  Degenerate inputs (segments, single
    points, flat point sets) are reduced in their affine hull instead of
    being rejected.
    """

    vertices: np.ndarray

    def __post_init__(self):
        verts = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if verts.ndim != 2 or verts.shape[0] < 1:
            raise InputError("vertices must form a nonempty (m, n) array")
        object.__setattr__(self, "vertices", _extreme_points(verts))

    @classmethod
    def from_points(cls, points) -> "Polytope":
        return cls(points)

    @classmethod
    def cube(cls, n: int, half_side: float = 1.0) -> "Polytope":
        corners = np.array(
            np.meshgrid(*([[-half_side, half_side]] * n), indexing="ij")
        ).reshape(n, -1).T
        return cls(corners)

    @classmethod
    def regular_polygon(cls, sides: int, radius: float = 1.0, phase: float = 0.0) -> "Polytope":
        phi = phase + 2 * np.pi * np.arange(sides) / sides
        return cls(radius * np.column_stack([np.cos(phi), np.sin(phi)]))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def support(self, directions) -> np.ndarray:
        """h(u) = max over vertices of u . v, vectorized over directions."""
        dirs = np.atleast_2d(np.asarray(directions, dtype=float))
        return np.max(dirs @ self.vertices.T, axis=1)

    def support_points(self, directions) -> np.ndarray:
        dirs = np.atleast_2d(np.asarray(directions, dtype=float))
        idx = np.argmax(dirs @ self.vertices.T, axis=1)
        return self.vertices[idx]

    def translate(self, v) -> "Polytope":
        return Polytope(self.vertices + np.asarray(v, dtype=float))

    def transform(self, q) -> "Polytope":
        return Polytope(self.vertices @ np.asarray(q, dtype=float).T)

    def reflect(self, h: Subspace) -> "Polytope":
        return Polytope(h.reflect(self.vertices))

    def volume(self) -> float:
        """Exact shoelace area in the plane; Qhull volume in higher
        dimension; zero for degenerate polytopes."""
        v = self.vertices
        n = self.dim
        if v.shape[0] <= n:
            return 0.0
        if n == 2:
            x, y = v[:, 0], v[:, 1]
            return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
        try:
            return float(scipy.spatial.ConvexHull(v).volume)
        except QhullError:
            return 0.0

    def bounding_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def facet_inequalities(self) -> tuple[np.ndarray, np.ndarray]:
        """(A, b) with the polytope equal to {x : A x <= b}; requires full
        dimension."""
        try:
            hull = scipy.spatial.ConvexHull(self.vertices)
        except QhullError as exc:
            raise InputError("polytope is not full-dimensional") from exc
        eq = hull.equations
        return eq[:, :-1], -eq[:, -1]

    def contains(self, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
        a, b = self.facet_inequalities()
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all(pts @ a.T <= b + tol, axis=1)


def _dedup_points(points: np.ndarray, decimals: int = 10) -> np.ndarray:
    keyed = {}
    for p in points:
        keyed.setdefault(tuple(np.round(p, decimals)), p)
    return np.array(list(keyed.values()), dtype=float)


def _extreme_points(points: np.ndarray) -> np.ndarray:
    """Extreme points of conv(points), handling flat point sets by working
    inside their affine hull.  2-d results come back in CCW order."""
    pts = _dedup_points(points)
    m, n = pts.shape
    if m == 1:
        return pts
    center = pts.mean(axis=0)
    centered = pts - center
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(s > max(m, n) * np.finfo(float).eps * s[0])) if s[0] > 0 else 0
    if rank == 0:
        return pts[:1]
    if rank == 1:
        axis = vt[0]
        t = centered @ axis
        return np.array([pts[np.argmin(t)], pts[np.argmax(t)]])
    coords = centered @ vt[:rank].T
    try:
        hull = scipy.spatial.ConvexHull(coords)
    except QhullError:
        # Nearly-flat in the reduced space as well; drop the weakest axis.
        coords = centered @ vt[: rank - 1].T
        if coords.shape[1] == 0:
            return pts[:1]
        hull = scipy.spatial.ConvexHull(coords)
    verts = pts[hull.vertices]
    if rank == 2 and n == 2:
        return verts  # Qhull returns 2-d hull vertices in CCW order
    return verts


# --------------------------------------------------------------------------
# support vectors
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SupportVector:
    """Support-function samples h(u) on a direction grid.

    ``provenance`` names the generator ("polytope", "ball", or an operator
    tag); when the generator can evaluate h exactly at arbitrary directions
    it is kept as ``evaluator`` so quadrature-based operators do not have to
    interpolate grid samples.
    """

    grid: DirectionGrid
    values: np.ndarray
    provenance: str
    evaluator: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.size,):
            raise InputError("values must match the grid size")
        widths = vals + vals[self.grid.antipode]
        if np.min(widths) < -1e-9:
            raise InputError(
                "support values have negative width along some direction; "
                "not a support function of a nonempty set"
            )
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_polytope(cls, poly: Polytope, grid: DirectionGrid) -> "SupportVector":
        if poly.dim != grid.n:
            raise InputError("polytope and grid dimensions differ")
        return cls(grid, poly.support(grid.directions), "polytope", poly.support)

    @classmethod
    def from_ball(cls, radius: float, grid: DirectionGrid) -> "SupportVector":
        if radius < 0:
            raise InputError("ball radius must be nonnegative")
        values = np.full(grid.size, float(radius))
        return cls(grid, values, "ball", lambda d: np.full(np.atleast_2d(d).shape[0], float(radius)))

    @classmethod
    def from_evaluator(
        cls, evaluator, grid: DirectionGrid, provenance: str
    ) -> "SupportVector":
        return cls(grid, np.asarray(evaluator(grid.directions), dtype=float), provenance, evaluator)

    @property
    def dim(self) -> int:
        return self.grid.n

    def evaluate(self, directions) -> np.ndarray:
        """h at arbitrary unit directions; exact when an evaluator is
        attached, otherwise a nearest-grid-direction lookup (documented
        estimate)."""
        dirs = np.atleast_2d(np.asarray(directions, dtype=float))
        if self.evaluator is not None:
            return np.asarray(self.evaluator(dirs), dtype=float)
        _, idx = self.grid._tree().query(dirs)
        return self.values[idx]

    def mean_width(self) -> float:
        return float(np.mean(self.values + self.values[self.grid.antipode]))


# --------------------------------------------------------------------------
# voxel sets
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VoxelSet:
    """Occupancy grid over an axis-aligned box with cubical cells (n = 2, 3).

    A cell is identified with its center; geometric predicates on cells use
    the centers.  The box may differ per axis but the cell edge length must
    be uniform, which the distance-transform based metrics rely on.
    """

    box_lo: np.ndarray
    box_hi: np.ndarray
    occupancy: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.box_lo, dtype=float)
        hi = np.asarray(self.box_hi, dtype=float)
        occ = np.asarray(self.occupancy, dtype=bool)
        n = occ.ndim
        if n not in (2, 3):
            raise InputError("voxel sets support n = 2 or 3 only")
        if lo.shape != (n,) or hi.shape != (n,):
            raise InputError("box corners must match the occupancy rank")
        if np.any(hi <= lo):
            raise InputError("box must have positive extent")
        sizes = (hi - lo) / np.array(occ.shape)
        if np.max(sizes) - np.min(sizes) > 1e-9 * np.max(sizes):
            raise InputError("cells must be cubical: (hi-lo)/shape equal per axis")
        if not occ.any():
            raise InputError("voxel set is empty")
        object.__setattr__(self, "box_lo", lo)
        object.__setattr__(self, "box_hi", hi)
        object.__setattr__(self, "occupancy", occ)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_indicator(cls, fn, box_lo, box_hi, shape) -> "VoxelSet":
        lo = np.asarray(box_lo, dtype=float)
        hi = np.asarray(box_hi, dtype=float)
        shape = tuple(int(s) for s in np.atleast_1d(shape))
        if len(shape) == 1:
            shape = shape * len(lo)
        centers = _grid_centers(lo, hi, shape)
        occ = np.asarray(fn(centers.reshape(-1, len(lo))), dtype=bool).reshape(shape)
        return cls(lo, hi, occ)

    @classmethod
    def ball(cls, n: int, radius: float, resolution: int, box_half: Optional[float] = None) -> "VoxelSet":
        half = box_half if box_half is not None else radius * 1.25
        return cls.from_indicator(
            lambda p: np.linalg.norm(p, axis=1) <= radius + BOUNDARY_TOL,
            [-half] * n,
            [half] * n,
            (resolution,) * n,
        )

    @property
    def dim(self) -> int:
        return self.occupancy.ndim

    @property
    def resolution(self) -> tuple[int, ...]:
        return self.occupancy.shape

    @property
    def cell_size(self) -> float:
        return float((self.box_hi[0] - self.box_lo[0]) / self.occupancy.shape[0])

    @property
    def cell_volume(self) -> float:
        return self.cell_size ** self.dim

    def axis_centers(self, axis: int) -> np.ndarray:
        count = self.occupancy.shape[axis]
        c = self.cell_size
        return self.box_lo[axis] + (np.arange(count) + 0.5) * c

    def occupied_centers(self) -> np.ndarray:
        idx = np.argwhere(self.occupancy)
        return self.box_lo + (idx + 0.5) * self.cell_size

    def count(self) -> int:
        return int(self.occupancy.sum())

    def volume(self) -> float:
        return self.count() * self.cell_volume

    def boundary_mask(self) -> np.ndarray:
        """Occupied cells with an unoccupied (or out-of-box) neighbor."""
        interior = scipy.ndimage.binary_erosion(self.occupancy, border_value=0)
        return self.occupancy & ~interior

    def bounding_radius(self) -> float:
        centers = self.occupied_centers()
        return float(np.max(np.linalg.norm(centers, axis=1))) + 0.5 * self.cell_size * np.sqrt(self.dim)

    def support(self, directions) -> np.ndarray:
        """Support values of the occupied cell centers (half-cell low)."""
        dirs = np.atleast_2d(np.asarray(directions, dtype=float))
        centers = self.occupied_centers()
        out = np.empty(dirs.shape[0])
        # chunk to bound the temporary matrix
        step = max(1, int(2e7 // max(centers.shape[0], 1)))
        for s in range(0, dirs.shape[0], step):
            out[s : s + step] = np.max(dirs[s : s + step] @ centers.T, axis=1)
        return out

    def translate(self, v) -> "VoxelSet":
        v = np.asarray(v, dtype=float)
        return VoxelSet(self.box_lo + v, self.box_hi + v, self.occupancy)

    def resample(self, box_lo, box_hi, shape) -> "VoxelSet":
        """Nearest-center resampling onto a new grid: a target cell is
        occupied iff the source cell containing its center is occupied."""
        lo = np.asarray(box_lo, dtype=float)
        hi = np.asarray(box_hi, dtype=float)
        shape = tuple(int(s) for s in shape)
        centers = _grid_centers(lo, hi, shape).reshape(-1, self.dim)
        occ = self.contains_points(centers).reshape(shape)
        return VoxelSet(lo, hi, occ)

    def contains_points(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rel = (pts - self.box_lo) / self.cell_size
        idx = np.floor(rel + BOUNDARY_TOL).astype(int)
        shape = np.array(self.occupancy.shape)
        inside = np.all((idx >= 0) & (idx < shape), axis=1)
        out = np.zeros(pts.shape[0], dtype=bool)
        if inside.any():
            sel = idx[inside]
            out[inside] = self.occupancy[tuple(sel.T)]
        return out

    def transform(self, q) -> "VoxelSet":
        """Rigid rotation of the set: rotate the box, lay a symmetric target
        grid over it with the same cell size, and resample by nearest
        center.  Signed-permutation rotations are applied exactly."""
        q = np.asarray(q, dtype=float)
        exact = _signed_permutation(q)
        if exact is not None:
            perm, signs = exact
            occ = self.occupancy
            lo, hi = self.box_lo.copy(), self.box_hi.copy()
            # target axis a takes source axis perm[a] with sign signs[a]
            occ = np.transpose(occ, axes=perm)
            new_lo = np.empty(self.dim)
            new_hi = np.empty(self.dim)
            for a in range(self.dim):
                src = perm[a]
                if signs[a] < 0:
                    occ = np.flip(occ, axis=a)
                    new_lo[a], new_hi[a] = -hi[src], -lo[src]
                else:
                    new_lo[a], new_hi[a] = lo[src], hi[src]
            return VoxelSet(new_lo, new_hi, occ)
        corners = _box_corners(self.box_lo, self.box_hi) @ q.T
        c = self.cell_size
        ext = np.max(np.abs(corners), axis=0) + c
        shape = tuple(int(np.ceil(e / c) * 2) for e in ext)
        lo = -0.5 * c * np.array(shape)
        hi = -lo
        centers = _grid_centers(lo, hi, shape).reshape(-1, self.dim)
        occ = self.contains_points(centers @ q).reshape(shape)
        if not occ.any():
            raise NumericalError("rotation resample produced an empty voxel set")
        return VoxelSet(lo, hi, occ)

    def reflect(self, h: Subspace) -> "VoxelSet":
        return self.transform(h.reflection_matrix())


def _signed_permutation(q: np.ndarray) -> Optional[tuple[list[int], list[int]]]:
    n = q.shape[0]
    perm, signs = [], []
    for row in q:
        nz = np.nonzero(np.abs(row) > 1e-12)[0]
        if len(nz) != 1 or abs(abs(row[nz[0]]) - 1.0) > 1e-12:
            return None
        perm.append(int(nz[0]))
        signs.append(1 if row[nz[0]] > 0 else -1)
    if sorted(perm) != list(range(n)):
        return None
    return perm, signs


def _box_corners(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    n = len(lo)
    bounds = [(lo[a], hi[a]) for a in range(n)]
    return np.array(np.meshgrid(*bounds, indexing="ij")).reshape(n, -1).T


def _grid_centers(lo, hi, shape) -> np.ndarray:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    axes = [
        lo[a] + (np.arange(shape[a]) + 0.5) * (hi[a] - lo[a]) / shape[a]
        for a in range(len(shape))
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1)


# --------------------------------------------------------------------------
# origin-centered balls
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OriginBall:
    """The closed ball r B^n centered at the origin."""

    dim: int
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise InputError("radius must be nonnegative")

    def support(self, directions) -> np.ndarray:
        dirs = np.atleast_2d(np.asarray(directions, dtype=float))
        return np.full(dirs.shape[0], float(self.radius))

    def volume(self) -> float:
        n, r = self.dim, self.radius
        return float(np.pi ** (n / 2) / scipy.special.gamma(n / 2 + 1) * r**n)


Body = object  # Polytope | SupportVector | VoxelSet | OriginBall


# --------------------------------------------------------------------------
# conversions
# --------------------------------------------------------------------------


def voxelize_polytope(
    poly: Polytope,
    resolution: int,
    box_lo=None,
    box_hi=None,
    pad_cells: int = 1,
) -> VoxelSet:
    """Rasterize a full-dimensional polytope: a cell is occupied iff its
    center satisfies every facet inequality (boundary ties to occupied)."""
    a, b = poly.facet_inequalities()
    if box_lo is None or box_hi is None:
        lo, hi = poly.bounding_box()
        cell = float(np.max(hi - lo)) / max(resolution - 2 * pad_cells, 1)
        lo = lo - pad_cells * cell
        hi = lo + resolution * cell
    else:
        lo = np.asarray(box_lo, dtype=float)
        hi = np.asarray(box_hi, dtype=float)
    return VoxelSet.from_indicator(
        lambda p: np.all(p @ a.T <= b + BOUNDARY_TOL, axis=1),
        lo,
        hi,
        (resolution,) * poly.dim,
    )


def voxelize_support(
    sv: SupportVector, resolution: int, box_lo=None, box_hi=None
) -> VoxelSet:
    """Rasterize the outer polyhedron {x : x . u <= h(u) for grid u}."""
    dirs = sv.grid.directions
    vals = sv.values
    if box_lo is None or box_hi is None:
        r = float(np.max(np.abs(vals))) * 1.05 + BOUNDARY_TOL
        lo = np.full(sv.dim, -r)
        hi = np.full(sv.dim, r)
    else:
        lo, hi = np.asarray(box_lo, dtype=float), np.asarray(box_hi, dtype=float)

    def inside(p):
        out = np.ones(p.shape[0], dtype=bool)
        step = max(1, int(2e7 // max(dirs.shape[0], 1)))
        for s in range(0, p.shape[0], step):
            out[s : s + step] = np.all(
                p[s : s + step] @ dirs.T <= vals + BOUNDARY_TOL, axis=1
            )
        return out

    return VoxelSet.from_indicator(inside, lo, hi, (resolution,) * sv.dim)


def devoxelize(vox: VoxelSet) -> Polytope:
    """Convex hull of the corners of the boundary cells."""
    mask = vox.boundary_mask()
    idx = np.argwhere(mask)
    c = vox.cell_size
    n = vox.dim
    offsets = _box_corners(np.zeros(n), np.ones(n))
    corners = (vox.box_lo + idx[:, None, :] * c + offsets[None, :, :] * c).reshape(-1, n)
    return Polytope(corners)


def convert(body, kind: str, *, grid: Optional[DirectionGrid] = None,
            resolution: Optional[int] = None, box_lo=None, box_hi=None):
    """Convert between representations.

    Supported: Polytope -> support/voxel, SupportVector -> voxel,
    VoxelSet -> polytope, OriginBall -> any.  Everything else raises
    InputError; silent lossy chains are deliberately not provided.
    """
    if kind == "polytope":
        if isinstance(body, Polytope):
            return body
        if isinstance(body, VoxelSet):
            return devoxelize(body)
        if isinstance(body, OriginBall):
            raise InputError("a ball has no finite vertex representation")
    elif kind == "support":
        if isinstance(body, SupportVector):
            return body
        if isinstance(body, Polytope):
            return SupportVector.from_polytope(body, grid or DirectionGrid.for_dimension(body.dim))
        if isinstance(body, OriginBall):
            return SupportVector.from_ball(body.radius, grid or DirectionGrid.for_dimension(body.dim))
    elif kind == "voxel":
        if isinstance(body, VoxelSet):
            return body
        res = resolution or 256
        if isinstance(body, Polytope):
            return voxelize_polytope(body, res, box_lo=box_lo, box_hi=box_hi)
        if isinstance(body, SupportVector):
            return voxelize_support(body, res, box_lo=box_lo, box_hi=box_hi)
        if isinstance(body, OriginBall):
            return VoxelSet.ball(body.dim, body.radius, res)
    else:
        raise InputError(f"unknown representation kind {kind!r}")
    raise InputError(
        f"conversion {type(body).__name__} -> {kind} is not supported"
    )


# --------------------------------------------------------------------------
# metrics
# --------------------------------------------------------------------------


def support_of(body, directions) -> np.ndarray:
    if isinstance(body, (Polytope, VoxelSet, OriginBall)):
        return body.support(directions)
    if isinstance(body, SupportVector):
        return body.evaluate(directions)
    raise InputError(f"no support function for {type(body).__name__}")


def volume(body) -> float:
    if isinstance(body, (Polytope, VoxelSet, OriginBall)):
        return body.volume()
    if isinstance(body, SupportVector):
        # quadrature-free estimate via rasterization; documented as such
        return voxelize_support(body, 256).volume()
    raise InputError(f"no volume for {type(body).__name__}")


def mean_width(body, grid: Optional[DirectionGrid] = None) -> float:
    """Average of h(u) + h(-u) over the grid directions."""
    if isinstance(body, SupportVector) and grid is None:
        return body.mean_width()
    if isinstance(body, SupportVector):
        vals = body.evaluate(grid.directions)
        return float(np.mean(vals + vals[grid.antipode]))
    g = grid or DirectionGrid.for_dimension(_dim_of(body))
    vals = support_of(body, g.directions)
    return float(np.mean(vals + vals[g.antipode]))


def ball_deviation(body, grid: Optional[DirectionGrid] = None) -> tuple[float, float]:
    """(radius, deviation) of the closest centered ball.

    Support representations use (max h + min h)/2 and (max h - min h)/2.
    Voxel sets use the distances of boundary cells from the origin, which
    also sees internal cavities.
    """
    if isinstance(body, VoxelSet):
        dists = np.linalg.norm(
            (np.argwhere(body.boundary_mask()) + 0.5) * body.cell_size + body.box_lo,
            axis=1,
        )
        hi, lo = float(np.max(dists)), float(np.min(dists))
        return (hi + lo) / 2, (hi - lo) / 2
    if isinstance(body, SupportVector) and grid is None:
        vals = body.values
    else:
        g = grid or DirectionGrid.for_dimension(_dim_of(body))
        vals = support_of(body, g.directions)
    hi, lo = float(np.max(vals)), float(np.min(vals))
    return (hi + lo) / 2, (hi - lo) / 2


def bounding_radius(body) -> float:
    if isinstance(body, (Polytope, VoxelSet)):
        return body.bounding_radius()
    if isinstance(body, OriginBall):
        return body.radius
    if isinstance(body, SupportVector):
        return float(np.max(body.values))
    raise InputError(f"no bounding radius for {type(body).__name__}")


def _dim_of(body) -> int:
    if isinstance(body, (Polytope, SupportVector, VoxelSet)):
        return body.dim
    if isinstance(body, OriginBall):
        return body.dim
    raise InputError(f"not a body: {type(body).__name__}")


def _common_voxel_grid(a: VoxelSet, b: VoxelSet) -> tuple[VoxelSet, VoxelSet]:
    if (
        a.occupancy.shape == b.occupancy.shape
        and np.allclose(a.box_lo, b.box_lo, atol=BOUNDARY_TOL)
        and np.allclose(a.box_hi, b.box_hi, atol=BOUNDARY_TOL)
    ):
        return a, b
    cell = min(a.cell_size, b.cell_size)
    lo = np.minimum(a.box_lo, b.box_lo)
    hi = np.maximum(a.box_hi, b.box_hi)
    shape = tuple(int(np.ceil((hi[ax] - lo[ax]) / cell)) for ax in range(a.dim))
    hi = lo + cell * np.array(shape)
    return a.resample(lo, hi, shape), b.resample(lo, hi, shape)


def _voxel_directed_hausdorff(a: VoxelSet, b: VoxelSet) -> float:
    """max over occupied centers of a of the distance to the nearest
    occupied center of b (grids must match)."""
    dist_to_b = scipy.ndimage.distance_transform_edt(
        ~b.occupancy, sampling=b.cell_size
    )
    vals = dist_to_b[a.occupancy]
    return float(np.max(vals)) if vals.size else 0.0


def _polygon_point_distance(poly: Polytope, points: np.ndarray) -> np.ndarray:
    """Distance from points to a convex polygon (vertices in CCW order)."""
    v = poly.vertices
    if v.shape[0] == 1:
        return np.linalg.norm(points - v[0], axis=1)
    edges = np.roll(v, -1, axis=0) - v
    out = np.full(points.shape[0], np.inf)
    for start, edge in zip(v, edges):
        ln2 = edge @ edge
        if ln2 == 0:
            continue
        t = np.clip((points - start) @ edge / ln2, 0.0, 1.0)
        proj = start + t[:, None] * edge
        out = np.minimum(out, np.linalg.norm(points - proj, axis=1))
    # interior points are at distance zero
    if v.shape[0] >= 3:
        out[poly.contains(points)] = 0.0
    return out


def hausdorff_distance(a, b, grid: Optional[DirectionGrid] = None) -> float:
    """Hausdorff distance between two bodies.

    Exact for 2-d polytope pairs (vertex-to-boundary both ways) and for
    voxel pairs on a shared grid (two-sided distance-transform sup-inf over
    cell centers).  Support-vector pairs on one grid give max |h_A - h_B|,
    a lower bound that is what the iteration plateaus are measured with.
    Mixed kinds are converted: anything involving a voxel set compares as
    voxels, otherwise as support vectors.
    """
    if isinstance(a, Polytope) and isinstance(b, Polytope) and a.dim == b.dim == 2:
        d_ab = float(np.max(_polygon_point_distance(b, a.vertices)))
        d_ba = float(np.max(_polygon_point_distance(a, b.vertices)))
        return max(d_ab, d_ba)
    if isinstance(a, VoxelSet) or isinstance(b, VoxelSet):
        av = a if isinstance(a, VoxelSet) else convert(a, "voxel", resolution=256)
        bv = b if isinstance(b, VoxelSet) else convert(b, "voxel", resolution=256)
        av, bv = _common_voxel_grid(av, bv)
        return max(_voxel_directed_hausdorff(av, bv), _voxel_directed_hausdorff(bv, av))
    if isinstance(a, SupportVector) and isinstance(b, SupportVector) and grid is None:
        if a.grid is b.grid or np.array_equal(a.grid.directions, b.grid.directions):
            return float(np.max(np.abs(a.values - b.values)))
        grid = a.grid
    g = grid or DirectionGrid.for_dimension(_dim_of(a))
    va = support_of(a, g.directions)
    vb = support_of(b, g.directions)
    return float(np.max(np.abs(va - vb)))
