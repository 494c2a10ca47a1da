"""Symmetry predicates on bodies and diagnostics for subspace families.

Two kinds of question live here.  The body-level predicates ask whether a
concrete set is (rotationally) symmetric with respect to a subspace, up to a
stated tolerance.  The family-level diagnostics check the algebraic
conditions under which iterated reflections generate enough of the rotation
group: spanning, absence of an orthogonal partition, and the chain condition
on successive subspaces.  Irrationality of angle ratios is reported through
continued-fraction convergents but never certified; it is not decidable from
floating point data.

`orbit_density` is a randomized stand-in for the density conclusions: it
applies random reflection words to a seed direction and measures how well
the resulting orbit covers the sphere.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.ndimage
import scipy.spatial

from .bodies import (
    DirectionGrid,
    OriginBall,
    Polytope,
    SupportVector,
    VoxelSet,
    _signed_permutation,
    hausdorff_distance,
)
from .errors import InputError
from .subspaces import Subspace, principal_angles

ORTHOGONALITY_TOL = 1e-10
_TEST_SAMPLE_SIZE = 2000
_TEST_SAMPLE_SEED = 20240813


# --------------------------------------------------------------------------
# body-level predicates
# --------------------------------------------------------------------------

def _reflected(body, h: Subspace):
    if isinstance(body, OriginBall):
        return body
    if isinstance(body, (Polytope, VoxelSet)):
        return body.reflect(h)
    if isinstance(body, SupportVector):
        try:
            perm = body.grid.reflection_index_map(h)
        except InputError:
            perm = None
        if perm is not None:
            ev = body.evaluator
            r = h.reflection_matrix()
            new_ev = (lambda d, _e=ev, _r=r: _e(np.asarray(d) @ _r.T)) if ev else None
            return SupportVector(body.grid, body.values[perm], body.provenance, new_ev)
        if body.evaluator is not None:
            r = h.reflection_matrix()
            vals = body.evaluator(body.grid.directions @ r.T)
            return SupportVector(
                body.grid, np.asarray(vals, float), body.provenance,
                lambda d, _e=body.evaluator, _r=r: _e(np.asarray(d) @ _r.T),
            )
        raise InputError(
            "support vector cannot be reflected: grid not closed under the "
            "reflection and no exact evaluator attached"
        )
    raise InputError(f"unsupported body type {type(body).__name__}")


def is_symmetric(body, h: Subspace, tol: float) -> bool:
    """True iff the body is within Hausdorff distance tol of its reflection
    through h."""
    return hausdorff_distance(_reflected(body, h), body) <= tol


# one radian: not a rational multiple of pi, so a compact set invariant
# under this rotation of the complement is invariant under the whole circle
_REVOLUTION_TEST_ANGLE = 1.0


def _complement_rotations(d: int) -> List[np.ndarray]:
    """Test rotations of the d-dimensional orthogonal complement: a half
    turn and a one-radian turn in each leading coordinate plane; for d = 1
    the group degenerates to the reflection."""
    if d == 1:
        return [np.array([[-1.0]])]
    out = []
    for phi in (np.pi, _REVOLUTION_TEST_ANGLE):
        c, s = np.cos(phi), np.sin(phi)
        for a in range(d - 1):
            r = np.eye(d)
            r[a, a] = c
            r[a, a + 1] = -s
            r[a + 1, a] = s
            r[a + 1, a + 1] = c
            out.append(r)
    return out


def is_rotationally_symmetric(vox: VoxelSet, h: Subspace, tol_cells: float) -> bool:
    """True iff the voxel set is a body of revolution about h, to tol_cells
    cells.

    When h aligns with the grid axes the lattice maps onto itself exactly,
    and each fiber over H is compared with the centered discrete ball of
    the same cell count, within tol_cells of center-to-center distance
    (tol 0 then certifies exact discrete balls).  For an oblique subspace
    that fiberwise comparison drowns in resampling noise wherever the
    radius profile is steep (tips, cylinder rims), so the set is instead
    compared against its own rotations about h in Hausdorff distance."""
    from .operators import _to_aligned

    if not isinstance(vox, VoxelSet):
        raise InputError("rotational symmetry check needs a voxel set")
    if not (1 <= h.dim <= vox.dim - 1):
        raise InputError("subspace dimension must be between 1 and n-1")
    i = h.dim
    n = vox.dim
    q = np.vstack([h.basis, h.complement().basis])
    if _signed_permutation(q) is None:
        tol = tol_cells * vox.cell_size
        for rot in _complement_rotations(n - i):
            m = np.eye(n)
            m[i:, i:] = rot
            if hausdorff_distance(vox, vox.transform(q.T @ m @ q)) > tol:
                return False
        return True
    aligned, _ = _to_aligned(vox, h)
    occ = aligned.occupancy
    trailing = tuple(range(i, aligned.dim))
    tshape = tuple(occ.shape[a] for a in trailing)
    centers = [aligned.axis_centers(a) for a in trailing]
    grids = np.meshgrid(*centers, indexing="ij")
    norm2 = sum(g * g for g in grids).reshape(-1)
    order = np.lexsort((np.arange(norm2.size), norm2))
    flat = occ.reshape(occ.shape[:i] + (-1,))
    worst = 0.0
    for idx in np.ndindex(*occ.shape[:i]):
        fib = flat[idx]
        k = int(fib.sum())
        if k == 0:
            continue
        ball = np.zeros_like(fib)
        ball[order[:k]] = True
        if np.array_equal(fib, ball):
            continue
        a = fib.reshape(tshape)
        b = ball.reshape(tshape)
        gap = 0.0
        extra = a & ~b
        if extra.any():
            gap = float(scipy.ndimage.distance_transform_edt(~b)[extra].max())
        missing = b & ~a
        if missing.any():
            gap = max(gap, float(
                scipy.ndimage.distance_transform_edt(~a)[missing].max()))
        worst = max(worst, gap)
        if worst > tol_cells:
            return False
    return worst <= tol_cells


# --------------------------------------------------------------------------
# family diagnostics
# --------------------------------------------------------------------------

@dataclass
class PairAngle:
    pair: Tuple[int, int]
    angle: float
    angle_over_pi: float
    best_p: int
    best_q: int
    approx_error: float

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "angle": self.angle,
            "angle_over_pi": self.angle_over_pi,
            "best_p": self.best_p,
            "best_q": self.best_q,
            "approx_error": self.approx_error,
        }


@dataclass
class FamilyDiagnostics:
    spans_ambient: bool
    orthogonal_partition_found: Optional[Tuple[List[int], List[int]]]
    irrationality_report: List[PairAngle] = field(default_factory=list)
    chain_condition: List[bool] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "spans_ambient": self.spans_ambient,
            "orthogonal_partition_found": (
                None if self.orthogonal_partition_found is None
                else [list(s) for s in self.orthogonal_partition_found]
            ),
            "irrationality_report": [p.to_dict() for p in self.irrationality_report],
            "chain_condition": list(self.chain_condition),
        }


def _stacked_rank(bases: Sequence[np.ndarray]) -> int:
    stacked = np.vstack(bases)
    return int(np.linalg.matrix_rank(stacked, tol=1e-10))


def _orthogonal_partition(bases: Sequence[np.ndarray]) -> Optional[Tuple[List[int], List[int]]]:
    """Split of indices into two nonempty groups with all cross inner
    products below the orthogonality threshold, found as a disconnected
    component of the non-orthogonality graph; None when the graph is
    connected."""
    k = len(bases)
    adj = [[] for _ in range(k)]
    for a in range(k):
        for b in range(a + 1, k):
            if np.max(np.abs(bases[a] @ bases[b].T)) > ORTHOGONALITY_TOL:
                adj[a].append(b)
                adj[b].append(a)
    seen = np.zeros(k, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                stack.append(w)
    if seen.all():
        return None
    comp = [a for a in range(k) if seen[a]]
    rest = [a for a in range(k) if not seen[a]]
    return comp, rest


def _chain_condition(bases: Sequence[np.ndarray], n: int) -> List[bool]:
    """Per-index check that each subspace meets the orthogonal complement of
    the span of its predecessors only at the origin (rank additivity)."""
    out = [True]
    running = bases[0]
    for j in range(1, len(bases)):
        span_rank = int(np.linalg.matrix_rank(running, tol=1e-10))
        if span_rank >= n:
            # complement is {o}; the intersection is trivially {o}
            out.append(True)
        else:
            _, _, vt = np.linalg.svd(running)
            comp = vt[span_rank:]
            need = bases[j].shape[0] + comp.shape[0]
            out.append(_stacked_rank([bases[j], comp]) == need)
        running = np.vstack([running, bases[j]])
    return out


def _pair_angles(family: Sequence[Subspace]) -> List[PairAngle]:
    report = []
    for a in range(len(family)):
        for b in range(a + 1, len(family)):
            angs = principal_angles(family[a], family[b])
            theta = float(np.max(angs))
            ratio = theta / np.pi
            frac = Fraction(ratio).limit_denominator(10**6)
            report.append(PairAngle(
                pair=(a, b),
                angle=theta,
                angle_over_pi=ratio,
                best_p=frac.numerator,
                best_q=frac.denominator,
                approx_error=abs(ratio - float(frac)),
            ))
    return report


def check_family(family: Sequence[Subspace], mode: str) -> FamilyDiagnostics:
    """Diagnostics for a family of subspaces under one of three readings:
    reflection generators given by lines, by i-dimensional subspaces, or
    rotational symmetry with respect to each member (where spanning is a
    condition on the complements)."""
    if mode not in ("reflection_lines", "reflection_planes", "rotational"):
        raise InputError(f"unknown family mode {mode!r}")
    if not family:
        raise InputError("family is empty")
    n = family[0].ambient_dim
    dims = {s.dim for s in family}
    if len(dims) != 1 or any(s.ambient_dim != n for s in family):
        raise InputError("family members must share dimension and ambient space")
    if mode == "reflection_lines" and family[0].dim != 1:
        raise InputError("reflection_lines mode expects lines")

    bases = [s.basis for s in family]
    if mode == "rotational":
        span_bases = [s.complement().basis for s in family]
    else:
        span_bases = bases
    return FamilyDiagnostics(
        spans_ambient=_stacked_rank(span_bases) == n,
        orthogonal_partition_found=_orthogonal_partition(bases),
        irrationality_report=_pair_angles(family),
        chain_condition=_chain_condition(bases, n),
    )


def partition_product_body(s1: Subspace, s2: Subspace,
                           grid: Optional[DirectionGrid] = None) -> SupportVector:
    """Support function of (ball in s1) x (ball in s2), the standard witness
    that a family admitting an orthogonal partition cannot force sphericity:
    the product is rotationally symmetric about both factors but is not a
    ball."""
    if s1.ambient_dim != s2.ambient_dim:
        raise InputError("factors must share the ambient space")
    if np.max(np.abs(s1.basis @ s2.basis.T)) > ORTHOGONALITY_TOL:
        raise InputError("factors must be orthogonal")
    if s1.dim + s2.dim != s1.ambient_dim:
        raise InputError("factors must decompose the ambient space")
    n = s1.ambient_dim
    b1, b2 = s1.basis, s2.basis

    def evaluate(dirs):
        d = np.atleast_2d(np.asarray(dirs, dtype=float))
        return (np.linalg.norm(d @ b1.T, axis=1)
                + np.linalg.norm(d @ b2.T, axis=1))

    g = grid or DirectionGrid.for_dimension(n)
    return SupportVector(g, evaluate(g.directions), "product", evaluate)


# --------------------------------------------------------------------------
# orbit density probe
# --------------------------------------------------------------------------

def _sphere_sample(n: int) -> np.ndarray:
    rng = np.random.default_rng(_TEST_SAMPLE_SEED)
    pts = rng.normal(size=(_TEST_SAMPLE_SIZE, n))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def orbit_density(family: Sequence[Subspace], seed, epsilon: float,
                  max_words: int, rng_seed: int,
                  max_word_length: int = 512,
                  return_trajectory: bool = False):
    """Covering gap of the reflection orbit of a seed direction.

    Random words over the family's reflections are applied to the seed, with
    word lengths cycling 1..max_word_length and an independent rng stream
    per word (derived from rng_seed and the word index, so longer budgets
    extend shorter ones).  The gap is the maximum distance from a fixed
    2000-point sphere sample to the nearest orbit point; evaluation happens
    at geometrically spaced checkpoints and stops early once gap <= epsilon.

    Returns (covering_gap, words_used), plus the [(word_count, gap)]
    checkpoint trajectory when requested.
    """
    if epsilon <= 0:
        raise InputError("epsilon must be positive")
    if max_words < 1:
        raise InputError("word budget must be at least 1")
    n = family[0].ambient_dim
    seed = np.asarray(seed, dtype=float)
    if seed.shape != (n,) or abs(np.linalg.norm(seed) - 1.0) > 1e-9:
        raise InputError("seed must be a unit vector in the ambient space")
    refl = np.stack([s.reflection_matrix() for s in family])
    k = refl.shape[0]
    sample = _sphere_sample(n)

    if k > 127:
        raise InputError("at most 127 generators supported")
    lengths = 1 + (np.arange(max_words) % max_word_length)
    # raw per-word draws from independent streams: first entry picks the
    # initial generator, later entries pick among the k-1 generators that do
    # not cancel the previous reflection (non-backtracking; a repeated
    # reflection is the identity and would waste the step)
    draws = np.zeros((max_words, max_word_length), dtype=np.int8)
    for w in range(max_words):
        lw = int(lengths[w])
        stream = np.random.default_rng([rng_seed, w])
        draws[w, 0] = stream.integers(0, k)
        if lw > 1:
            draws[w, 1:lw] = stream.integers(0, max(k - 1, 1), lw - 1)

    pts = np.broadcast_to(seed, (max_words, n)).copy()
    prev = np.full(max_words, -1, dtype=np.int8)
    for step in range(max_word_length):
        active = lengths > step
        if not active.any():
            break
        d = draws[active, step]
        if step == 0 or k == 1:
            sel = d
        else:
            sel = d + (d >= prev[active]).astype(np.int8)
        prev[active] = sel
        pts[active] = np.einsum("wij,wj->wi", refl[sel], pts[active])

    checkpoints = []
    c = 256
    while c < max_words:
        checkpoints.append(c)
        c *= 2
    checkpoints.append(max_words)

    trajectory = []
    gap = np.inf
    used = 0
    for c in checkpoints:
        tree = scipy.spatial.cKDTree(np.vstack([seed[None, :], pts[:c]]))
        gap = float(tree.query(sample)[0].max())
        used = c
        trajectory.append((c, gap))
        if gap <= epsilon:
            break
    if return_trajectory:
        return gap, used, trajectory
    return gap, used
