"""Linear subspaces of R^n with orthonormal bases.

Provides projection and reflection maps, orthogonal complements, principal
angles between subspaces, and the two canonical constructions used to build
reflection families: a pair of i- and k-dimensional subspaces in principal
position, and the aligned triple of i-dimensional subspaces whose pairwise
principal angles are prescribed.

Bases are stored as rows.  All constructors run the vectors through modified
Gram-Schmidt with one re-orthogonalization pass; inputs whose conditioning
cannot be repaired that way are rejected rather than silently fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalError

# Orthonormality of stored bases is enforced to this tolerance.
ORTHO_TOL = 1e-12
# Relative residual below which a spanning vector counts as linearly
# dependent on its predecessors and the basis is rejected.
CONDITION_DEFECT_TOL = 1e-8
# Two subspaces are reported equal when their largest principal angle
# falls below this.
ANGLE_EQ_TOL = 1e-10


def _as_matrix(vectors) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(vectors, dtype=float))
    if arr.ndim != 2:
        raise InputError("spanning vectors must form a 2-d array")
    return arr


def orthonormalize(vectors) -> np.ndarray:
    """Modified Gram-Schmidt with a second orthogonalization pass.

    Returns an array of orthonormal rows spanning the same space.  Raises
    NumericalError when some vector is (numerically) dependent on the
    previous ones: the relative residual after projection falls below
    CONDITION_DEFECT_TOL.
    """
    arr = _as_matrix(vectors)
    rows = []
    for v in arr:
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0:
            raise NumericalError("zero vector in spanning set")
        w = v.copy()
        for _ in range(2):  # MGS + re-orthogonalization
            for q in rows:
                w = w - (q @ w) * q
        norm1 = np.linalg.norm(w)
        if norm1 / norm0 < CONDITION_DEFECT_TOL:
            raise NumericalError(
                "spanning set is too ill-conditioned to orthonormalize "
                f"(residual ratio {norm1 / norm0:.3e})"
            )
        rows.append(w / norm1)
    return np.array(rows)


@dataclass(frozen=True)
class Subspace:
    """A linear subspace given by an orthonormal row basis of shape (k, n)."""

    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2:
            raise InputError("basis must be a (k, n) array")
        k, n = basis.shape
        if not 1 <= k <= n:
            raise InputError(f"basis shape {basis.shape} is not a valid subspace")
        gram = basis @ basis.T
        if np.max(np.abs(gram - np.eye(k))) > ORTHO_TOL:
            raise InputError(
                "basis rows are not orthonormal to 1e-12; "
                "use Subspace.from_spanning to orthonormalize"
            )
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_spanning(cls, vectors) -> "Subspace":
        return cls(orthonormalize(vectors))

    @classmethod
    def line(cls, direction) -> "Subspace":
        return cls.from_spanning([np.asarray(direction, dtype=float)])

    @classmethod
    def coordinate(cls, n: int, axes) -> "Subspace":
        """Span of the given coordinate axes (0-based) in R^n."""
        basis = np.zeros((len(axes), n))
        for row, ax in enumerate(axes):
            basis[row, ax] = 1.0
        return cls(basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]

    def project(self, x) -> np.ndarray:
        """Orthogonal projection of points (..., n) onto the subspace."""
        x = np.asarray(x, dtype=float)
        return (x @ self.basis.T) @ self.basis

    def reflect(self, x) -> np.ndarray:
        """Reflection of points through the subspace: 2(x|H) - x."""
        x = np.asarray(x, dtype=float)
        return 2.0 * self.project(x) - x

    def reflection_matrix(self) -> np.ndarray:
        n = self.ambient_dim
        return 2.0 * (self.basis.T @ self.basis) - np.eye(n)

    def complement(self) -> "Subspace":
        """The orthogonal complement H^perp."""
        n = self.ambient_dim
        if self.dim == n:
            raise InputError("the full space has a trivial complement")
        # Rows of V beyond the rank of `basis` span the null space.
        _, _, vt = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(vt[self.dim:])

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(np.linalg.norm(self.project(x) - x, axis=-1) <= tol))

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def project(x, h: Subspace) -> np.ndarray:
    return h.project(x)


def reflect(x, h: Subspace) -> np.ndarray:
    return h.reflect(x)


def principal_angles(h1: Subspace, h2: Subspace) -> np.ndarray:
    """Principal angles between two subspaces, ascending, in [0, pi/2].

    Computed from the singular values of the cross-Gram matrix of the two
    orthonormal bases.  arccos of a singular value near one only resolves
    angles down to sqrt(eps), so angles below pi/4 are recomputed from the
    sine form (SVD of the residual of one basis projected off the other),
    which keeps near-equal subspaces at distance ~1e-16 instead of ~1e-8.
    """
    if h1.ambient_dim != h2.ambient_dim:
        raise InputError("subspaces live in different ambient spaces")
    if h2.dim < h1.dim:  # keep the residual computation on the smaller basis
        h1, h2 = h2, h1
    gram = h1.basis @ h2.basis.T
    sigma = np.linalg.svd(gram, compute_uv=False)
    angles = np.arccos(np.clip(sigma, 0.0, 1.0))  # ascending already
    residual = h1.basis - gram @ h2.basis
    sines = np.sort(np.linalg.svd(residual, compute_uv=False))
    small = angles < np.pi / 4
    angles[small] = np.arcsin(np.clip(sines[small], 0.0, 1.0))
    return np.sort(angles)


def subspace_distance(h1: Subspace, h2: Subspace) -> float:
    """Largest principal angle; zero (below 1e-10) means equality
    for subspaces of the same dimension."""
    return float(principal_angles(h1, h2)[-1])


def subspaces_equal(h1: Subspace, h2: Subspace) -> bool:
    return h1.dim == h2.dim and subspace_distance(h1, h2) < ANGLE_EQ_TOL


@dataclass(frozen=True)
class PrincipalForm:
    """A pair of subspaces positioned so their principal angles are explicit.

    ``h1`` is spanned by the first k coordinate axes, ``h2`` by vectors
    cos(a_j) e_j + sin(a_j) e_{i+k-j} (0-based), and ``frame`` is the
    orthonormal coordinate frame (here the standard one) the construction
    lives in.
    """

    h1: Subspace
    h2: Subspace
    angles: np.ndarray
    frame: np.ndarray = field(repr=False, default=None)

    def __iter__(self):
        return iter((self.h1, self.h2))


def _check_angles(angles, count, lo_open=True, hi_open=True):
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (count,):
        raise InputError(f"expected {count} angles, got shape {angles.shape}")
    if np.any(np.diff(angles) < 0):
        raise InputError("angles must be nondecreasing")
    lo_ok = angles > 0 if lo_open else angles >= 0
    hi_ok = angles < np.pi / 2 if hi_open else angles <= np.pi / 2
    return angles, lo_ok, hi_ok


def canonical_pair(n: int, k: int, i: int, angles) -> PrincipalForm:
    """Subspaces H1 (dim k) and H2 (dim i) of R^n in principal position.

    H1 = span{e_1, ..., e_k} and H2 is spanned by
    cos(a_j) e_j + sin(a_j) e_{i+k+1-j} for j = 1..i (1-based indices),
    with the angles nondecreasing in [0, pi/2].  When k + i > n the first
    k + i - n angles must be zero, since there is no room for that many
    independent tilt directions.
    """
    if not (1 <= i <= k <= n):
        raise InputError(f"need 1 <= i <= k <= n, got n={n}, k={k}, i={i}")
    angles, lo_ok, hi_ok = _check_angles(angles, i, lo_open=False, hi_open=False)
    if not np.all(hi_ok):
        raise InputError("angles must lie in [0, pi/2]")
    overlap = k + i - n
    if overlap > 0 and np.any(angles[:overlap] != 0.0):
        raise InputError(
            f"k + i - n = {overlap} leading angles must be zero when k + i > n"
        )
    h1 = Subspace.coordinate(n, range(k))
    basis2 = np.zeros((i, n))
    for j in range(1, i + 1):  # 1-based as in the construction
        a = angles[j - 1]
        basis2[j - 1, j - 1] = np.cos(a)
        if a != 0.0:
            partner = i + k + 1 - j  # 1-based
            if partner > n:
                raise InputError("nonzero angle needs a partner axis beyond R^n")
            basis2[j - 1, partner - 1] = np.sin(a)
    return PrincipalForm(h1=h1, h2=Subspace(basis2), angles=angles, frame=np.eye(n))


def klain_triple(n: int, i: int, angles) -> tuple[Subspace, Subspace, Subspace]:
    """The aligned triple of i-dimensional subspaces of R^n that seeds the
    finite reflection families for 2 <= i <= n/2.

    H1 = span{e_1, e_3, ..., e_{2i-1}},
    H2 = span{cos(a_j) e_{2j-1} + sin(a_j) e_{2j} : j = 1..i},
    H3 = span{cos(a_1) e_1 + sin(a_1) e_{2i}}
         + span{cos(a_j) e_{2j-1} + sin(a_j) e_{2j-2} : j = 2..i}.

    The angles must be strictly increasing in (0, pi/2); the pairs (H1, H2)
    and (H1, H3) then realize exactly those principal angles.
    """
    if not (2 <= i and 2 * i <= n):
        raise InputError(f"need 2 <= i <= n/2, got n={n}, i={i}")
    angles, lo_ok, hi_ok = _check_angles(angles, i)
    if not (np.all(lo_ok) and np.all(hi_ok)):
        raise InputError("angles must lie strictly inside (0, pi/2)")
    if np.any(np.diff(angles) <= 0):
        raise InputError("angles must be strictly increasing")

    h1 = Subspace.coordinate(n, [2 * j for j in range(i)])

    basis2 = np.zeros((i, n))
    for j in range(1, i + 1):
        basis2[j - 1, 2 * j - 2] = np.cos(angles[j - 1])
        basis2[j - 1, 2 * j - 1] = np.sin(angles[j - 1])

    basis3 = np.zeros((i, n))
    basis3[0, 0] = np.cos(angles[0])
    basis3[0, 2 * i - 1] = np.sin(angles[0])
    for j in range(2, i + 1):
        basis3[j - 1, 2 * j - 2] = np.cos(angles[j - 1])
        basis3[j - 1, 2 * j - 3] = np.sin(angles[j - 1])

    return h1, Subspace(basis2), Subspace(basis3)


_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113,
)


def surrogate_angles(count: int, upper: float = np.pi / 2) -> np.ndarray:
    """Angles that stand in for irrational multiples of pi.

    Uses pi / sqrt(p) over successive primes p, folded by multiples of pi/2
    into (0, pi/2) and then scaled into (0, upper) if needed, sorted
    ascending.  Together with pi these values are linearly independent over
    the rationals (square roots of distinct primes are), which is the
    property the reflection-density results ask of the true angles; floating
    point can only ever approximate that, so downstream diagnostics report
    rational-approximation quality rather than certifying irrationality.
    """
    if count < 1:
        raise InputError("need at least one angle")
    if count > len(_SMALL_PRIMES):
        raise InputError(f"at most {len(_SMALL_PRIMES)} surrogate angles available")
    vals = []
    for p in _SMALL_PRIMES[:count]:
        a = np.pi / np.sqrt(p)
        while a >= np.pi / 2:
            a -= np.pi / 2
        vals.append(a)
    vals = np.sort(np.array(vals))
    if np.any(np.diff(vals) <= 0):  # pragma: no cover - guards the recipe
        raise NumericalError("surrogate angles collided after folding")
    if upper < np.pi / 2:
        vals = vals * (upper / (np.pi / 2))
    return vals
