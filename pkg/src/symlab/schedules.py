"""Subspace family constructions and iteration schedules.

`make_family` builds finite families whose iterated reflections or
rotational symmetrizations can force full rotational invariance, at the
smallest cardinality the theory allows:

  lines        i = 1            k = n
  planes       2 <= i <= n/2    k = ceil(n/i) + 1
  hyperplanes  i = n - 1        k = n
  rotational   1 <= i <= n-1    k = ceil(n/(n-i))

The line family is e_1 together with cos(a_j) e_j + sin(a_j) e_{j+1} using
irrational-surrogate angles, which spans, has a connected non-orthogonality
graph, and satisfies the chain condition by triangularity.  Hyperplanes are
the orthogonal complements of those lines.  Plane families start from the
aligned triple in `subspaces.klain_triple` and extend by seeded rejection
sampling until they span.  Rotational families take complements of
consecutive overlapping blocks of the line directions, so the complements
accumulate to full rank without the family ever splitting into two
mutually orthogonal groups.

A `Schedule` turns a family into the sequence (H_m) driving an experiment;
`dense_random` instead streams independent uniform subspaces, reproducible
from the seed.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .errors import InputError, NumericalError
from .subspaces import Subspace, klain_triple, orthonormalize, surrogate_angles

_EXTENSION_ATTEMPTS = 200


def _line_directions(n: int) -> np.ndarray:
    angles = surrogate_angles(n - 1)
    dirs = np.zeros((n, n))
    dirs[0, 0] = 1.0
    for j in range(1, n):
        a = angles[j - 1]
        dirs[j, j - 1] = np.cos(a)
        dirs[j, j] = np.sin(a)
    return dirs


def _random_subspace(n: int, i: int, rng: np.random.Generator) -> Subspace:
    frame = rng.normal(size=(i, n))
    return Subspace.from_spanning(orthonormalize(frame))


def _prefix_complement(bases: Sequence[np.ndarray], n: int) -> Optional[np.ndarray]:
    stacked = np.vstack(bases)
    rank = int(np.linalg.matrix_rank(stacked, tol=1e-10))
    if rank >= n:
        return None
    _, _, vt = np.linalg.svd(stacked)
    return vt[rank:]


def _chain_ok(new_basis: np.ndarray, prefix: Sequence[np.ndarray], n: int) -> bool:
    comp = _prefix_complement(prefix, n)
    if comp is None:
        return True
    stacked = np.vstack([new_basis, comp])
    return int(np.linalg.matrix_rank(stacked, tol=1e-10)) == len(new_basis) + len(comp)


def make_family(n: int, i: int, kind: str, angle_recipe=None) -> List[Subspace]:
    """Family of i-dimensional subspaces of R^n of the stated kind; raises
    on (n, i, kind) combinations the theory does not cover."""
    if n < 2:
        raise InputError("ambient dimension must be at least 2")
    if not (1 <= i <= n - 1):
        raise InputError(f"need 1 <= i <= n-1, got i={i}, n={n}")

    if kind == "lines":
        if i != 1:
            raise InputError("lines kind requires i = 1")
        return [Subspace.line(v) for v in _line_directions(n)]

    if kind == "hyperplanes":
        if i != n - 1:
            raise InputError("hyperplanes kind requires i = n-1")
        return [Subspace.line(v).complement() for v in _line_directions(n)]

    if kind == "planes":
        if not (2 <= i and 2 * i <= n):
            raise InputError("planes kind requires 2 <= i <= n/2")
        k = math.ceil(n / i) + 1
        angles = angle_recipe if angle_recipe is not None else surrogate_angles(i)
        family = list(klain_triple(n, i, angles))
        rng = np.random.default_rng(20240812)
        while len(family) < k:
            bases = [s.basis for s in family]
            for _ in range(_EXTENSION_ATTEMPTS):
                cand = _random_subspace(n, i, rng)
                if _chain_ok(cand.basis, bases, n):
                    family.append(cand)
                    break
            else:
                raise NumericalError(
                    "could not extend the plane family under the chain condition"
                )
        if _prefix_complement([s.basis for s in family], n) is not None:
            raise NumericalError("plane family does not span the ambient space")
        return family

    if kind == "rotational":
        k = math.ceil(n / (n - i))
        dirs = _line_directions(n)
        family = []
        for j in range(k):
            start = min(j * (n - i), n - (n - i))
            block = dirs[start:start + (n - i)]
            family.append(Subspace.from_spanning(orthonormalize(block)).complement())
        return family

    raise InputError(f"unknown family kind {kind!r}")


# --------------------------------------------------------------------------
# schedules
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Schedule:
    """Sequence (H_m), m >= 1, drawn from a family under a rule.

    Rules index into the family except dense_random, which synthesizes a
    fresh uniform subspace per step from a per-step rng stream.
    """

    family: List[Subspace]
    rule: str
    indices: Optional[List[int]] = None
    rng_seed: Optional[int] = None
    dims: Optional[tuple] = None  # (n, i) for dense_random
    m_max: Optional[int] = None

    def subspace_at(self, m: int) -> Subspace:
        if m < 1:
            raise InputError("schedule positions start at m = 1")
        if self.m_max is not None and m > self.m_max:
            raise InputError(f"schedule exhausted: m={m} > m_max={self.m_max}")
        if self.rule == "dense_random":
            n, i = self.dims
            rng = np.random.default_rng([self.rng_seed, m])
            return _random_subspace(n, i, rng)
        if self.rule in ("round_robin", "cyclic_with_repeats", "explicit"):
            idx = self.indices[(m - 1) % len(self.indices)]
            return self.family[idx]
        raise InputError(f"unknown schedule rule {self.rule!r}")

    def period(self) -> Optional[int]:
        if self.rule == "dense_random":
            return None
        return len(self.indices)

    def to_config(self) -> dict:
        out = {"rule": self.rule}
        if self.rule == "dense_random":
            out["rng_seed"] = self.rng_seed
            out["n"], out["i"] = self.dims
        else:
            out["family_bases"] = [s.basis.tolist() for s in self.family]
            out["indices"] = list(self.indices)
        if self.m_max is not None:
            out["m_max"] = self.m_max
        return out


def round_robin(family: Sequence[Subspace], m_max: Optional[int] = None) -> Schedule:
    if not family:
        raise InputError("family is empty")
    return Schedule(list(family), "round_robin",
                    indices=list(range(len(family))), m_max=m_max)


def cyclic_with_repeats(family: Sequence[Subspace],
                        multiplicities: Sequence[int],
                        m_max: Optional[int] = None) -> Schedule:
    if len(multiplicities) != len(family):
        raise InputError("need one multiplicity per family member")
    if any(m < 1 for m in multiplicities):
        raise InputError("multiplicities must be positive")
    idx = [j for j, mult in enumerate(multiplicities) for _ in range(mult)]
    return Schedule(list(family), "cyclic_with_repeats", indices=idx, m_max=m_max)


def explicit(family: Sequence[Subspace], indices: Sequence[int],
             m_max: Optional[int] = None) -> Schedule:
    indices = [int(j) for j in indices]
    if not indices:
        raise InputError("explicit schedule needs at least one index")
    if any(not (0 <= j < len(family)) for j in indices):
        raise InputError("explicit schedule index out of range")
    return Schedule(list(family), "explicit", indices=indices,
                    m_max=m_max if m_max is not None else len(indices))


def dense_random(n: int, i: int, rng_seed: int,
                 m_max: Optional[int] = None) -> Schedule:
    if not (1 <= i <= n - 1):
        raise InputError(f"need 1 <= i <= n-1, got i={i}, n={n}")
    return Schedule([], "dense_random", rng_seed=int(rng_seed),
                    dims=(n, i), m_max=m_max)


def schedule_from_config(cfg: dict) -> Schedule:
    """Inverse of Schedule.to_config."""
    rule = cfg.get("rule")
    m_max = cfg.get("m_max")
    if rule == "dense_random":
        return dense_random(int(cfg["n"]), int(cfg["i"]),
                            int(cfg["rng_seed"]), m_max=m_max)
    if rule in ("round_robin", "cyclic_with_repeats", "explicit"):
        # stored bases are already orthonormal; keep them verbatim so the
        # config round trip is exact, orthonormalizing only raw input
        family = []
        for b in cfg["family_bases"]:
            arr = np.asarray(b, dtype=float)
            try:
                family.append(Subspace(arr))
            except InputError:
                family.append(Subspace.from_spanning(arr))
        indices = [int(j) for j in cfg["indices"]]
        if any(not (0 <= j < len(family)) for j in indices):
            raise InputError("schedule config index out of range")
        return Schedule(family, rule, indices=indices, m_max=m_max)
    raise InputError(f"unknown schedule rule {rule!r}")
