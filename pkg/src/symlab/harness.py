"""Experiment harness: iterate symmetrizations along schedules, record a
metrics row per step, and classify the limiting behaviour.

ExperimentConfig freezes everything a run depends on and round-trips
through plain dicts so runs can be scripted from JSON.  Steppers own the
iteration state: the generic one applies the operator registry to a single
body, and three specialized steppers handle representations the registry
cannot iterate efficiently (support samples of a convex body under
Minkowski symmetrization, finite unions of convex polygons, and latitude
profiles of bodies of revolution).  run_experiment drives a stepper along
the schedule and issues one of the five verdicts; PRESETS holds the named
reference experiments the test suite and the demo scripts lean on.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.special
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.stats import qmc

from . import serialize
from .bodies import (
    DirectionGrid,
    OriginBall,
    Polytope,
    SupportVector,
    VoxelSet,
    ball_deviation,
    bounding_radius,
    convert,
    hausdorff_distance,
    mean_width,
    support_of,
    volume,
)
from .errors import InputError, NumericalError
from .groups import is_rotationally_symmetric, is_symmetric
from .operators import (
    OPERATOR_TAGS,
    _polygon_disk_area,
    _section_volumes,
    _simpson_weights,
    apply as apply_operator,
    layering,
    mblaschke_profile,
    profile_evaluator,
)
from .schedules import Schedule, make_family, round_robin, schedule_from_config
from .subspaces import Subspace, surrogate_angles

METRIC_COLUMNS = ("volume", "mean_width", "omega", "ball_radius",
                  "ball_deviation", "step_distance")

VERDICTS = ("converged_to_ball", "converged_to_nonball", "oscillating",
            "diverging", "budget_exhausted")

# consecutive steps below step_tol before the iteration counts as settled,
# and the circumradius blow-up factor that aborts a run as diverging
PLATEAU_STEPS = 5
DIVERGENCE_FACTOR = 2.0

# operators invariant on sets symmetric under the reflection through H
# versus those invariant on H-symmetric spherical cylinders; the nonball
# verdict checks the matching predicate
_REFLECTION_OPS = {"steiner", "minkowski", "fiber"}
_ROTATIONAL_OPS = {"schwarz", "minkowski_blaschke", "inner_rotational",
                   "outer_rotational"}


# --------------------------------------------------------------------------
# initial bodies
# --------------------------------------------------------------------------


def build_body(spec: dict):
    """Construct a body from a config spec.

    Kinds: cube {n, half_side}, ball {n, radius}, polygon {vertices},
    annulus {outer, inner, resolution, box_half} (voxel, 2-d), voxel
    {base, resolution, box_half} (rasterized base body), support
    {base, directions}, file {path}.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InputError("initial: body spec must be a dict with a 'kind'")
    kind = spec["kind"]
    if kind == "cube":
        return Polytope.cube(int(spec.get("n", 3)), float(spec.get("half_side", 1.0)))
    if kind == "ball":
        return OriginBall(int(spec.get("n", 3)), float(spec.get("radius", 1.0)))
    if kind == "polygon":
        if "vertices" not in spec:
            raise InputError("initial: polygon spec needs 'vertices'")
        return Polytope.from_points(np.asarray(spec["vertices"], dtype=float))
    if kind == "annulus":
        outer = float(spec.get("outer", 1.0))
        inner = float(spec.get("inner", 0.5))
        if not 0.0 <= inner < outer:
            raise InputError("initial: annulus needs 0 <= inner < outer")
        res = int(spec.get("resolution", 512))
        half = float(spec.get("box_half", 1.25 * outer))

        def ring(pts):
            r = np.linalg.norm(pts, axis=1)
            return (r <= outer) & (r >= inner)

        return VoxelSet.from_indicator(ring, np.full(2, -half), np.full(2, half),
                                       (res, res))
    if kind == "voxel":
        if "base" not in spec:
            raise InputError("initial: voxel spec needs a 'base' body spec")
        base = build_body(spec["base"])
        res = int(spec.get("resolution", 256))
        half = spec.get("box_half")
        if half is None:
            return convert(base, "voxel", resolution=res)
        n = base.dim
        return convert(base, "voxel", resolution=res,
                       box_lo=np.full(n, -float(half)),
                       box_hi=np.full(n, float(half)))
    if kind == "support":
        if "base" not in spec:
            raise InputError("initial: support spec needs a 'base' body spec")
        base = build_body(spec["base"])
        grid = DirectionGrid.for_dimension(base.dim, int(spec.get("directions", 4096)))
        return convert(base, "support", grid=grid)
    if kind == "file":
        if "path" not in spec:
            raise InputError("initial: file spec needs 'path'")
        return serialize.load(spec["path"])
    if kind == "polygon_union":
        raise InputError(
            "initial: polygon_union is iterated by the polygon_union stepper, "
            "set grid.stepper accordingly")
    raise InputError(f"initial: unknown body kind {kind!r}")


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Everything one run depends on.

    initial is a body spec dict (see build_body); grid carries stepper and
    measurement settings (stepper name, direction counts, layering
    quadrature, snapshot rasterization); metrics lists the columns to
    record, in order.  The run produces the symmetrals K_start .. K_stop
    with stop <= m_max; osc_tol defaults to step_tol.
    """

    initial: dict
    operator: str
    schedule: Schedule
    m_max: int
    start: int = 1
    step_tol: float = 1e-3
    ball_tol: float = 1e-2
    osc_tol: Optional[float] = None
    grid: dict = field(default_factory=dict)
    operator_params: dict = field(default_factory=dict)
    metrics: tuple = METRIC_COLUMNS
    rng_seed: int = 0
    name: str = ""

    def __post_init__(self):
        if not isinstance(self.initial, dict) or "kind" not in self.initial:
            raise InputError("initial: body spec must be a dict with a 'kind'")
        if self.operator not in OPERATOR_TAGS:
            raise InputError(f"operator: unknown tag {self.operator!r}")
        if not isinstance(self.schedule, Schedule):
            raise InputError("schedule: need a Schedule instance")
        if self.start < 1:
            raise InputError(f"start: must be >= 1, got {self.start}")
        if self.m_max < self.start:
            raise InputError(
                f"m_max: must be >= start, got {self.m_max} < {self.start}")
        if self.schedule.m_max is not None and self.schedule.m_max < self.m_max:
            raise InputError("m_max: schedule ends before the horizon")
        for fname, val in (("step_tol", self.step_tol), ("ball_tol", self.ball_tol)):
            if not val > 0:
                raise InputError(f"{fname}: must be positive, got {val}")
        if self.osc_tol is not None and not self.osc_tol > 0:
            raise InputError(f"osc_tol: must be positive, got {self.osc_tol}")
        self.metrics = tuple(self.metrics)
        if not self.metrics:
            raise InputError("metrics: need at least one column")
        for name in self.metrics:
            if name not in METRIC_COLUMNS:
                raise InputError(f"metrics: unknown column {name!r}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "initial": self.initial,
            "operator": self.operator,
            "operator_params": self.operator_params,
            "schedule": self.schedule.to_config(),
            "start": self.start,
            "m_max": self.m_max,
            "step_tol": self.step_tol,
            "ball_tol": self.ball_tol,
            "osc_tol": self.osc_tol,
            "grid": self.grid,
            "metrics": list(self.metrics),
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise InputError("config: expected a JSON object")
        for key in ("initial", "operator", "schedule", "m_max"):
            if key not in doc:
                raise InputError(f"config missing required field {key!r}")
        known = {"name", "initial", "operator", "operator_params", "schedule",
                 "start", "m_max", "step_tol", "ball_tol", "osc_tol", "grid",
                 "metrics", "rng_seed"}
        for key in doc:
            if key not in known:
                raise InputError(f"config has unknown field {key!r}")
        kwargs = dict(doc)
        kwargs["schedule"] = schedule_from_config(doc["schedule"])
        if "metrics" in kwargs:
            kwargs["metrics"] = tuple(kwargs["metrics"])
        return cls(**kwargs)


def config_hash(config: ExperimentConfig) -> str:
    """Stable digest of a configuration; batches are ordered by it so the
    output does not depend on scheduling."""
    doc = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(doc.encode("utf-8")).hexdigest()


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


def _format_cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.12g" % float(value)


@dataclass
class ConvergenceReport:
    """Outcome of one run: metrics rows (strictly increasing m), verdict,
    the final body, and snapshots at steps 1, 2, 4, 8, ... after start plus
    the final step."""

    config: ExperimentConfig
    rows: List[dict]
    verdict: str
    limit: object
    snapshots: List[Tuple[int, object]]

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise InputError(f"unknown verdict {self.verdict!r}")
        if not self.rows:
            raise InputError("report needs at least one row")
        ms = [row["m"] for row in self.rows]
        if any(b <= a for a, b in zip(ms, ms[1:])):
            raise InputError("row indices must be strictly increasing")

    @property
    def final_m(self) -> int:
        return int(self.rows[-1]["m"])

    def to_csv(self) -> str:
        """Comma separated, '.' decimal, header row, %.12g floats."""
        cols = ("m",) + tuple(self.config.metrics)
        lines = [",".join(cols)]
        for row in self.rows:
            lines.append(",".join(_format_cell(row[c]) for c in cols))
        return "\n".join(lines) + "\n"

    def summary(self, limit_snapshot: Optional[str] = None) -> dict:
        last = self.rows[-1]
        doc = {
            "name": self.config.name,
            "verdict": self.verdict,
            "final_m": self.final_m,
            "row_count": len(self.rows),
            "snapshot_steps": [m for m, _ in self.snapshots],
            "final_metrics": {k: last[k] for k in self.config.metrics},
            "config": self.config.to_dict(),
        }
        if limit_snapshot is not None:
            doc["limit_snapshot"] = limit_snapshot
        return doc

    def write(self, outdir, stem: Optional[str] = None) -> Dict[str, Path]:
        """Write <stem>.csv, <stem>.json and <stem>_limit.json under outdir
        and return the paths."""
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        stem = stem or (self.config.name or "experiment")
        paths = {
            "csv": out / f"{stem}.csv",
            "summary": out / f"{stem}.json",
            "limit": out / f"{stem}_limit.json",
        }
        paths["csv"].write_text(self.to_csv(), encoding="utf-8")
        serialize.save(self.limit, paths["limit"])
        doc = self.summary(limit_snapshot=paths["limit"].name)
        paths["summary"].write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                                    encoding="utf-8")
        return paths


# --------------------------------------------------------------------------
# kuratowski limit estimates
# --------------------------------------------------------------------------


@dataclass
class KuratowskiEstimate:
    """Finite-sample limit estimates of a voxel sequence tail: the lower
    estimate is the intersection of the tail members, the upper one their
    union.  An empty intersection is flagged (li_estimate is None) rather
    than represented, since voxel sets are nonempty by contract."""

    tail_start: int
    ls_estimate: VoxelSet
    li_estimate: Optional[VoxelSet]
    li_empty: bool = False

    def __post_init__(self):
        if self.li_empty != (self.li_estimate is None):
            raise InputError("li_empty must match li_estimate is None")
        if self.li_estimate is not None:
            a, b = self.li_estimate, self.ls_estimate
            if (a.occupancy.shape != b.occupancy.shape
                    or not np.allclose(a.box_lo, b.box_lo)
                    or not np.allclose(a.box_hi, b.box_hi)):
                raise InputError("limit estimates must share one voxel grid")
            if np.any(a.occupancy & ~b.occupancy):
                raise InputError("lower estimate must be contained in the upper")


def kuratowski_limits(seq: Sequence, tail_start: int) -> KuratowskiEstimate:
    """Estimate the inner and outer limits of a sequence of voxel sets from
    its tail.

    seq is either a plain sequence of VoxelSet (tail_start indexes into it)
    or a sequence of (m, VoxelSet) pairs as stored in report snapshots
    (tail keeps members with m >= tail_start).  All tail members must live
    on one voxel grid.
    """
    items = list(seq)
    if not items:
        raise InputError("sequence is empty")
    if isinstance(items[0], tuple):
        tail = [body for m, body in items if m >= tail_start]
    else:
        if not 0 <= tail_start < len(items):
            raise InputError(
                f"tail_start {tail_start} outside the sequence of {len(items)}")
        tail = items[tail_start:]
    if not tail:
        raise InputError("tail is empty; lower tail_start")
    for body in tail:
        if not isinstance(body, VoxelSet):
            raise InputError("kuratowski estimates need voxel bodies")
    first = tail[0]
    for body in tail[1:]:
        if (body.occupancy.shape != first.occupancy.shape
                or not np.allclose(body.box_lo, first.box_lo)
                or not np.allclose(body.box_hi, first.box_hi)):
            raise InputError("kuratowski estimates need snapshots on one grid")
    union = np.zeros_like(first.occupancy)
    inter = np.ones_like(first.occupancy)
    for body in tail:
        union |= body.occupancy
        inter &= body.occupancy
    ls = VoxelSet(first.box_lo, first.box_hi, union)
    if inter.any():
        li = VoxelSet(first.box_lo, first.box_hi, inter)
        return KuratowskiEstimate(tail_start, ls, li, False)
    return KuratowskiEstimate(tail_start, ls, None, True)


# --------------------------------------------------------------------------
# plain iteration
# --------------------------------------------------------------------------


def iterate(body, schedule: Schedule, operator: str, start: int, stop: int,
            **params):
    """The successive symmetral: apply the operator at schedule positions
    start .. stop and return the final body.  Operator failures are
    re-raised with the iteration index attached."""
    if start < 1:
        raise InputError("start must be >= 1")
    if stop < start:
        raise InputError(f"stop must be >= start, got {stop} < {start}")
    out = body
    for m in range(start, stop + 1):
        h = schedule.subspace_at(m)
        try:
            out = apply_operator(operator, out, h, **params)
        except InputError as exc:
            raise InputError(f"iteration m={m}: {exc}") from exc
        except NumericalError as exc:
            raise NumericalError(f"iteration m={m}: {exc}") from exc
    return out


# --------------------------------------------------------------------------
# steppers
# --------------------------------------------------------------------------


def _support_ring_gap(evaluate, axis, latitudes: int = 21, ring: int = 24) -> float:
    """Largest spread of a support function over azimuth rings about an
    axis; zero for a body of revolution about that axis."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    comp = Subspace.line(axis).complement().basis
    t = np.linspace(-0.95, 0.95, latitudes)
    phi = np.arange(ring) * 2.0 * np.pi / ring
    circ = np.outer(np.cos(phi), comp[0]) + np.outer(np.sin(phi), comp[1])
    rho = np.sqrt(1.0 - t**2)
    pts = t[:, None, None] * axis + rho[:, None, None] * circ[None, :, :]
    vals = np.asarray(evaluate(pts.reshape(-1, 3))).reshape(latitudes, ring)
    return float(np.max(np.ptp(vals, axis=1)))


class GenericStepper:
    """Iterates the operator registry on one body.

    This is also the reference for the informal stepper protocol that
    run_experiment drives: advance(h) applies one symmetrization,
    metrics(names) measures the current body, snapshot() returns it as a
    serializable object (cheap, called every step), circumradius() bounds
    it, and limit_symmetric(family, operator, tol, tol_cells) decides the
    nonball verdict predicate.  The layering quadrature is frozen at
    construction so successive values share their nodes.
    """

    def __init__(self, body, operator: str, operator_params=None,
                 omega_r_max: Optional[float] = None, omega_points: int = 512,
                 metric_grid: Optional[DirectionGrid] = None):
        self._body = body
        self._operator = operator
        self._params = dict(operator_params or {})
        self._omega_r_max = (float(omega_r_max) if omega_r_max is not None
                             else bounding_radius(body))
        self._omega_points = int(omega_points)
        self._metric_grid = metric_grid
        self._step = float("nan")

    def advance(self, h: Subspace):
        prev = self._body
        self._body = apply_operator(self._operator, self._body, h, **self._params)
        self._step = hausdorff_distance(self._body, prev)

    def metrics(self, names=METRIC_COLUMNS) -> dict:
        out = {}
        dev = None
        for name in names:
            if name == "volume":
                out[name] = volume(self._body)
            elif name == "mean_width":
                out[name] = mean_width(self._body, self._metric_grid)
            elif name == "omega":
                out[name] = layering(self._body, r_max=self._omega_r_max,
                                     quad_points=self._omega_points)
            elif name in ("ball_radius", "ball_deviation"):
                if dev is None:
                    dev = ball_deviation(self._body, self._metric_grid)
                out[name] = dev[0] if name == "ball_radius" else dev[1]
            elif name == "step_distance":
                out[name] = self._step
            else:
                raise InputError(f"unknown metric {name!r}")
        return out

    def snapshot(self):
        return self._body

    def circumradius(self) -> float:
        return bounding_radius(self._body)

    def limit_symmetric(self, family, operator: str, tol: float,
                        tol_cells: float) -> bool:
        if operator in _ROTATIONAL_OPS:
            if isinstance(self._body, VoxelSet):
                return all(is_rotationally_symmetric(self._body, h, tol_cells)
                           for h in family)
            if all(h.dim == 1 and h.ambient_dim == 3 for h in family):
                evaluate = lambda d: support_of(self._body, d)
                return all(_support_ring_gap(evaluate, h.basis[0]) <= tol
                           for h in family)
            return False
        return all(is_symmetric(self._body, h, tol) for h in family)


# --------------------------------------------------------------------------
# support-sampled minkowski stepper (convex bodies in R^3)
# --------------------------------------------------------------------------


_FLUX_NODES, _FLUX_WEIGHTS = np.polynomial.legendre.leggauss(24)
_FLUX_NODES = 0.5 * (_FLUX_NODES + 1.0)
_FLUX_WEIGHTS = 0.5 * _FLUX_WEIGHTS


def _flux_primitive(w):
    """Radial primitive behind the polyhedral layering flux.

    The layering functional equals the integral of (sqrt(pi)/2) erfc(|x|)
    over the body; written as a boundary flux of a radial vector field it
    leaves, per planar face at signed distance d from the origin, edge
    integrals of A(sqrt(d^2 + t^2)) - A(|d|), and this is that A (A(0+) = 0,
    callers keep w > 0)."""
    w = np.asarray(w, dtype=float)
    sq = np.sqrt(np.pi)
    return (sq / 12.0 * w**2 * scipy.special.erfc(w)
            - w / 12.0 * np.exp(-(w**2))
            + sq / 8.0 * scipy.special.erf(w)
            + np.expm1(-(w**2)) / (6.0 * w))


def flux_layering(normals: np.ndarray, vertices: np.ndarray,
                  facet_vertex_ids: Dict[int, List[int]]) -> float:
    """Layering functional of a bounded convex polyhedron in R^3 from its
    boundary; no radial truncation, the only quadrature is a fixed 24-point
    Gauss rule along edges.

    normals[j] is the outward unit normal of halfspace j, vertices the
    corner points, facet_vertex_ids maps each active halfspace to the ids
    of its vertices (fewer than three means a degenerate facet, skipped).
    Per face the vertices are ordered by angle around their centroid, which
    stays interior; sector wedges are taken about the foot of the origin,
    which need not be."""
    by_count: Dict[int, List[int]] = {}
    for j, vids in facet_vertex_ids.items():
        if len(vids) >= 3:
            by_count.setdefault(len(vids), []).append(j)
    total = 0.0
    for count, js in by_count.items():
        idx = np.asarray(js)
        n = normals[idx]
        vs = np.stack([vertices[facet_vertex_ids[j]] for j in js])
        d = np.einsum("fi,fi->f", n, vs.mean(axis=1))
        keep = np.abs(d) > 1e-14
        if not np.any(keep):
            continue
        n, vs, d = n[keep], vs[keep], d[keep]
        pick = np.zeros_like(n)
        pick[np.arange(len(n)), np.argmin(np.abs(n), axis=1)] = 1.0
        e1 = np.cross(n, pick)
        e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
        e2 = np.cross(n, e1)
        rel = vs - d[:, None, None] * n[:, None, :]
        y = np.stack([np.einsum("fkd,fd->fk", rel, e1),
                      np.einsum("fkd,fd->fk", rel, e2)], axis=-1)
        cen = y.mean(axis=1, keepdims=True)
        ang = np.arctan2(y[..., 1] - cen[..., 1], y[..., 0] - cen[..., 0])
        y = np.take_along_axis(y, np.argsort(ang, axis=1)[..., None], axis=1)
        nxt = np.roll(y, -1, axis=1)
        wedge = y[..., 0] * nxt[..., 1] - y[..., 1] * nxt[..., 0]
        seg = y[:, :, None, :] + _FLUX_NODES[None, None, :, None] * (nxt - y)[:, :, None, :]
        c2 = np.maximum((seg**2).sum(axis=-1), 1e-60)
        psi = (_flux_primitive(np.sqrt(d[:, None, None]**2 + c2))
               - _flux_primitive(np.abs(d))[:, None, None])
        total += float(np.einsum("f,fk,g,fkg->", d, wedge, _FLUX_WEIGHTS, psi / c2))
    return total


def _sobol_sphere(count: int, seed: int) -> np.ndarray:
    """Scrambled Sobol points pushed to the unit sphere through the
    area-preserving cylinder map, antipodally symmetrized (first half
    followed by its negation) so direction grids built on the sample index
    negation exactly."""
    if count < 16:
        raise InputError("need at least 16 directions")
    if count % 2:
        raise InputError("direction count must be even")
    sample = qmc.Sobol(d=2, scramble=True, seed=seed).random(count // 2)
    phi = 2.0 * np.pi * sample[:, 0]
    z = 2.0 * sample[:, 1] - 1.0
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    half = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return np.vstack([half, -half])


def _support_values(vertices: np.ndarray, directions: np.ndarray,
                    block: int = 1024) -> np.ndarray:
    out = np.empty(directions.shape[0])
    for s in range(0, directions.shape[0], block):
        out[s:s + block] = (vertices @ directions[s:s + block].T).max(axis=0)
    return out


class MinkowskiSupportStepper:
    """Minkowski symmetrization of a convex body in R^3, tracked as support
    values on a fixed quasirandom direction sample.

    One step replaces the values by (h_Q(u) + h_Q(R_H u)) / 2, where Q is
    the outer polyhedron of the current values and R_H the reflection
    through the line H.  Supports of Q are evaluated exactly from its
    vertices, so each stored polyhedron contains the true symmetral of its
    predecessor; the layering column is then genuinely nondecreasing, at
    the price of an outward drift of order 1 / direction count.  Layering
    itself comes from the exact boundary flux."""

    def __init__(self, body, directions: int = 16384, rng_seed: int = 0):
        self.directions = _sobol_sphere(int(directions), int(rng_seed))
        values = np.asarray(support_of(body, self.directions), dtype=float)
        if values.min() <= 0.0:
            raise InputError("support stepper needs the origin in the interior")
        self._grid = DirectionGrid(self.directions)
        self._values = values
        self._step = float("nan")
        self._rebuild()

    def _rebuild(self):
        half = np.hstack([self.directions, -self._values[:, None]])
        try:
            hsi = HalfspaceIntersection(half, np.zeros(3))
        except Exception as exc:
            raise NumericalError(f"outer polyhedron rebuild failed: {exc}") from exc
        self._vertices = hsi.intersections
        members: Dict[int, List[int]] = {}
        for vid, active in enumerate(hsi.dual_facets):
            for j in active:
                members.setdefault(j, []).append(vid)
        self._facets = members
        self._hq = _support_values(self._vertices, self.directions)

    def advance(self, h: Subspace):
        if h.ambient_dim != 3 or h.dim != 1:
            raise InputError("support stepper handles lines in R^3")
        r = h.reflection_matrix()
        reflected = _support_values(self._vertices, self.directions @ r)
        new = 0.5 * (self._hq + reflected)
        self._step = float(np.max(np.abs(new - self._hq)))
        self._values = new
        self._rebuild()

    def metrics(self, names=METRIC_COLUMNS) -> dict:
        out = {}
        for name in names:
            if name == "volume":
                out[name] = float(ConvexHull(self._vertices).volume)
            elif name == "mean_width":
                out[name] = 2.0 * float(np.mean(self._hq))
            elif name == "omega":
                out[name] = flux_layering(self.directions, self._vertices,
                                          self._facets)
            elif name == "ball_radius":
                out[name] = 0.5 * float(self._hq.max() + self._hq.min())
            elif name == "ball_deviation":
                out[name] = 0.5 * float(self._hq.max() - self._hq.min())
            elif name == "step_distance":
                out[name] = self._step
            else:
                raise InputError(f"unknown metric {name!r}")
        return out

    def snapshot(self) -> SupportVector:
        return SupportVector(self._grid, self._hq.copy(), "minkowski")

    def circumradius(self) -> float:
        return float(np.max(np.linalg.norm(self._vertices, axis=1)))

    def limit_symmetric(self, family, operator: str, tol: float,
                        tol_cells: float) -> bool:
        for h in family:
            r = h.reflection_matrix()
            gap = np.max(np.abs(_support_values(self._vertices, self.directions @ r)
                                - self._hq))
            if gap > tol:
                return False
        return True


# --------------------------------------------------------------------------
# polygon union stepper (compact sets in the plane)
# --------------------------------------------------------------------------


def _shoelace(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _hull2(points: np.ndarray) -> np.ndarray:
    """Planar convex hull (monotone chain), counterclockwise, strictly
    convex corners only; deterministic so repeated runs stay byte
    identical."""
    pts = np.asarray(points, dtype=float)
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(np.abs(np.diff(pts, axis=0)) > 1e-14, axis=1)
    pts = pts[keep]
    if len(pts) <= 2:
        return pts
    scale = float(np.max(np.abs(pts))) + 1.0
    eps = 1e-12 * scale * scale

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                cross = ((out[-1][0] - out[-2][0]) * (p[1] - out[-2][1])
                         - (out[-1][1] - out[-2][1]) * (p[0] - out[-2][0]))
                if cross <= eps:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    return np.asarray(lower[:-1] + upper[:-1])


def _edges_inward(poly: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Half-plane description A x <= b of a counterclockwise convex
    polygon."""
    t = np.roll(poly, -1, axis=0) - poly
    a = np.column_stack([t[:, 1], -t[:, 0]])
    b = np.einsum("ij,ij->i", a, poly)
    return a, b


def _clip_half(poly: np.ndarray, a: np.ndarray, b: float,
               tol: float = 1e-12) -> np.ndarray:
    """Part of a convex polygon inside the half-plane a . x <= b."""
    if len(poly) == 0:
        return poly
    d = poly @ a - b
    out = []
    k = len(poly)
    for i in range(k):
        j = (i + 1) % k
        p, q, dp, dq = poly[i], poly[j], d[i], d[j]
        if dp <= tol:
            out.append(p)
            if dq > tol and dp < -tol:
                out.append(p + dp / (dp - dq) * (q - p))
        elif dq < -tol:
            out.append(p + dp / (dp - dq) * (q - p))
    if len(out) < 3:
        return np.empty((0, 2))
    arr = np.asarray(out)
    return arr if _shoelace(arr) > 1e-13 else np.empty((0, 2))


def _intersection_area(p: np.ndarray, q: np.ndarray) -> float:
    a, b = _edges_inward(q)
    r = p
    for k in range(len(b)):
        r = _clip_half(r, a[k], b[k])
        if len(r) == 0:
            return 0.0
    return _shoelace(r)


def _convex_difference(p: np.ndarray, q: np.ndarray) -> List[np.ndarray]:
    """p minus q as disjoint convex pieces, one per cutting edge of q."""
    pieces = []
    rem = p
    a, b = _edges_inward(q)
    for k in range(len(b)):
        outside = _clip_half(rem, -a[k], -b[k])
        if len(outside):
            pieces.append(outside)
        rem = _clip_half(rem, a[k], b[k])
        if len(rem) == 0:
            break
    return pieces


def _carve_disjoint(comps: List[np.ndarray]) -> List[np.ndarray]:
    """Disjoint convex decomposition of a union of convex polygons."""
    pieces: List[np.ndarray] = []
    for c in comps:
        frags = [c]
        for q in list(pieces):
            frags = [g for f in frags for g in _convex_difference(f, q)]
            if not frags:
                break
        pieces.extend(frags)
    return pieces


def _merge_overlapping(comps: List[np.ndarray]) -> List[np.ndarray]:
    """Replace any overlapping pair by its joint convex hull, to a fixed
    point.  Hulls only grow the union and leave its support function (max
    of member supports) unchanged."""
    comps = [c for c in comps if len(c) >= 3]
    merged = True
    while merged:
        merged = False
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                if _intersection_area(comps[i], comps[j]) > 1e-12:
                    comps[i] = _hull2(np.vstack([comps[i], comps[j]]))
                    del comps[j]
                    merged = True
                    break
            if merged:
                break
    return comps


class UnionPolygonsStepper:
    """Minkowski symmetrization of a finite union of convex polygons.

    The symmetral of a union is the union over ordered pairs of the
    midpoint bodies (P_i + R_H P_j) / 2, each convex, so the state stays a
    finite polygon list.  Overlapping members are hull-merged, which never
    changes the support function and only adds area, keeping the layering
    column one-sided instead of losing that to clipping roundoff.  Areas
    and disk sections are computed on a disjoint carving of the union, so
    volume and layering are exact for the current polygon list."""

    def __init__(self, polygons, omega_r_max: float = 5.0,
                 omega_points: int = 512, snapshot_resolution: int = 384,
                 snapshot_box_half: float = 3.0):
        if not polygons:
            raise InputError("need at least one polygon")
        self._comps = [_hull2(np.asarray(p, dtype=float)) for p in polygons]
        for c in self._comps:
            if len(c) < 3:
                raise InputError("polygons must have positive area")
        self._circle = DirectionGrid.uniform_circle(1440)
        self._sup = self._support_now()
        self._step = float("nan")
        nodes = omega_points + 1 if omega_points % 2 == 0 else omega_points
        r_max = float(omega_r_max)
        self._radii = np.linspace(0.0, r_max, nodes)
        self._weights = _simpson_weights(nodes) * (r_max / (nodes - 1))
        self._snap_res = int(snapshot_resolution)
        self._snap_half = float(snapshot_box_half)

    def _support_now(self) -> np.ndarray:
        dirs = self._circle.directions
        vals = np.full(dirs.shape[0], -np.inf)
        for c in self._comps:
            vals = np.maximum(vals, (c @ dirs.T).max(axis=0))
        return vals

    def advance(self, h: Subspace):
        if h.ambient_dim != 2 or h.dim != 1:
            raise InputError("polygon union stepper needs a line in the plane")
        r = h.reflection_matrix()
        pieces = []
        for p in self._comps:
            for q in self._comps:
                rq = q @ r
                mids = 0.5 * (p[:, None, :] + rq[None, :, :]).reshape(-1, 2)
                pieces.append(_hull2(mids))
        self._comps = _merge_overlapping(pieces)
        sup = self._support_now()
        self._step = float(np.max(np.abs(sup - self._sup)))
        self._sup = sup

    def metrics(self, names=METRIC_COLUMNS) -> dict:
        out = {}
        carved = None
        for name in names:
            if name in ("volume", "omega") and carved is None:
                carved = _carve_disjoint(self._comps)
            if name == "volume":
                out[name] = float(sum(_shoelace(p) for p in carved))
            elif name == "omega":
                if self.circumradius() > self._radii[-1]:
                    raise InputError("layering r_max is below the circumradius")
                sections = np.zeros_like(self._radii)
                for p in carved:
                    sections += np.array([_polygon_disk_area(p, r)
                                          for r in self._radii])
                main = float(np.sum(self._weights * sections
                                    * np.exp(-self._radii**2)))
                tail = float(sections[-1] * 0.5 * np.sqrt(np.pi)
                             * scipy.special.erfc(self._radii[-1]))
                out[name] = main + tail
            elif name == "mean_width":
                out[name] = float(np.mean(self._sup + self._sup[self._circle.antipode]))
            elif name == "ball_radius":
                out[name] = 0.5 * float(self._sup.max() + self._sup.min())
            elif name == "ball_deviation":
                out[name] = 0.5 * float(self._sup.max() - self._sup.min())
            elif name == "step_distance":
                out[name] = self._step
            else:
                raise InputError(f"unknown metric {name!r}")
        return out

    def snapshot(self) -> VoxelSet:
        ineqs = [_edges_inward(c) for c in self._comps]

        def member(pts):
            inside = np.zeros(pts.shape[0], dtype=bool)
            for a, b in ineqs:
                inside |= np.all(pts @ a.T <= b[None, :] + 1e-12, axis=1)
            return inside

        half = self._snap_half
        return VoxelSet.from_indicator(member, np.full(2, -half),
                                       np.full(2, half),
                                       (self._snap_res, self._snap_res))

    def circumradius(self) -> float:
        return float(max(np.max(np.linalg.norm(c, axis=1)) for c in self._comps))

    def limit_symmetric(self, family, operator: str, tol: float,
                        tol_cells: float) -> bool:
        if len(self._comps) != 1:
            return False
        poly = Polytope(self._comps[0])
        return all(is_symmetric(poly, h, tol) for h in family)


# --------------------------------------------------------------------------
# revolution profile stepper (minkowski-blaschke along lines in R^3)
# --------------------------------------------------------------------------


class RevolutionProfileStepper:
    """Minkowski-Blaschke symmetrization along line subspaces in R^3.

    After one application the support function depends on a direction only
    through its angle to the axis, so the whole iteration lives on a
    latitude profile; each step evaluates the previous profile on rings
    about the new axis and averages over azimuth.  Mean width is exact from
    the profile; volume and layering are measured on the outer polyhedron
    of a fixed direction grid."""

    def __init__(self, evaluate, t_samples: int = 2049, ring_nodes: int = 512,
                 metric_directions: int = 1024,
                 omega_r_max: Optional[float] = None, omega_points: int = 512):
        if t_samples < 65:
            raise InputError("need at least 65 profile samples")
        self._evaluate = evaluate
        self._t_samples = int(t_samples)
        self._ring_nodes = int(ring_nodes)
        self._grid = DirectionGrid.for_dimension(3, int(metric_directions))
        vals = np.asarray(evaluate(self._grid.directions), dtype=float)
        if vals.min() <= 0.0:
            raise InputError("profile stepper needs the origin in the interior")
        self._vals = vals
        self._axis = None
        self._t = None
        self._g = None
        self._omega_r_max = (float(omega_r_max) if omega_r_max is not None
                             else float(vals.max()))
        self._omega_points = int(omega_points)
        self._step = float("nan")

    def advance(self, h: Subspace):
        if h.ambient_dim != 3 or h.dim != 1:
            raise InputError("profile stepper handles lines in R^3")
        axis = h.basis[0]
        t, g = mblaschke_profile(self._evaluate, axis, self._t_samples,
                                 self._ring_nodes)
        self._axis, self._t, self._g = axis, t, g
        self._evaluate = profile_evaluator(axis, t, g)
        vals = np.asarray(self._evaluate(self._grid.directions), dtype=float)
        self._step = float(np.max(np.abs(vals - self._vals)))
        self._vals = vals

    def _support_vector(self) -> SupportVector:
        return SupportVector(self._grid, self._vals.copy(),
                             "minkowski_blaschke", self._evaluate)

    def metrics(self, names=METRIC_COLUMNS) -> dict:
        out = {}
        sv = None
        # before the first step there is no profile yet; fall back to the
        # direction-grid samples
        g = self._g if self._g is not None else self._vals
        for name in names:
            if name in ("volume", "omega") and sv is None:
                sv = self._support_vector()
            if name == "volume":
                out[name] = float(_section_volumes(
                    sv, np.array([self._omega_r_max]))[0])
            elif name == "omega":
                out[name] = layering(sv, r_max=self._omega_r_max,
                                     quad_points=self._omega_points)
            elif name == "mean_width":
                if self._g is None:
                    out[name] = float(np.mean(
                        self._vals + self._vals[self._grid.antipode]))
                else:
                    out[name] = float(np.trapezoid(self._g, self._t))
            elif name == "ball_radius":
                out[name] = 0.5 * float(g.max() + g.min())
            elif name == "ball_deviation":
                out[name] = 0.5 * float(g.max() - g.min())
            elif name == "step_distance":
                out[name] = self._step
            else:
                raise InputError(f"unknown metric {name!r}")
        return out

    def snapshot(self) -> SupportVector:
        return self._support_vector()

    def circumradius(self) -> float:
        return float(self._vals.max())

    def limit_symmetric(self, family, operator: str, tol: float,
                        tol_cells: float) -> bool:
        if not all(h.dim == 1 and h.ambient_dim == 3 for h in family):
            return False
        return all(_support_ring_gap(self._evaluate, h.basis[0]) <= tol
                   for h in family)


# --------------------------------------------------------------------------
# running experiments
# --------------------------------------------------------------------------


def make_stepper(config: ExperimentConfig):
    """Build the stepper the grid spec names.  The choice is part of the
    config (grid["stepper"]) so runs reconstruct identically from JSON."""
    grid = config.grid
    kind = grid.get("stepper", "generic")
    if kind == "generic":
        body = build_body(config.initial)
        metric_grid = None
        if "metric_directions" in grid:
            metric_grid = DirectionGrid.for_dimension(
                body.dim, int(grid["metric_directions"]))
        return GenericStepper(body, config.operator, config.operator_params,
                              omega_r_max=grid.get("omega_r_max"),
                              omega_points=int(grid.get("omega_points", 512)),
                              metric_grid=metric_grid)
    if kind == "support_minkowski":
        if config.operator != "minkowski":
            raise InputError(
                "grid.stepper: support_minkowski drives the minkowski operator only")
        body = build_body(config.initial)
        return MinkowskiSupportStepper(
            body,
            directions=int(grid.get("directions", 16384)),
            rng_seed=int(grid.get("rng_seed", config.rng_seed)))
    if kind == "polygon_union":
        if config.operator != "minkowski":
            raise InputError(
                "grid.stepper: polygon_union drives the minkowski operator only")
        if config.initial.get("kind") != "polygon_union" or \
                "polygons" not in config.initial:
            raise InputError(
                "initial: polygon_union stepper needs kind 'polygon_union' "
                "with a 'polygons' list")
        return UnionPolygonsStepper(
            config.initial["polygons"],
            omega_r_max=float(grid.get("omega_r_max", 5.0)),
            omega_points=int(grid.get("omega_points", 512)),
            snapshot_resolution=int(grid.get("snapshot_resolution", 384)),
            snapshot_box_half=float(grid.get("snapshot_box_half", 3.0)))
    if kind == "revolution_profile":
        if config.operator != "minkowski_blaschke":
            raise InputError(
                "grid.stepper: revolution_profile drives minkowski_blaschke only")
        body = build_body(config.initial)
        if body.dim != 3:
            raise InputError("revolution_profile stepper needs a body in R^3")
        return RevolutionProfileStepper(
            lambda d: support_of(body, d),
            t_samples=int(grid.get("t_samples", 2049)),
            ring_nodes=int(grid.get("ring_nodes", 512)),
            metric_directions=int(grid.get("metric_directions", 1024)),
            omega_r_max=grid.get("omega_r_max"),
            omega_points=int(grid.get("omega_points", 512)))
    raise InputError(f"grid.stepper: unknown stepper {kind!r}")


def run_experiment(config: ExperimentConfig, stepper=None) -> ConvergenceReport:
    """Drive a stepper along the schedule and classify the outcome.

    Per step, in order: abort as diverging once the circumradius reaches
    twice its initial value; stop once the step distance stayed at or below
    step_tol for five consecutive steps (a plateau).  A plateau verdicts
    converged_to_ball when the ball deviation is at most ball_tol,
    converged_to_nonball when the limit passes the symmetry predicate of
    the operator for every family member, and budget_exhausted otherwise.
    Reaching the horizon without a plateau verdicts oscillating when a
    period-two pattern persisted (distance between K_m and K_{m-2} at most
    osc_tol over the last five steps while step distances stayed above
    step_tol), else budget_exhausted.
    """
    if stepper is None:
        stepper = make_stepper(config)
    osc_tol = config.osc_tol if config.osc_tol is not None else config.step_tol
    names = tuple(dict.fromkeys(config.metrics + ("step_distance",)))
    r0 = stepper.circumradius()
    rows: List[dict] = []
    snapshots: List[Tuple[int, object]] = []
    prev = stepper.snapshot()
    prev_prev = None
    plateau_run = 0
    alt_run = 0
    verdict = "budget_exhausted"
    settled = False
    for m in range(config.start, config.m_max + 1):
        try:
            h = config.schedule.subspace_at(m)
            stepper.advance(h)
            vals = stepper.metrics(names)
        except (InputError, NumericalError) as exc:
            # abort with the partial record attached, so callers can still
            # write whatever rows the run produced
            err = type(exc)(f"iteration m={m}: {exc}")
            err.partial_rows = list(rows)
            err.partial_snapshots = list(snapshots)
            err.partial_config = config
            raise err from exc
        row = {"m": m}
        for key in config.metrics:
            row[key] = vals[key]
        rows.append(row)
        body_now = stepper.snapshot()
        step = m - config.start + 1
        if step & (step - 1) == 0:
            snapshots.append((m, body_now))
        sd = vals["step_distance"]
        plateau_run = plateau_run + 1 if sd <= config.step_tol else 0
        if sd > config.step_tol and prev_prev is not None:
            alt = hausdorff_distance(body_now, prev_prev)
            alt_run = alt_run + 1 if alt <= osc_tol else 0
        prev_prev, prev = prev, body_now
        if stepper.circumradius() >= DIVERGENCE_FACTOR * r0 * (1.0 - 1e-12):
            verdict = "diverging"
            break
        if plateau_run >= PLATEAU_STEPS:
            settled = True
            break
    if settled:
        dev = stepper.metrics(("ball_radius", "ball_deviation"))
        if dev["ball_deviation"] <= config.ball_tol:
            verdict = "converged_to_ball"
        else:
            family = config.schedule.family
            tol_cells = float(config.grid.get("sym_tol_cells", 2.0))
            if family and stepper.limit_symmetric(family, config.operator,
                                                  config.ball_tol, tol_cells):
                verdict = "converged_to_nonball"
            else:
                verdict = "budget_exhausted"
    elif verdict != "diverging" and alt_run >= PLATEAU_STEPS:
        verdict = "oscillating"
    limit = stepper.snapshot()
    if not snapshots or snapshots[-1][0] != rows[-1]["m"]:
        snapshots.append((rows[-1]["m"], limit))
    return ConvergenceReport(config, rows, verdict, limit, snapshots)


def run_batch(configs: Sequence[ExperimentConfig],
              threads: int = 1) -> List[ConvergenceReport]:
    """Run several experiments and return the reports ordered by config
    hash, so the output is identical whatever the thread count."""
    ordered = sorted(configs, key=config_hash)
    if threads <= 1:
        return [run_experiment(c) for c in ordered]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(run_experiment, ordered))


# --------------------------------------------------------------------------
# presets
# --------------------------------------------------------------------------


def _surrogate_lines_2d() -> List[Subspace]:
    return [Subspace.line([np.cos(a), np.sin(a)]) for a in surrogate_angles(2)]


def _preset_klain_steiner_2d() -> ExperimentConfig:
    cell = 3.0 / 512
    return ExperimentConfig(
        name="klain_steiner_2d",
        initial={"kind": "voxel",
                 "base": {"kind": "cube", "n": 2, "half_side": 1.0},
                 "resolution": 512, "box_half": 1.5},
        operator="steiner",
        schedule=round_robin(_surrogate_lines_2d()),
        m_max=500,
        step_tol=1.25 * cell,
        ball_tol=0.03,
        grid={"stepper": "generic", "omega_points": 512, "omega_r_max": 1.6,
              "sym_tol_cells": 2.0})


def _preset_universal_minkowski_3d() -> ExperimentConfig:
    return ExperimentConfig(
        name="universal_minkowski_3d",
        initial={"kind": "cube", "n": 3, "half_side": 0.5},
        operator="minkowski",
        schedule=round_robin(make_family(3, 1, "lines")),
        m_max=72,
        step_tol=4.2e-3,
        ball_tol=0.02,
        grid={"stepper": "support_minkowski", "directions": 16384,
              "rng_seed": 0})


def _preset_universal_schwarz_3d() -> ExperimentConfig:
    cell = 1.8 / 96
    return ExperimentConfig(
        name="universal_schwarz_3d",
        initial={"kind": "voxel",
                 "base": {"kind": "cube", "n": 3, "half_side": 0.5},
                 "resolution": 96, "box_half": 0.9},
        operator="schwarz",
        schedule=round_robin(make_family(3, 1, "rotational")),
        m_max=60,
        step_tol=0.25 * cell,
        ball_tol=2.5 * cell,
        grid={"stepper": "generic", "omega_points": 512, "omega_r_max": 1.0,
              "metric_directions": 1024, "sym_tol_cells": 2.0})


def _preset_oscillator_28june() -> ExperimentConfig:
    # odd steps reflect about the line normal to (cos t, sin t) with
    # 0 < t < pi/4 and no square symmetry, even steps about the x axis;
    # the square K = [-1,1]^2 then cycles between K and its rotation by t
    theta = surrogate_angles(2)[0]
    family = [Subspace.line([-np.sin(theta), np.cos(theta)]),
              Subspace.line([1.0, 0.0])]
    return ExperimentConfig(
        name="oscillator_28june",
        initial={"kind": "cube", "n": 2, "half_side": 1.0},
        operator="translate_or_cube",
        schedule=round_robin(family),
        m_max=101,
        step_tol=1e-6,
        osc_tol=1e-9,
        ball_tol=0.01,
        grid={"stepper": "generic"})


def _preset_unbounded_44exc() -> ExperimentConfig:
    # odd steps use the line normal to (1, 1), even steps the x axis; the
    # square K = [-1,1]^2 doubles in area at every step under cyl_hull
    family = [Subspace.line([1.0, -1.0]), Subspace.line([1.0, 0.0])]
    return ExperimentConfig(
        name="unbounded_44exc",
        initial={"kind": "cube", "n": 2, "half_side": 1.0},
        operator="cyl_hull",
        schedule=round_robin(family),
        m_max=24,
        step_tol=1e-6,
        ball_tol=0.01,
        grid={"stepper": "generic", "omega_r_max": 6.0})


def _preset_compact_annulus_schwarz() -> ExperimentConfig:
    cell = 2.5 / 512
    return ExperimentConfig(
        name="compact_annulus_schwarz",
        initial={"kind": "annulus", "outer": 1.0, "inner": 0.5,
                 "resolution": 512, "box_half": 1.25},
        operator="steiner",
        schedule=round_robin(_surrogate_lines_2d()),
        m_max=500,
        step_tol=1.25 * cell,
        ball_tol=0.03,
        grid={"stepper": "generic", "omega_points": 512, "omega_r_max": 1.3,
              "sym_tol_cells": 2.0})


def _preset_compact_squares_minkowski() -> ExperimentConfig:
    square = np.array([[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]])
    centers = [(-1.35, -0.85), (1.25, 0.95)]
    polys = [(square + np.asarray(c)).tolist() for c in centers]
    return ExperimentConfig(
        name="compact_squares_minkowski",
        initial={"kind": "polygon_union", "polygons": polys},
        operator="minkowski",
        schedule=round_robin(make_family(2, 1, "lines")),
        m_max=120,
        step_tol=1e-3,
        ball_tol=0.02,
        grid={"stepper": "polygon_union", "omega_r_max": 5.0,
              "omega_points": 256, "snapshot_resolution": 384,
              "snapshot_box_half": 3.0})


PRESETS = {
    "klain_steiner_2d": _preset_klain_steiner_2d,
    "universal_minkowski_3d": _preset_universal_minkowski_3d,
    "universal_schwarz_3d": _preset_universal_schwarz_3d,
    "oscillator_28june": _preset_oscillator_28june,
    "unbounded_44exc": _preset_unbounded_44exc,
    "compact_annulus_schwarz": _preset_compact_annulus_schwarz,
    "compact_squares_minkowski": _preset_compact_squares_minkowski,
}


def preset_config(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise InputError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return PRESETS[name]()


def run_preset(name: str) -> ConvergenceReport:
    return run_experiment(preset_config(name))
