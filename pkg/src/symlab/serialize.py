"""JSON serialization of bodies.

Every document is ``{"kind": ..., "dim": ..., "payload": {...}}``.  Voxel
occupancy is run-length encoded in C order (alternating run lengths,
starting with unoccupied) so large grids stay readable and diff-able.
"""

from __future__ import annotations

import json
from typing import Union

import numpy as np

from .bodies import DirectionGrid, OriginBall, Polytope, SupportVector, VoxelSet
from .errors import InputError


def _rle_encode(flat: np.ndarray) -> list[int]:
    """Alternating run lengths over a flat boolean array, first run counts
    zeros (possibly zero-length)."""
    n = flat.size
    if n == 0:
        return []
    changes = np.flatnonzero(np.diff(flat.astype(np.int8)))
    edges = np.concatenate([[-1], changes, [n - 1]])
    runs = np.diff(edges).tolist()
    if flat[0]:
        runs = [0] + runs
    return [int(r) for r in runs]


def _rle_decode(runs: list[int], size: int) -> np.ndarray:
    flat = np.zeros(size, dtype=bool)
    pos = 0
    value = False
    for r in runs:
        if r < 0 or pos + r > size:
            raise InputError("malformed run-length payload")
        if value:
            flat[pos : pos + r] = True
        pos += r
        value = not value
    if pos != size:
        raise InputError("run-length payload does not cover the grid")
    return flat


def to_dict(body) -> dict:
    if isinstance(body, Polytope):
        return {
            "kind": "polytope",
            "dim": body.dim,
            "payload": {"vertices": body.vertices.tolist()},
        }
    if isinstance(body, SupportVector):
        return {
            "kind": "support",
            "dim": body.dim,
            "payload": {
                "directions": body.grid.directions.tolist(),
                "values": body.values.tolist(),
                "provenance": body.provenance,
            },
        }
    if isinstance(body, VoxelSet):
        return {
            "kind": "voxel",
            "dim": body.dim,
            "payload": {
                "box_lo": body.box_lo.tolist(),
                "box_hi": body.box_hi.tolist(),
                "shape": list(body.occupancy.shape),
                "rle": _rle_encode(body.occupancy.ravel(order="C")),
            },
        }
    if isinstance(body, OriginBall):
        return {"kind": "ball", "dim": body.dim, "payload": {"radius": body.radius}}
    raise InputError(f"cannot serialize {type(body).__name__}")


def from_dict(doc: dict):
    try:
        kind = doc["kind"]
        dim = int(doc["dim"])
        payload = doc["payload"]
    except (KeyError, TypeError) as exc:
        raise InputError("body document needs kind, dim and payload") from exc
    if kind == "polytope":
        verts = np.asarray(payload["vertices"], dtype=float)
        if verts.ndim != 2 or verts.shape[1] != dim:
            raise InputError("vertex array does not match dim")
        return Polytope(verts)
    if kind == "support":
        grid = DirectionGrid(np.asarray(payload["directions"], dtype=float))
        if grid.n != dim:
            raise InputError("direction grid does not match dim")
        return SupportVector(
            grid,
            np.asarray(payload["values"], dtype=float),
            payload.get("provenance", "file"),
        )
    if kind == "voxel":
        shape = tuple(int(s) for s in payload["shape"])
        if len(shape) != dim:
            raise InputError("voxel shape does not match dim")
        flat = _rle_decode(payload["rle"], int(np.prod(shape)))
        return VoxelSet(
            np.asarray(payload["box_lo"], dtype=float),
            np.asarray(payload["box_hi"], dtype=float),
            flat.reshape(shape),
        )
    if kind == "ball":
        return OriginBall(dim, float(payload["radius"]))
    raise InputError(f"unknown body kind {kind!r}")


def dumps(body, indent: Union[int, None] = None) -> str:
    return json.dumps(to_dict(body), indent=indent)


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    return from_dict(doc)


def save(body, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(body))
        fh.write("\n")


def load(path):
    with open(path) as fh:
        return loads(fh.read())
