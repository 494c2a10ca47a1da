"""Representations, conversions and metrics.

Oracle values frozen here:
  * mean width of the segment [-e1, e1] in the plane is 4/pi,
  * mean width of the square [-1,1]^2 is 8/pi (perimeter / pi),
  * best centered ball of [-1,1]^2 has radius (sqrt2+1)/2, deviation
    (sqrt2-1)/2,
  * Hausdorff distance between centered balls of radii r, s is |r - s|,
  * Hausdorff distance between a square and its translate by t is |t|.
"""

import json

import numpy as np
import pytest

from symlab import serialize
from symlab.bodies import (
    DirectionGrid,
    OriginBall,
    Polytope,
    SupportVector,
    VoxelSet,
    ball_deviation,
    convert,
    devoxelize,
    hausdorff_distance,
    mean_width,
    support_of,
    volume,
    voxelize_polytope,
)
from symlab.errors import InputError, NumericalError
from symlab.subspaces import Subspace


def square(half=1.0):
    return Polytope([[half, half], [-half, half], [-half, -half], [half, -half]])


class TestDirectionGrid:
    def test_circle_antipode_is_exact_shift(self):
        g = DirectionGrid.uniform_circle(360)
        anti = g.antipode
        assert np.array_equal(g.directions[anti], -g.directions)

    def test_circle_rejects_bad_count(self):
        with pytest.raises(InputError):
            DirectionGrid.uniform_circle(31)

    def test_sphere_grid_is_symmetric_and_unit(self):
        g = DirectionGrid.sphere(3, 512)
        assert g.size == 512
        norms = np.linalg.norm(g.directions, axis=1)
        assert np.max(np.abs(norms - 1)) < 1e-12
        assert np.allclose(g.directions[g.antipode], -g.directions)

    def test_reflection_index_map_axis(self):
        g = DirectionGrid.uniform_circle(360)
        h = Subspace.line([1.0, 0.0])
        idx = g.reflection_index_map(h)
        reflected = g.directions.copy()
        reflected[:, 1] *= -1
        assert np.allclose(g.directions[idx], reflected, atol=1e-12)

    def test_reflection_index_map_requires_closure(self):
        g = DirectionGrid.uniform_circle(360)
        h = Subspace.line([np.cos(0.3), np.sin(0.3)])
        with pytest.raises(InputError):
            g.reflection_index_map(h)

    def test_closure_single_reflection_terminates(self):
        g = DirectionGrid.uniform_circle(72)
        h = Subspace.line([np.cos(0.3), np.sin(0.3)])
        closed = g.closed_under([h])
        # closure under one reflection needs at most one doubling
        assert closed.size <= 2 * g.size
        idx = closed.reflection_index_map(h)
        assert idx.shape == (closed.size,)

    def test_closure_detects_infinite_orbit(self):
        g = DirectionGrid.uniform_circle(8)
        h1 = Subspace.line([1.0, 0.0])
        h2 = Subspace.line([np.cos(1.0), np.sin(1.0)])
        with pytest.raises(NumericalError):
            g.closed_under([h1, h2], max_rounds=6)


class TestPolytope:
    def test_prunes_interior_and_duplicate_points(self):
        p = Polytope(
            [[1, 1], [-1, 1], [-1, -1], [1, -1], [0, 0], [0.5, 0.5], [1, 1], [1, 0]]
        )
        assert p.vertices.shape == (4, 2)
        assert volume(p) == pytest.approx(4.0, abs=1e-12)

    def test_collinear_points_become_segment(self):
        p = Polytope([[0, 0, 0], [1, 1, 1], [2, 2, 2], [0.5, 0.5, 0.5]])
        assert p.vertices.shape == (2, 3)
        assert volume(p) == 0.0

    def test_single_point(self):
        p = Polytope([[2.0, 3.0]])
        assert p.vertices.shape == (1, 2)
        assert p.support([[1.0, 0.0]])[0] == pytest.approx(2.0)

    def test_cube_volume(self):
        assert volume(Polytope.cube(3, 1.0)) == pytest.approx(8.0, rel=1e-12)

    def test_hexagon_support_matches_vertex_enumeration(self):
        hexagon = Polytope.regular_polygon(6, radius=2.0, phase=0.1)
        rng = np.random.default_rng(7)
        for _ in range(20):
            u = rng.normal(size=2)
            u /= np.linalg.norm(u)
            expected = max(u @ v for v in hexagon.vertices)
            assert hexagon.support(u)[0] == pytest.approx(expected, abs=1e-12)

    def test_contains(self):
        p = square()
        inside = p.contains([[0.0, 0.0], [0.999, 0.999], [1.0, 1.0]])
        outside = p.contains([[1.001, 0.0], [0.0, -1.2]])
        assert inside.all() and not outside.any()

    def test_reflect_through_line(self):
        p = Polytope([[1, 0], [2, 0], [1.5, 1]])
        r = p.reflect(Subspace.line([1.0, 0.0]))
        assert np.allclose(sorted(r.vertices[:, 1]), sorted(-p.vertices[:, 1]))


class TestSupportVector:
    def test_negative_width_rejected(self):
        g = DirectionGrid.uniform_circle(360)
        with pytest.raises(InputError):
            SupportVector(g, np.full(g.size, -1.0), "test")

    def test_from_polytope_keeps_exact_evaluator(self):
        p = square()
        sv = SupportVector.from_polytope(p, DirectionGrid.uniform_circle(720))
        u = np.array([[0.6, 0.8]])
        assert sv.evaluate(u)[0] == pytest.approx(p.support(u)[0], abs=1e-15)

    def test_grid_lookup_without_evaluator(self):
        g = DirectionGrid.uniform_circle(720)
        sv = SupportVector(g, square().support(g.directions), "test")
        u = g.directions[17] + 1e-9
        assert sv.evaluate(u / np.linalg.norm(u))[0] == pytest.approx(
            sv.values[17], abs=1e-8
        )


class TestVoxelSet:
    def test_ball_volume_two_percent(self):
        v = VoxelSet.ball(2, 1.0, 256)
        assert v.volume() == pytest.approx(np.pi, rel=0.02)

    def test_requires_cubical_cells(self):
        with pytest.raises(InputError):
            VoxelSet([0, 0], [2, 1], np.ones((4, 4), dtype=bool))

    def test_signed_permutation_rotation_is_exact(self):
        rng = np.random.default_rng(3)
        occ = rng.random((32, 32)) < 0.4
        occ[16, 16] = True
        v = VoxelSet([-1, -1], [1, 1], occ)
        q = np.array([[0.0, -1.0], [1.0, 0.0]])  # quarter turn
        r = v.transform(q)
        assert r.count() == v.count()
        back = r.transform(q.T)
        assert back.count() == v.count()
        assert np.array_equal(back.occupancy, v.occupancy)

    def test_general_rotation_approximately_preserves_volume(self):
        v = VoxelSet.ball(2, 1.0, 128)
        q = np.array(
            [[np.cos(0.7), -np.sin(0.7)], [np.sin(0.7), np.cos(0.7)]]
        )
        r = v.transform(q)
        assert r.volume() == pytest.approx(v.volume(), rel=0.03)

    def test_resample_identity(self):
        v = VoxelSet.ball(2, 1.0, 64)
        r = v.resample(v.box_lo, v.box_hi, v.occupancy.shape)
        assert np.array_equal(r.occupancy, v.occupancy)

    def test_boundary_mask_of_full_box(self):
        v = VoxelSet([0, 0], [1, 1], np.ones((8, 8), dtype=bool))
        mask = v.boundary_mask()
        assert mask.sum() == 8 * 8 - 6 * 6

    def test_contains_points(self):
        v = VoxelSet.ball(2, 1.0, 128)
        assert v.contains_points([[0.0, 0.0]])[0]
        assert not v.contains_points([[1.2, 0.0]])[0]


class TestMetrics:
    def test_segment_mean_width_is_4_over_pi(self):
        seg = Polytope([[-1.0, 0.0], [1.0, 0.0]])
        assert mean_width(seg, DirectionGrid.uniform_circle(720)) == pytest.approx(
            4 / np.pi, abs=1e-4
        )

    def test_square_mean_width_is_perimeter_over_pi(self):
        assert mean_width(square(), DirectionGrid.uniform_circle(720)) == pytest.approx(
            8 / np.pi, abs=1e-4
        )

    def test_ball_mean_width_exact(self):
        b = OriginBall(3, 1.5)
        assert mean_width(b, DirectionGrid.sphere(3, 256)) == pytest.approx(3.0)

    def test_square_ball_deviation_exact(self):
        radius, dev = ball_deviation(square(), DirectionGrid.uniform_circle(720))
        assert radius == pytest.approx((np.sqrt(2) + 1) / 2, abs=1e-12)
        assert dev == pytest.approx((np.sqrt(2) - 1) / 2, abs=1e-12)

    def test_voxel_ball_deviation_sees_cavity(self):
        def annulus(p):
            r = np.linalg.norm(p, axis=1)
            return (r <= 1.0) & (r >= 0.5)

        v = VoxelSet.from_indicator(annulus, [-1.25, -1.25], [1.25, 1.25], (256, 256))
        radius, dev = ball_deviation(v)
        assert radius == pytest.approx(0.75, abs=0.02)
        assert dev == pytest.approx(0.25, abs=0.02)

    def test_hausdorff_between_balls(self):
        g = DirectionGrid.uniform_circle(360)
        a = SupportVector.from_ball(1.0, g)
        b = SupportVector.from_ball(1.7, g)
        assert hausdorff_distance(a, b) == pytest.approx(0.7, abs=1e-12)

    def test_hausdorff_square_translate_exact(self):
        a = square()
        b = a.translate([0.3, 0.0])
        assert hausdorff_distance(a, b) == pytest.approx(0.3, abs=1e-12)
        assert hausdorff_distance(a, a) == 0.0

    def test_hausdorff_symmetry_polygons(self):
        rng = np.random.default_rng(11)
        a = Polytope(rng.normal(size=(12, 2)))
        b = Polytope(rng.normal(size=(9, 2)))
        assert hausdorff_distance(a, b) == pytest.approx(
            hausdorff_distance(b, a), abs=1e-12
        )

    def test_hausdorff_voxel_translates(self):
        v = VoxelSet.ball(2, 0.8, 128)
        w = v.translate([0.4, 0.0])
        d = hausdorff_distance(v, w)
        assert d == pytest.approx(0.4, abs=2 * v.cell_size)

    def test_support_dispatch(self):
        u = np.array([[1.0, 0.0]])
        assert support_of(square(), u)[0] == pytest.approx(1.0)
        assert support_of(OriginBall(2, 2.0), u)[0] == pytest.approx(2.0)


class TestConversions:
    def test_polytope_voxel_roundtrip_within_two_cell_diagonals(self):
        p = Polytope.regular_polygon(5, radius=1.0)
        vox = voxelize_polytope(p, 128)
        back = devoxelize(vox)
        diag = vox.cell_size * np.sqrt(2)
        assert hausdorff_distance(p, back) <= 2 * diag

    def test_cube_voxel_roundtrip_3d(self):
        p = Polytope.cube(3, 0.9)
        vox = voxelize_polytope(p, 48)
        back = devoxelize(vox)
        diag = vox.cell_size * np.sqrt(3)
        g = DirectionGrid.sphere(3, 512)
        assert hausdorff_distance(p, back, grid=g) <= 2 * diag

    def test_support_to_voxel_volume(self):
        sv = SupportVector.from_polytope(square(), DirectionGrid.uniform_circle(720))
        vox = convert(sv, "voxel", resolution=128)
        assert vox.volume() == pytest.approx(4.0, rel=0.03)

    def test_unsupported_conversion_raises(self):
        g = DirectionGrid.uniform_circle(360)
        sv = SupportVector.from_ball(1.0, g)
        with pytest.raises(InputError):
            convert(sv, "polytope")
        with pytest.raises(InputError):
            convert(square(), "nonsense")

    def test_ball_conversions(self):
        b = OriginBall(2, 1.0)
        sv = convert(b, "support", grid=DirectionGrid.uniform_circle(360))
        assert np.allclose(sv.values, 1.0)
        vox = convert(b, "voxel", resolution=128)
        assert vox.volume() == pytest.approx(np.pi, rel=0.03)


class TestSerialize:
    def test_polytope_roundtrip(self):
        p = Polytope.regular_polygon(7, radius=1.3, phase=0.2)
        q = serialize.loads(serialize.dumps(p))
        assert np.allclose(np.sort(q.vertices, axis=0), np.sort(p.vertices, axis=0))

    def test_support_roundtrip(self):
        sv = SupportVector.from_polytope(square(), DirectionGrid.uniform_circle(72))
        sv2 = serialize.loads(serialize.dumps(sv))
        assert np.allclose(sv2.values, sv.values)
        assert sv2.provenance == sv.provenance

    def test_voxel_roundtrip_exact(self):
        rng = np.random.default_rng(5)
        occ = rng.random((20, 20)) < 0.5
        occ[0, 0] = True
        v = VoxelSet([0, 0], [1, 1], occ)
        v2 = serialize.loads(serialize.dumps(v))
        assert np.array_equal(v2.occupancy, v.occupancy)
        assert np.allclose(v2.box_lo, v.box_lo)

    def test_voxel_rle_starts_with_zero_run(self):
        occ = np.array([[True, True], [False, True]])
        doc = serialize.to_dict(VoxelSet([0, 0], [2, 2], occ))
        rle = doc["payload"]["rle"]
        assert rle[0] == 0  # first cell occupied -> leading zero-length run
        assert sum(rle) == 4

    def test_ball_roundtrip(self):
        b = serialize.loads(serialize.dumps(OriginBall(3, 2.5)))
        assert b.dim == 3 and b.radius == 2.5

    def test_malformed_documents_raise(self):
        with pytest.raises(InputError):
            serialize.loads("not json")
        with pytest.raises(InputError):
            serialize.loads(json.dumps({"kind": "voxel", "dim": 2}))
        with pytest.raises(InputError):
            serialize.from_dict(
                {
                    "kind": "voxel",
                    "dim": 2,
                    "payload": {
                        "box_lo": [0, 0],
                        "box_hi": [1, 1],
                        "shape": [2, 2],
                        "rle": [1, 1],
                    },
                }
            )
