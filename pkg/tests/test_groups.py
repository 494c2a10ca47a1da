"""Tests for symmetry predicates, family diagnostics, and the orbit probe."""

import numpy as np
import pytest

from symlab import operators as ops
from symlab.bodies import (
    DirectionGrid,
    OriginBall,
    Polytope,
    SupportVector,
    VoxelSet,
)
from symlab.errors import InputError
from symlab.groups import (
    FamilyDiagnostics,
    check_family,
    is_rotationally_symmetric,
    is_symmetric,
    orbit_density,
    partition_product_body,
)
from symlab.subspaces import Subspace, klain_triple, surrogate_angles


def line2(angle):
    return Subspace.line([np.cos(angle), np.sin(angle)])


class TestIsSymmetric:
    def test_ball_any_subspace(self):
        ball = OriginBall(3, 1.0)
        for h in (Subspace.line([0, 0, 1]), Subspace.coordinate(3, [0, 1])):
            assert is_symmetric(ball, h, 1e-12)

    def test_shifted_square_not_symmetric(self):
        sq = Polytope([[0, 0], [1, 0], [1, 1], [0, 1]])
        assert not is_symmetric(sq, Subspace.line([1, 0]), 1e-6)

    def test_square_diagonal_symmetric(self):
        sq = Polytope([[-1, -1], [1, -1], [1, 1], [-1, 1]])
        assert is_symmetric(sq, line2(np.pi / 4), 1e-12)

    def test_voxel_blob(self):
        sym = VoxelSet.from_indicator(
            lambda p: np.abs(p[:, 0]) + p[:, 1] ** 2 <= 1.2,
            [-2, -2], [2, 2], (96, 96),
        )
        assert is_symmetric(sym, Subspace.line([0, 1]), 1.5 * sym.cell_size)
        skew = VoxelSet.from_indicator(
            lambda p: np.abs(p[:, 0] - 0.4) + p[:, 1] ** 2 <= 1.2,
            [-2, -2], [2, 2], (96, 96),
        )
        assert not is_symmetric(skew, Subspace.line([0, 1]), 2 * skew.cell_size)

    def test_support_vector_paths(self):
        grid = DirectionGrid.uniform_circle(720)
        rect = SupportVector.from_polytope(
            Polytope([[-1, -0.5], [1, -0.5], [1, 0.5], [-1, 0.5]]), grid
        )
        assert is_symmetric(rect, Subspace.line([1, 0]), 1e-10)
        # oblique line: grid not closed; the attached evaluator handles it
        assert not is_symmetric(rect, line2(0.6), 1e-3)
        bare = SupportVector(grid, rect.values, "rect")
        with pytest.raises(InputError):
            is_symmetric(bare, line2(0.6), 1e-3)


class TestIsRotationallySymmetric:
    def test_spherical_cylinder(self):
        vox = VoxelSet.from_indicator(
            lambda p: (np.abs(p[:, 0]) <= 0.8)
            & (np.linalg.norm(p[:, 1:], axis=1) <= 0.6),
            [-1.5] * 3, [1.5] * 3, (48,) * 3,
        )
        assert is_rotationally_symmetric(vox, Subspace.line([1, 0, 0]), 0)

    def test_cube_fails_at_fine_resolution(self):
        # the square fibers' corners sit about 5.7 cells outside the
        # equal-count disk at this resolution
        cube = VoxelSet.from_indicator(
            lambda p: np.max(np.abs(p), axis=1) <= 1.0,
            [-1.5] * 3, [1.5] * 3, (64,) * 3,
        )
        assert not is_rotationally_symmetric(cube, Subspace.line([1, 0, 0]), 4)
        assert is_rotationally_symmetric(cube, Subspace.line([1, 0, 0]), 8)

    def test_schwarz_output_round_about_oblique_axis(self):
        body = VoxelSet.from_indicator(
            lambda p: np.max(np.abs(p), axis=1) <= 1.0,
            [-2] * 3, [2] * 3, (64,) * 3,
        )
        h = Subspace.line([0.3, 0.5, np.sqrt(1 - 0.34)])
        out = ops.schwarz(body, h)
        # two resampling passes cost about 1.7 cells of Hausdorff jitter,
        # while the cube itself misses by 15 cells about the same line
        assert is_rotationally_symmetric(out, h, 2.5)
        assert not is_rotationally_symmetric(body, h, 10.0)

    def test_validation(self):
        with pytest.raises(InputError):
            is_rotationally_symmetric(OriginBall(3, 1.0), Subspace.line([1, 0, 0]), 1)
        vox = VoxelSet.ball(2, 1.0, 24)
        with pytest.raises(InputError):
            is_rotationally_symmetric(vox, Subspace.coordinate(2, [0, 1]), 1)


class TestCheckFamily:
    def test_orthogonal_lines_partitioned(self):
        fam = [Subspace.line([1, 0]), Subspace.line([0, 1])]
        d = check_family(fam, "reflection_lines")
        assert d.spans_ambient
        assert d.orthogonal_partition_found is not None
        a, b = d.orthogonal_partition_found
        assert sorted(a + b) == [0, 1] and a and b

    def test_surrogate_lines_connected(self):
        theta = surrogate_angles(1)[0]
        fam = [Subspace.line([1, 0]), line2(theta)]
        d = check_family(fam, "reflection_lines")
        assert d.spans_ambient
        assert d.orthogonal_partition_found is None
        assert all(d.chain_condition)

    def test_rotational_mode_uses_complements(self):
        # two planes in R3 through a common generic rotation: complements
        # are two non-orthogonal lines spanning only a plane of R3
        p1 = Subspace.coordinate(3, [0, 1])
        p2 = Subspace.from_spanning(
            np.array([[1.0, 0, 0], [0, np.cos(0.5), np.sin(0.5)]])
        )
        d = check_family([p1, p2], "rotational")
        assert not d.spans_ambient  # complements span only 2 of 3 dims
        assert d.orthogonal_partition_found is None
        p3 = Subspace.from_spanning(
            np.array([[0, 1.0, 0], [np.cos(0.5), 0, np.sin(0.5)]])
        )
        d3 = check_family([p1, p2, p3], "rotational")
        assert d3.spans_ambient

    def test_klain_triple_chain_condition(self):
        h1, h2, h3 = klain_triple(5, 2, surrogate_angles(2))
        d = check_family([h1, h2, h3], "reflection_planes")
        assert all(d.chain_condition)
        assert d.orthogonal_partition_found is None

    def test_irrationality_report(self):
        fam = [Subspace.line([1, 0]), line2(np.pi / 4)]
        d = check_family(fam, "reflection_lines")
        (rep,) = d.irrationality_report
        assert rep.pair == (0, 1)
        assert rep.best_p == 1 and rep.best_q == 4
        assert rep.approx_error <= 1e-12

        surro = check_family(
            [Subspace.line([1, 0]), line2(surrogate_angles(1)[0])],
            "reflection_lines",
        ).irrationality_report[0]
        assert surro.best_q > 50
        assert 0 < surro.approx_error < 1e-6

    def test_validation(self):
        with pytest.raises(InputError):
            check_family([], "reflection_lines")
        with pytest.raises(InputError):
            check_family([Subspace.line([1, 0])], "bad_mode")
        with pytest.raises(InputError):
            check_family(
                [Subspace.line([1, 0, 0]), Subspace.coordinate(3, [0, 1])],
                "reflection_planes",
            )
        with pytest.raises(InputError):
            check_family([Subspace.coordinate(2, [0, 1])], "reflection_lines")

    def test_serialization(self):
        fam = [Subspace.line([1, 0]), Subspace.line([0, 1])]
        d = check_family(fam, "reflection_lines")
        as_dict = d.to_dict()
        assert as_dict["spans_ambient"] is True
        assert as_dict["orthogonal_partition_found"] == [[0], [1]]
        assert isinstance(d, FamilyDiagnostics)


class TestPartitionProductFixture:
    """A family admitting an orthogonal partition cannot force sphericity:
    the product of balls in the two factors is rotationally symmetric about
    every family member but is not a ball."""

    def setup_method(self):
        self.s1 = Subspace.coordinate(4, [0, 1])
        self.s2 = Subspace.coordinate(4, [2, 3])
        self.family = [self.s2, self.s1]

    def test_family_flagged(self):
        d = check_family(self.family, "rotational")
        assert d.spans_ambient
        assert d.orthogonal_partition_found is not None

    def test_product_body_symmetric_but_not_ball(self):
        body = partition_product_body(self.s1, self.s2)
        rng = np.random.default_rng(5)
        dirs = rng.normal(size=(256, 4))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)

        def block_rotation(angle, first):
            q = np.eye(4)
            c, s = np.cos(angle), np.sin(angle)
            a, b = (0, 1) if first else (2, 3)
            q[a, a] = c
            q[a, b] = -s
            q[b, a] = s
            q[b, b] = c
            return q

        vals = body.evaluate(dirs)
        for first in (True, False):
            for angle in (0.3, 1.1, 2.7):
                q = block_rotation(angle, first)
                assert np.max(np.abs(body.evaluate(dirs @ q.T) - vals)) <= 1e-12
        # reflections through both family members leave it invariant
        for h in self.family:
            assert np.max(np.abs(
                body.evaluate(dirs @ h.reflection_matrix().T) - vals
            )) <= 1e-12
        # but it is not a ball
        assert np.ptp(body.values) > 0.3

    def test_rejects_non_partition(self):
        with pytest.raises(InputError):
            partition_product_body(self.s1, Subspace.coordinate(4, [1, 2]))


class TestOrbitDensity:
    def setup_method(self):
        theta = np.pi / np.sqrt(2) - np.pi / 2
        self.fam = [Subspace.line([1.0, 0.0]), line2(theta)]

    def test_two_surrogate_lines_dense(self):
        gap, used = orbit_density(self.fam, [1.0, 0.0], 0.05, 100_000, rng_seed=7)
        assert gap <= 0.05
        assert used <= 100_000

    def test_orthogonal_lines_stall(self):
        fam = [Subspace.line([1.0, 0.0]), Subspace.line([0.0, 1.0])]
        gap, used = orbit_density(fam, [1.0, 0.0], 0.05, 20_000, rng_seed=7)
        assert gap > 0.5
        assert used == 20_000

    def test_gap_monotone_in_budget(self):
        g1, _ = orbit_density(self.fam, [1.0, 0.0], 1e-9, 2_000, rng_seed=13)
        g2, _ = orbit_density(self.fam, [1.0, 0.0], 1e-9, 8_000, rng_seed=13)
        assert g2 <= g1 + 1e-15

    def test_deterministic(self):
        a = orbit_density(self.fam, [0.0, 1.0], 0.08, 3_000, rng_seed=3,
                          return_trajectory=True)
        b = orbit_density(self.fam, [0.0, 1.0], 0.08, 3_000, rng_seed=3,
                          return_trajectory=True)
        assert a == b
        counts = [c for c, _ in a[2]]
        gaps = [g for _, g in a[2]]
        assert counts == sorted(counts)
        assert all(x >= y - 1e-15 for x, y in zip(gaps, gaps[1:]))

    def test_three_generic_planes_r3(self):
        def plane_from_normal(v):
            v = np.asarray(v, float)
            v = v / np.linalg.norm(v)
            _, _, vt = np.linalg.svd(v[None, :])
            return Subspace.from_spanning(vt[1:])

        fam = [
            plane_from_normal([0, 0, 1.0]),
            plane_from_normal([np.sin(0.7), 0, np.cos(0.7)]),
            plane_from_normal([np.sin(0.9) * np.cos(2.0),
                               np.sin(0.9) * np.sin(2.0), np.cos(0.9)]),
        ]
        gap, _ = orbit_density(fam, [1.0, 0, 0], 0.2, 30_000, rng_seed=3)
        assert gap <= 0.2

    def test_validation(self):
        with pytest.raises(InputError):
            orbit_density(self.fam, [1.0, 0.0], -1.0, 100, rng_seed=0)
        with pytest.raises(InputError):
            orbit_density(self.fam, [1.0, 1.0], 0.1, 100, rng_seed=0)
