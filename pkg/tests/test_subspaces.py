import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from symlab import (
    InputError,
    NumericalError,
    Subspace,
    canonical_pair,
    klain_triple,
    orthonormalize,
    principal_angles,
    subspace_distance,
    subspaces_equal,
    surrogate_angles,
)


def random_subspace(n, k, seed):
    rng = np.random.default_rng(seed)
    return Subspace.from_spanning(rng.normal(size=(k, n)))


class TestProjectReflect:
    def test_projection_matches_least_squares(self):
        # Oracle: orthogonal projection solves the least-squares problem
        # min ||B^T c - x||, then projects back.
        h = Subspace.from_spanning([[1.0, 1.0]])
        x = np.array([3.0, 4.0])
        coeffs, *_ = np.linalg.lstsq(h.basis.T, x, rcond=None)
        expected = h.basis.T @ coeffs
        assert np.allclose(h.project(x), expected, atol=1e-12)
        assert np.allclose(h.project(x), [3.5, 3.5], atol=1e-12)

    def test_projection_batch_shape(self):
        h = random_subspace(4, 2, seed=7)
        pts = np.random.default_rng(1).normal(size=(10, 4))
        proj = h.project(pts)
        assert proj.shape == (10, 4)
        # Residuals are orthogonal to the subspace.
        assert np.max(np.abs((pts - proj) @ h.basis.T)) < 1e-12

    def test_reflection_of_contained_point_is_identity(self):
        h = Subspace.coordinate(3, [0, 1])
        x = np.array([2.0, -1.0, 0.0])
        assert np.allclose(h.reflect(x), x, atol=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_reflection_is_an_involution(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        k = int(rng.integers(1, n))
        h = Subspace.from_spanning(rng.normal(size=(k, n)))
        x = rng.normal(size=n)
        assert np.max(np.abs(h.reflect(h.reflect(x)) - x)) < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_reflection_preserves_norm(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        k = int(rng.integers(1, n))
        h = Subspace.from_spanning(rng.normal(size=(k, n)))
        x = rng.normal(size=n)
        assert abs(np.linalg.norm(h.reflect(x)) - np.linalg.norm(x)) < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_complement_splits_identity(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        k = int(rng.integers(1, n))
        h = Subspace.from_spanning(rng.normal(size=(k, n)))
        x = rng.normal(size=n)
        assert np.max(np.abs(h.project(x) + h.complement().project(x) - x)) < 1e-12

    def test_reflection_through_complement_is_negated_reflection(self):
        h = random_subspace(4, 2, seed=3)
        x = np.random.default_rng(4).normal(size=4)
        assert np.allclose(h.complement().reflect(x), -h.reflect(x), atol=1e-12)


class TestOrthonormalize:
    def test_rejects_dependent_vectors(self):
        with pytest.raises(NumericalError):
            orthonormalize([[1.0, 0.0], [1.0 + 1e-12, 1e-12]])

    def test_rejects_zero_vector(self):
        with pytest.raises(NumericalError):
            orthonormalize([[0.0, 0.0, 0.0]])

    def test_preserves_span(self):
        vecs = np.array([[1.0, 2.0, 0.5], [0.3, -1.0, 2.0]])
        q = orthonormalize(vecs)
        assert np.allclose(q @ q.T, np.eye(2), atol=1e-12)
        # Same span: original vectors reconstruct from the new basis.
        assert np.allclose((vecs @ q.T) @ q, vecs, atol=1e-10)

    def test_subspace_constructor_rejects_raw_bases(self):
        with pytest.raises(InputError):
            Subspace(np.array([[1.0, 1.0]]))


class TestPrincipalAngles:
    def test_against_scipy_oracle(self):
        a = random_subspace(6, 3, seed=11)
        b = random_subspace(6, 2, seed=12)
        ours = principal_angles(a, b)
        ref = np.sort(scipy.linalg.subspace_angles(a.basis.T, b.basis.T))
        assert np.allclose(ours, ref, atol=1e-10)

    def test_equality_detection(self):
        h1 = Subspace.from_spanning([[1.0, 2.0, 3.0], [0.0, 1.0, 1.0]])
        h2 = Subspace.from_spanning([[2.0, 4.0, 6.0], [1.0, 3.0, 4.0]])
        assert subspace_distance(h1, h2) < 1e-10
        assert subspaces_equal(h1, h2)

    def test_orthogonal_lines(self):
        h1 = Subspace.line([1.0, 0.0])
        h2 = Subspace.line([0.0, 1.0])
        assert abs(subspace_distance(h1, h2) - np.pi / 2) < 1e-12


class TestCanonicalPair:
    def test_angles_recovered(self):
        angles = np.array([0.2, 0.7, 1.1])
        form = canonical_pair(8, 4, 3, angles)
        assert np.allclose(principal_angles(form.h1, form.h2)[-3:], angles, atol=1e-12)
        # Angles equal to zero show up as shared directions.
        assert form.h1.dim == 4 and form.h2.dim == 3

    def test_overlap_requires_zero_angles(self):
        # k + i - n = 1, so the first angle must vanish.
        with pytest.raises(InputError):
            canonical_pair(4, 3, 2, [0.3, 0.8])
        form = canonical_pair(4, 3, 2, [0.0, 0.8])
        angs = principal_angles(form.h1, form.h2)
        assert np.allclose(angs, [0.0, 0.8], atol=1e-12)

    def test_rejects_decreasing_angles(self):
        with pytest.raises(InputError):
            canonical_pair(6, 3, 2, [0.9, 0.4])

    def test_composed_reflections_closed_form(self):
        # With x decomposed along the tilt planes, (R_H2 R_H1)^m advances each
        # planar angle by 2 m a_j, fixes the H1-part outside the tilt planes
        # for even m and the orthogonal remainder always.
        n, k, i = 6, 3, 2
        angles = np.array([0.31, 0.77])
        form = canonical_pair(n, k, i, angles)
        r1 = form.h1.reflection_matrix()
        r2 = form.h2.reflection_matrix()
        step = r2 @ r1

        rho = np.array([1.3, 0.4])
        theta = np.array([0.25, -1.1])
        y1 = np.zeros(n)
        y1[2] = 0.8  # in span{e_3, ..., e_k}
        y2 = np.zeros(n)
        y2[5] = -0.6  # in (H1 + H2)^perp

        def planar_point(th):
            x = y1 + y2
            for j in range(1, i + 1):
                e_a = np.zeros(n)
                e_a[j - 1] = 1.0
                e_b = np.zeros(n)
                e_b[i + k + 1 - j - 1] = 1.0
                x = x + rho[j - 1] * (np.cos(th[j - 1]) * e_a + np.sin(th[j - 1]) * e_b)
            return x

        x = planar_point(theta)
        cur = x.copy()
        for m in range(1, 1001):
            cur = step @ cur
            if m in (1, 2, 3, 7, 100, 999, 1000):
                expected = planar_point(2 * m * angles + theta)
                expected += ((-1) ** m - 1) * y1  # y1 flips for odd m
                assert np.max(np.abs(cur - expected)) < 1e-9, f"m={m}"


class TestKlainTriple:
    def test_explicit_spans_in_r4(self):
        a1, a2 = 0.3, 0.9
        h1, h2, h3 = klain_triple(4, 2, [a1, a2])
        assert subspaces_equal(h1, Subspace.coordinate(4, [0, 2]))
        want2 = Subspace.from_spanning(
            [
                [np.cos(a1), np.sin(a1), 0.0, 0.0],
                [0.0, 0.0, np.cos(a2), np.sin(a2)],
            ]
        )
        want3 = Subspace.from_spanning(
            [
                [np.cos(a1), 0.0, 0.0, np.sin(a1)],
                [0.0, np.sin(a2), np.cos(a2), 0.0],
            ]
        )
        assert subspaces_equal(h2, want2)
        assert subspaces_equal(h3, want3)

    def test_pairwise_angles_match(self):
        angles = np.array([0.25, 0.6, 1.0])
        h1, h2, h3 = klain_triple(7, 3, angles)
        assert np.allclose(principal_angles(h1, h2), angles, atol=1e-12)
        assert np.allclose(principal_angles(h1, h3), angles, atol=1e-12)

    def test_rejects_out_of_range(self):
        with pytest.raises(InputError):
            klain_triple(4, 2, [0.0, 0.5])
        with pytest.raises(InputError):
            klain_triple(3, 2, [0.3, 0.5])


class TestSurrogateAngles:
    def test_strictly_increasing_in_range(self):
        vals = surrogate_angles(6)
        assert vals.shape == (6,)
        assert np.all(vals > 0) and np.all(vals < np.pi / 2)
        assert np.all(np.diff(vals) > 0)

    def test_upper_rescale(self):
        vals = surrogate_angles(3, upper=np.pi / 4)
        assert np.all(vals < np.pi / 4)
