"""Tests for family constructions and iteration schedules."""

import math

import numpy as np
import pytest
import scipy.spatial

from symlab.errors import InputError
from symlab.groups import check_family
from symlab.schedules import (
    Schedule,
    cyclic_with_repeats,
    dense_random,
    explicit,
    make_family,
    round_robin,
    schedule_from_config,
)
from symlab.subspaces import Subspace, subspaces_equal


def admissible_cases():
    cases = []
    for n in range(2, 9):
        cases.append((n, 1, "lines", n))
        cases.append((n, n - 1, "hyperplanes", n))
        for i in range(2, n // 2 + 1):
            cases.append((n, i, "planes", math.ceil(n / i) + 1))
        for i in range(1, n):
            cases.append((n, i, "rotational", math.ceil(n / (n - i))))
    return cases


class TestMakeFamily:
    @pytest.mark.parametrize("n,i,kind,k", admissible_cases())
    def test_cardinality_and_dims(self, n, i, kind, k):
        fam = make_family(n, i, kind)
        assert len(fam) == k
        assert all(s.dim == i and s.ambient_dim == n for s in fam)

    @pytest.mark.parametrize("n,i,kind,k", admissible_cases())
    def test_passes_family_check(self, n, i, kind, k):
        fam = make_family(n, i, kind)
        mode = {
            "lines": "reflection_lines",
            "planes": "reflection_planes",
            "hyperplanes": "reflection_planes",
            "rotational": "rotational",
        }[kind]
        d = check_family(fam, mode)
        assert d.spans_ambient
        assert d.orthogonal_partition_found is None
        if kind == "planes":
            assert all(d.chain_condition)

    def test_deterministic(self):
        a = make_family(7, 2, "planes")
        b = make_family(7, 2, "planes")
        assert all(subspaces_equal(x, y) for x, y in zip(a, b))

    def test_inadmissible(self):
        with pytest.raises(InputError):
            make_family(3, 2, "lines")
        with pytest.raises(InputError):
            make_family(4, 2, "hyperplanes")
        with pytest.raises(InputError):
            make_family(5, 3, "planes")  # i > n/2
        with pytest.raises(InputError):
            make_family(4, 4, "rotational")
        with pytest.raises(InputError):
            make_family(4, 1, "grids")


class TestRules:
    def setup_method(self):
        self.fam = make_family(3, 1, "lines")

    def test_round_robin_order(self):
        s = round_robin(self.fam)
        got = [s.subspace_at(m) for m in range(1, 7)]
        want = [self.fam[j % 3] for j in range(6)]
        assert all(subspaces_equal(a, b) for a, b in zip(got, want))
        assert s.period() == 3

    def test_single_member_constant(self):
        s = round_robin(self.fam[:1])
        assert all(
            subspaces_equal(s.subspace_at(m), self.fam[0]) for m in (1, 2, 9)
        )

    def test_window_covers_family(self):
        s = round_robin(self.fam)
        k = s.period()
        for start in range(1, 8):
            window = {id(s.subspace_at(m)) for m in range(start, start + k)}
            assert len(window) == k

    def test_cyclic_with_repeats(self):
        s = cyclic_with_repeats(self.fam, [2, 1, 1])
        order = [s.subspace_at(m) for m in range(1, 9)]
        want_idx = [0, 0, 1, 2, 0, 0, 1, 2]
        assert all(
            subspaces_equal(a, self.fam[j]) for a, j in zip(order, want_idx)
        )
        with pytest.raises(InputError):
            cyclic_with_repeats(self.fam, [1, 1])
        with pytest.raises(InputError):
            cyclic_with_repeats(self.fam, [1, 0, 1])

    def test_explicit(self):
        s = explicit(self.fam, [2, 2, 0])
        assert subspaces_equal(s.subspace_at(1), self.fam[2])
        assert subspaces_equal(s.subspace_at(3), self.fam[0])
        with pytest.raises(InputError):
            s.subspace_at(4)  # horizon defaults to len(indices)
        with pytest.raises(InputError):
            explicit(self.fam, [3])
        with pytest.raises(InputError):
            explicit(self.fam, [])

    def test_position_validation(self):
        s = round_robin(self.fam, m_max=5)
        with pytest.raises(InputError):
            s.subspace_at(0)
        with pytest.raises(InputError):
            s.subspace_at(6)


class TestDenseRandom:
    def test_reproducible(self):
        a = dense_random(3, 1, rng_seed=99)
        b = dense_random(3, 1, rng_seed=99)
        for m in (1, 2, 3, 17):
            assert subspaces_equal(a.subspace_at(m), b.subspace_at(m))
        c = dense_random(3, 1, rng_seed=100)
        assert not subspaces_equal(a.subspace_at(1), c.subspace_at(1))

    def test_subspace_invariants(self):
        s = dense_random(4, 2, rng_seed=1)
        for m in range(1, 6):
            sub = s.subspace_at(m)
            assert sub.dim == 2 and sub.ambient_dim == 4
            gram = sub.basis @ sub.basis.T
            assert np.allclose(gram, np.eye(2), atol=1e-12)

    def test_covering_gap_decreases(self):
        s = dense_random(3, 1, rng_seed=5)
        rng = np.random.default_rng(0)
        sample = rng.normal(size=(500, 3))
        sample /= np.linalg.norm(sample, axis=1, keepdims=True)

        def gap(count):
            dirs = np.vstack([s.subspace_at(m).basis[0] for m in range(1, count + 1)])
            pts = np.vstack([dirs, -dirs])
            return scipy.spatial.cKDTree(pts).query(sample)[0].max()

        assert gap(400) < gap(40) < gap(4)


class TestConfigRoundTrip:
    def test_family_schedule(self):
        fam = make_family(4, 2, "rotational")
        s = cyclic_with_repeats(fam, [1, 2], m_max=20)
        back = schedule_from_config(s.to_config())
        assert back.rule == s.rule and back.m_max == 20
        for m in range(1, 8):
            assert subspaces_equal(back.subspace_at(m), s.subspace_at(m))

    def test_dense_random_schedule(self):
        s = dense_random(3, 2, rng_seed=42, m_max=10)
        back = schedule_from_config(s.to_config())
        for m in (1, 5, 10):
            assert subspaces_equal(back.subspace_at(m), s.subspace_at(m))

    def test_bad_config(self):
        with pytest.raises(InputError):
            schedule_from_config({"rule": "fancy"})
        fam = make_family(2, 1, "lines")
        cfg = round_robin(fam).to_config()
        cfg["indices"] = [5]
        with pytest.raises(InputError):
            schedule_from_config(cfg)

    def test_schedule_is_value_like(self):
        fam = make_family(2, 1, "lines")
        s = round_robin(fam)
        assert isinstance(s, Schedule)
        with pytest.raises(Exception):
            s.rule = "other"
