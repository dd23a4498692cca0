from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irrsampling.errors import ConfigError, DomainError
from irrsampling.sampling_set import (
    JitterSpec,
    WindowSpec,
    admissible,
    axis_window,
    build_nodes,
    nearest_index,
    separation,
    window_index_set,
)


class TestWindowIndexSet:
    def test_offset_center(self):
        # integers in [-1.7, 2.3]
        assert window_index_set([0.3], [2]) == [(-1,), (0,), (1,), (2,)]

    def test_integer_center(self):
        assert window_index_set([0.0], [1]) == [(-1,), (0,), (1,)]

    def test_two_axes_lexicographic(self):
        # axis 1: integers in [-0.7, 1.3]; axis 2: [-1, 1]
        expected = [(0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)]
        assert window_index_set([0.3, 0.0], [1, 1]) == expected

    def test_boundary_is_included(self):
        assert list(axis_window(0.5, 2)) == [-1, 0, 1, 2]
        assert list(axis_window(2.0, 2)) == [0, 1, 2, 3, 4]

    def test_rejects_zero_radius(self):
        with pytest.raises(DomainError):
            axis_window(0.0, 0)

    @given(x=st.floats(-1e4, 1e4), N=st.integers(1, 50))
    def test_cardinality(self, x, N):
        idx = list(axis_window(x, N))
        assert len(idx) in (2 * N, 2 * N + 1)
        xe = Fraction(x)  # exact membership, no rounding in |x - n|
        assert all(abs(xe - n) <= N for n in idx)
        assert abs(xe - (idx[0] - 1)) > N and abs(xe - (idx[-1] + 1)) > N

    def test_window_spec_len(self):
        w = WindowSpec(radii=(2, 3), center=(0.5, 0.0))
        assert len(w) == 4 * 7 == len(w.indices())


class TestNearestIndex:
    @pytest.mark.parametrize("x, expected", [
        (0.49, 0), (0.5, 1), (-0.5, 0), (-0.51, -1), (2.5, 3), (-2.5, -2),
        (0.49999999999999994, 0), (7.0, 7),
    ])
    def test_half_open(self, x, expected):
        assert nearest_index(x) == expected

    @given(st.floats(-1e6, 1e6))
    def test_definition(self, x):
        j = nearest_index(x)
        assert j - 0.5 <= x < j + 0.5


class TestJitter:
    def test_zero_jitter_gives_lattice(self):
        ns = build_nodes([0.37], [5], JitterSpec.zero())
        np.testing.assert_array_equal(ns.axis_nodes(0), ns.axis_indices(0))
        assert ns.node(0, 100) == 100.0

    def test_constant_inside_window_only(self):
        ns = build_nodes([0.2], [2], JitterSpec((0.1,), "constant"))
        for n in range(-1, 3):
            assert ns.node(0, n) == n + 0.1
        for n in (-3, -2, 3, 4, 50):
            assert ns.node(0, n) == float(n)

    def test_alternating(self):
        j = JitterSpec((0.1,), "alternating")
        assert [j.offset(0, n) for n in (-2, -1, 0, 1, 2)] == [0.1, -0.1, 0.1, -0.1, 0.1]

    def test_rejects_large_amplitude(self):
        with pytest.raises(DomainError):
            build_nodes([0.0], [3], JitterSpec((0.6,), "constant"))
        with pytest.raises(DomainError):
            build_nodes([0.0], [3], JitterSpec((0.5,), "constant"))

    def test_rejects_negative_amplitude_and_bad_kind(self):
        with pytest.raises(DomainError):
            JitterSpec((-0.1,))
        with pytest.raises(DomainError):
            JitterSpec((0.1,), "gaussian")

    def test_uniform_reproducible_and_seed_dependent(self):
        a = JitterSpec((0.2, 0.1), "uniform", seed=42)
        b = JitterSpec((0.2, 0.1), "uniform", seed=42)
        c = JitterSpec((0.2, 0.1), "uniform", seed=43)
        idx = np.arange(-50, 51)
        np.testing.assert_array_equal(a.offsets(0, idx), b.offsets(0, idx))
        assert not np.array_equal(a.offsets(0, idx), c.offsets(0, idx))
        assert not np.array_equal(a.offsets(0, idx), a.offsets(1, idx) * 2)

    def test_uniform_frozen_values(self):
        # portability guard: these depend only on BLAKE2b
        j = JitterSpec((0.25,), "uniform", seed=7)
        got = [j.offset(0, n) for n in (-1, 0, 1)]
        again = [JitterSpec((0.25,), "uniform", seed=7).offset(0, n) for n in (-1, 0, 1)]
        assert got == again
        assert all(-0.25 <= h < 0.25 for h in got)

    @settings(max_examples=50)
    @given(M=st.floats(0, 0.49), seed=st.integers(0, 2**64 - 1), kind=st.sampled_from(["constant", "alternating", "uniform"]))
    def test_bound_respected(self, M, seed, kind):
        j = JitterSpec((M,), kind, seed)
        h = j.offsets(0, np.arange(-30, 31))
        assert np.all(np.abs(h) <= M)

    def test_config_round_trip(self):
        j = JitterSpec((0.05, 0.02), "alternating", 99)
        assert JitterSpec.from_config(j.to_config()) == j

    def test_config_broadcast_and_errors(self):
        j = JitterSpec.from_config({"jitter.kind": "constant", "jitter.M": "0.1"}, d=3)
        assert j.M == (0.1, 0.1, 0.1)
        with pytest.raises(ConfigError):
            JitterSpec.from_config({"jitter.M": "0.1,0.2"}, d=3)
        with pytest.raises(ConfigError):
            JitterSpec.from_config({"jitter.seed": "abc"})


class TestSeparation:
    def test_lattice(self):
        ns = build_nodes([0.3, -1.2], [4, 3], JitterSpec.zero(2))
        np.testing.assert_array_equal(separation(ns), [1.0, 1.0])

    def test_alternating(self):
        ns = build_nodes([0.0], [5], JitterSpec((0.1,), "alternating"))
        assert separation(ns)[0] == pytest.approx(0.8, abs=1e-12)

    def test_constant_boundary_gap(self):
        # jittered node b + M next to the unjittered b + 1
        ns = build_nodes([0.0], [5], JitterSpec((0.1,), "constant"))
        assert separation(ns)[0] == pytest.approx(0.9, abs=1e-12)

    @settings(max_examples=60)
    @given(
        x=st.lists(st.floats(-100, 100), min_size=1, max_size=3),
        M=st.floats(0, 0.45),
        seed=st.integers(0, 2**32),
        kind=st.sampled_from(["constant", "alternating", "uniform"]),
    )
    def test_lower_bound(self, x, M, seed, kind):
        d = len(x)
        ns = build_nodes(x, [3] * d, JitterSpec((M,) * d, kind, seed))
        assert np.all(separation(ns) >= 1 - 2 * M - 1e-12)


class TestAdmissible:
    @pytest.mark.parametrize("M, q, d, mode, expected", [
        (0.25, 1, 1, "expansion", True),
        (0.25, 2, 1, "expansion", False),
        (0.05, 2, 2, "convergence", True),
        (0.124, 2, 1, "expansion", True),
        (0.125, 2, 1, "expansion", False),
        (0.25, 1, 1, "convergence", True),
        (0.2, 1, 2, "convergence", False),  # 1/((4*2-1)*1) = 1/7
        (0.1, 1, 2, "convergence", True),
        (0.0, 4, 3, "convergence", True),
    ])
    def test_table(self, M, q, d, mode, expected):
        assert admissible(M, q, d, mode) is expected

    def test_rejects_q_below_one(self):
        with pytest.raises(DomainError):
            admissible(0.1, 0.5)

    @given(M=st.floats(0, 0.5), q=st.floats(1, 10), dM=st.floats(0, 0.2), dq=st.floats(0, 5))
    def test_monotone(self, M, q, dM, dq):
        if admissible(M, q, 1, "expansion"):
            assert admissible(max(0.0, M - dM), max(1.0, q - dq), 1, "expansion")

    @given(M=st.floats(0, 0.5), q=st.floats(1, 10), d=st.integers(1, 4))
    def test_convergence_implies_expansion(self, M, q, d):
        if admissible(M, q, d, "convergence"):
            assert admissible(M, q, d, "expansion")
