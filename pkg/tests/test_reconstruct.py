import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from irrsampling.errors import DomainError
from irrsampling.reconstruct import (
    GridAxis,
    ReconstructionRequest,
    measure_error,
    rect_grid,
    truncated_sum,
)
from irrsampling.sampling_set import JitterSpec, build_nodes
from irrsampling.signals import QuadratureSpec, TensorSignal, make_signal

QUAD = QuadratureSpec(R=2.0**10, nodes_per_unit=32)
SINC = make_signal("sinc_power", "1")


class TestGrid:
    def test_axis_values(self):
        np.testing.assert_allclose(GridAxis(-1, 1, 0.5).values(), [-1, -0.5, 0, 0.5, 1])
        assert GridAxis(0, 0, 1).values().tolist() == [0.0]
        assert len(GridAxis(-1, 1, 0.01).values()) == 201

    def test_parse(self):
        assert GridAxis.parse("-2:3:0.25") == GridAxis(-2.0, 3.0, 0.25)
        with pytest.raises(DomainError):
            GridAxis.parse("1:2")
        with pytest.raises(DomainError):
            GridAxis.parse("2:1:0.1")
        with pytest.raises(DomainError):
            GridAxis.parse("0:1:0")

    def test_rect_grid_lexicographic(self):
        g = rect_grid([GridAxis(0, 1, 1), GridAxis(5, 6, 1)])
        assert g.tolist() == [[0, 5], [0, 6], [1, 5], [1, 6]]


class TestTruncatedSum:
    def test_sinc_half(self):
        assert truncated_sum(SINC, [0.5], [16], JitterSpec.zero()) == pytest.approx(2 / math.pi, rel=1e-14)

    def test_zero_signal(self):
        z = make_signal("shifted_sinc_combo", "0,0.3")
        for x in (-3.3, 0.0, 0.5, 17.25):
            assert truncated_sum(z, [x], [8], JitterSpec((0.1,), "alternating")) == 0.0

    @settings(max_examples=25, deadline=None)
    @given(x=st.floats(-10, 10), M=st.floats(0, 0.12), seed=st.integers(0, 10**6),
           kind=st.sampled_from(["constant", "alternating", "uniform"]))
    def test_interpolates_at_nodes(self, x, M, seed, kind):
        jitter = JitterSpec((M,), kind, seed)
        f = make_signal("shifted_sinc_combo", "1,0.3,-2,1.7")
        ns = build_nodes([x], [4], jitter)
        for m, tm in zip(ns.axis_indices(0), ns.axis_nodes(0)):
            # the window rebuilt around t_m still contains m, with the same jitter
            assert truncated_sum(f, [tm], [4], jitter) == f(tm)

    @settings(max_examples=25, deadline=None)
    @given(x=st.floats(-5, 5), a=st.floats(-3, 3), b=st.floats(-3, 3))
    def test_linearity(self, x, a, b):
        jitter = JitterSpec((0.1,), "uniform", 11)
        f = make_signal("sinc_power", "2")
        h = make_signal("shifted_sinc_combo", [a, 0.0, b, 0.4])
        y0 = truncated_sum(make_signal("shifted_sinc_combo", "1,0"), [x], [6], jitter)
        y1 = truncated_sum(make_signal("shifted_sinc_combo", "1,0.4"), [x], [6], jitter)
        yh = truncated_sum(h, [x], [6], jitter)
        assert yh == pytest.approx(a * y0 + b * y1, rel=1e-12, abs=1e-12)
        yf = truncated_sum(f, [x], [6], jitter)
        # scaling a single signal
        f3 = make_signal("sinc_power", "2,0.5,3")
        assert truncated_sum(f3, [x], [6], jitter) == pytest.approx(3 * yf, rel=1e-12, abs=1e-15)

    def test_two_dimensional_tensor_factorizes(self):
        # zero jitter: Y factorizes over axes for tensor signals
        f1, f2 = make_signal("sinc_power", "2"), make_signal("sinc_power", "3")
        t = TensorSignal((f1, f2))
        x = (0.3, -0.45)
        y2 = truncated_sum(t, x, (5, 4), JitterSpec.zero(2))
        y1 = truncated_sum(f1, [x[0]], [5], JitterSpec.zero()) * truncated_sum(f2, [x[1]], [4], JitterSpec.zero())
        assert y2 == pytest.approx(y1, rel=1e-13)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            truncated_sum(SINC, [0.1, 0.2], [3, 3], JitterSpec.zero(2))


@pytest.mark.parametrize("params", ["2", "3", "2,0.25,1.5"])
@pytest.mark.parametrize("x", [0.37, -2.5, 11.9])
def test_zero_jitter_residual_matches_tail(params, x):
    f = make_signal("sinc_power", params)
    N = 16
    resid = f(x) - truncated_sum(f, [x], [N], JitterSpec.zero())
    assert resid == pytest.approx(oracles.zero_jitter_tail(f, x, N), abs=1e-10)


class TestMeasureError:
    def test_sinc_certified(self):
        req = ReconstructionRequest.on_grid(SINC, (16,), JitterSpec.zero(), [GridAxis(-1, 1, 0.01)],
                                            quadrature=QUAD)
        rep = measure_error(req)
        assert rep.certified
        assert 0 <= rep.sup_error <= rep.certified_bound
        assert rep.tightness <= 1 and not rep.violated
        assert rep.summary()["n_points"] == 201

    def test_integer_grid_is_exact(self):
        req = ReconstructionRequest.on_grid(SINC, (8,), JitterSpec.zero(), [GridAxis(-5, 5, 1)], quadrature=QUAD)
        rep = measure_error(req)
        assert rep.sup_error == 0.0
        assert rep.argmax == (-5.0,)  # all tied: lexicographically smallest

    def test_doubling_N(self):
        f = make_signal("shifted_sinc_combo", "1,0.5,-0.7,2.25")
        jitter = JitterSpec((0.05,), "alternating")
        reps = [measure_error(ReconstructionRequest.on_grid(f, (N,), jitter, [GridAxis(-1, 1, 0.02)],
                                                             quadrature=QUAD)) for N in (8, 16, 32)]
        for a, b in zip(reps, reps[1:]):
            assert b.sup_error <= a.sup_error * (1 + 1e-9)
            assert b.certified_bound < a.certified_bound

    def test_inadmissible_jitter_is_uncertified(self):
        req = ReconstructionRequest.on_grid(SINC, (8,), JitterSpec((0.2,), "constant"),
                                            [GridAxis(0, 1, 0.25)], quadrature=QUAD)
        rep = measure_error(req)
        assert not rep.certified and rep.reason and rep.certified_bound is None
        assert rep.tightness is None and not rep.violated
        assert rep.sup_error >= 0

    def test_q1_is_uncertified(self):
        f = make_signal("sinc_power", "2")
        req = ReconstructionRequest.on_grid(f, (8,), JitterSpec.zero(), [GridAxis(0, 1, 0.5)], q=1,
                                            quadrature=QUAD)
        rep = measure_error(req)
        assert not rep.certified and "q" in rep.reason

    def test_certify_off(self):
        req = ReconstructionRequest.on_grid(SINC, (4,), JitterSpec.zero(), [GridAxis(0, 1, 0.5)], certify=False)
        rep = measure_error(req)
        assert not rep.certified and rep.bound is None

    def test_two_dimensional(self):
        f = TensorSignal((make_signal("sinc_power", "2"), make_signal("shifted_sinc_combo", "1,0.5")))
        req = ReconstructionRequest.on_grid(f, (4, 4), JitterSpec((0.05, 0.02), "uniform", 3),
                                            [GridAxis(0, 1, 0.25)] * 2, quadrature=QUAD)
        rep = measure_error(req)
        assert rep.certified and rep.tightness <= 1
        assert rep.points.shape == (25, 2)

    def test_validation(self):
        with pytest.raises(DomainError):
            ReconstructionRequest(signal=SINC, N=(4,), jitter=JitterSpec.zero(), grid=[[float("nan")]])
        with pytest.raises(DomainError):
            ReconstructionRequest(signal=SINC, N=(4, 4), jitter=JitterSpec.zero(2), grid=np.zeros((1, 2)))
