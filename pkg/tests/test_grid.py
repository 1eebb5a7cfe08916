import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vexlab.dsl import parse
from vexlab.grid import (ExponentField, GridDomain, GridError, GridFunction,
                         ball_restrict, indicator, integrate, make_box,
                         make_interval, restrict_mask, sample, tail_restrict)


def test_make_interval_basic():
    dom = make_interval(0.0, 3.0, 0.01)
    assert dom.counts == (300,)
    assert dom.measure == 3.0


def test_make_interval_single_cell_center():
    dom = make_interval(0.0, 1.0, 1.0)
    assert dom.counts == (1,)
    assert dom.axis_centers(0).tolist() == [0.5]


def test_make_interval_quarter_cells():
    dom = make_interval(2.0, 3.0, 0.25)
    assert dom.counts == (4,)
    assert dom.axis_centers(0).tolist() == [2.125, 2.375, 2.625, 2.875]


@pytest.mark.parametrize("args", [
    (0.0, 1.0, float("nan")), (float("inf"), 1.0, 0.1), (1.0, 0.0, 0.1),
    (0.0, 0.4, 1.0),  # rounds to zero cells
])
def test_make_interval_rejects(args):
    with pytest.raises(GridError):
        make_interval(*args)


@pytest.mark.parametrize("lo,hi,h,cells,meas", [
    ((0, 0), (1, 1), 0.5, 4, 1.0),
    ((0, 0), (2, 1), 1.0, 2, 2.0),
    ((0, 0), (1, 1), 0.1, 100, 1.0),
])
def test_make_box(lo, hi, h, cells, meas):
    dom = make_box(lo, hi, h)
    assert dom.nactive == cells
    assert dom.measure == pytest.approx(meas, rel=1e-12)


def test_tail_restrict_examples():
    dom = make_interval(0.0, 10.0, 1.0)
    tail = tail_restrict(dom, 5.0)
    assert tail.axis_centers(0)[tail.mask].tolist() == [5.5, 6.5, 7.5, 8.5, 9.5]
    assert np.array_equal(tail_restrict(dom, 0.0).mask, dom.mask)
    assert tail_restrict(dom, 100.0).nactive == 0


def test_ball_and_tail_partition():
    dom = make_interval(-4.0, 4.0, 0.5)
    ball, tail = ball_restrict(dom, 2.0), tail_restrict(dom, 2.0)
    assert not np.any(ball.mask & tail.mask)
    assert np.array_equal(ball.mask | tail.mask, dom.mask)


@given(st.floats(0, 20), st.floats(0, 20))
@settings(max_examples=40, deadline=None)
def test_tail_measure_monotone(r1, r2):
    dom = make_interval(-8.0, 8.0, 0.5)
    lo, hi = sorted((r1, r2))
    assert tail_restrict(dom, hi).measure <= tail_restrict(dom, lo).measure


def test_sample_sublevel_set():
    # closed form evaluated at centers 0.25 and 0.75: both at most 1.5
    dom = make_interval(0.0, 1.0, 0.5)
    pf = sample(parse("2 - 1/(1 + x^2)"), dom)
    expected = [2 - 1 / (1 + 0.25**2), 2 - 1 / (1 + 0.75**2)]
    assert np.allclose(pf.values, expected, rtol=1e-15)
    sub = restrict_mask(pf, lambda v: v <= 1.5)
    assert sub.nactive == 2


def test_restrict_mask_identity_and_empty():
    dom = make_interval(0.0, 2.0, 0.5)
    f = GridFunction(dom, np.arange(4, dtype=float))
    assert np.array_equal(restrict_mask(f, lambda v: v == v).mask, dom.mask)
    assert restrict_mask(f, lambda v: v < -1).measure == 0.0


def test_equal_exponents_give_empty_difference_set():
    dom = make_interval(0.0, 1.0, 0.25)
    p = sample(parse("2"), dom)
    sub = restrict_mask(p, lambda v: v < p.values - 0)
    assert sub.nactive == 0


def test_zero_extension():
    dom = make_interval(0.0, 4.0, 1.0).with_mask(np.array([1, 0, 1, 0], bool))
    f = GridFunction(dom, np.array([3.0, 99.0, 5.0, 99.0]))
    assert f.value_at(1) == 0.0
    assert f.value_at(3) == 0.0
    assert f.masked_values.tolist() == [3.0, 5.0]


def test_exponent_field_rejects_below_one():
    dom = make_interval(0.0, 1.0, 0.5)
    with pytest.raises(GridError):
        ExponentField(dom, np.array([0.5, 2.0]))


def test_nonfinite_sample_rejected():
    dom = make_interval(0.0, 1.0, 0.5)
    with pytest.raises(GridError):
        GridFunction(dom, np.array([1.0, np.nan]))


def test_indicator_and_integrate():
    dom = make_interval(0.0, 3.0, 0.01)
    region = dom.with_mask(dom.mask & (dom.center_arrays()[0] <= 1.0))
    f = indicator(dom, region, 9.0)
    assert integrate(f.values, dom) == pytest.approx(9.0, rel=1e-14)
    assert integrate(f.values**2, region) == 81.0  # cell-aligned exactness


def test_record_roundtrip_simple():
    dom = tail_restrict(make_interval(-3.0, 7.0, 0.125), 1.0)
    back = GridDomain.from_record(dom.to_record())
    assert back.same_grid(dom)
    assert np.array_equal(back.mask, dom.mask)


@given(st.integers(1, 40), st.floats(-5, 5), st.integers(0, 2**30),
       st.sampled_from([0.1, 0.25, 1.0, 0.013]))
@settings(max_examples=60, deadline=None)
def test_record_roundtrip_random(n, origin, maskbits, h):
    mask = np.array([(maskbits >> i) & 1 for i in range(n)], bool)
    dom = GridDomain(1, (origin,), h, (n,), mask)
    back = GridDomain.from_record(dom.to_record())
    assert back.same_grid(dom) and np.array_equal(back.mask, dom.mask)


def test_record_roundtrip_2d():
    dom = tail_restrict(make_box((-1.0, -1.0), (1.0, 1.0), 0.25), 0.6)
    back = GridDomain.from_record(dom.to_record())
    assert back.same_grid(dom) and np.array_equal(back.mask, dom.mask)


def test_integrate_deterministic():
    rng = np.random.default_rng(3)
    dom = make_interval(0.0, 7.0, 0.01)
    vals = rng.random(700)
    assert integrate(vals, dom) == integrate(vals.copy(), dom)
