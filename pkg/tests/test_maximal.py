import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_box_function, random_interval_function
from vexlab.grid import (ExponentField, GridFunction, indicator,
                         make_box, make_interval)
from vexlab.maximal import (apply_operator, fourier_modulus_op, identity_op,
                            maximal_fast, maximal_op, maximal_oracle,
                            maximal_values)
from vexlab.modular import luxemburg_norm


def _assert_same_result(a, b):
    assert np.array_equal(a.mf.values, b.mf.values)
    assert np.array_equal(a.win_start, b.win_start)
    assert np.array_equal(a.win_len, b.win_len)


def _assert_windows_valid(res, f):
    dom = f.domain
    absf = np.abs(f.values)
    for idx in np.argwhere(dom.mask):
        idx = tuple(idx)
        L = int(res.win_len[idx])
        start = [int(res.win_start[(k,) + idx]) for k in range(dom.dim)]
        for k, s in enumerate(start):
            assert s <= idx[k] < s + L  # window contains the cell
        # recompute the window average over the unpadded grid
        total = 0.0
        if dom.dim == 1:
            lo = max(start[0], 0)
            hi = min(start[0] + L, dom.counts[0])
            total = absf[lo:hi].sum()
        else:
            lo0, hi0 = max(start[0], 0), min(start[0] + L, dom.counts[0])
            lo1, hi1 = max(start[1], 0), min(start[1] + L, dom.counts[1])
            total = absf[lo0:hi0, lo1:hi1].sum()
        assert res.mf.values[idx] == pytest.approx(total / L**dom.dim, rel=1e-12)


@pytest.mark.parametrize("c", [3.0, -2.5, 0.0])
def test_constant_function(c):
    dom = make_interval(0.0, 6.0, 1.0)
    res = maximal_fast(GridFunction(dom, np.full(6, c)))
    assert np.allclose(res.mf.values, abs(c), rtol=0, atol=0)


def test_hand_case_0060():
    dom = make_interval(0.0, 4.0, 1.0)
    f = GridFunction(dom, np.array([0.0, 0.0, 6.0, 0.0]))
    o, ff = maximal_oracle(f), maximal_fast(f)
    assert o.mf.values.tolist() == [2.0, 3.0, 6.0, 3.0]
    _assert_same_result(o, ff)
    _assert_windows_valid(o, f)


@pytest.mark.parametrize("k", [9, 27])
def test_indicator_average_attained(k):
    # the whole-box window realizes the k/3 average on the far block
    dom = make_interval(0.0, 3.0, 0.01)
    region = dom.with_mask(dom.center_arrays()[0] <= 1.0)
    res = maximal_fast(indicator(dom, region, k))
    far = dom.center_arrays()[0] >= 2.0
    assert np.all(res.mf.values[far] >= k / 3.0)


def test_oracle_equals_fast_1d_dyadic():
    rng = np.random.default_rng(2024)
    for _ in range(60):
        f = random_interval_function(rng, n_max=96)
        _assert_same_result(maximal_oracle(f), maximal_fast(f))


def test_oracle_equals_fast_2d_dyadic():
    rng = np.random.default_rng(2025)
    for _ in range(12):
        f = random_box_function(rng, n_max=12)
        _assert_same_result(maximal_oracle(f), maximal_fast(f))


def test_oracle_close_to_fast_on_continuous_data():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(2, 64))
        dom = make_interval(0.0, float(n), 1.0)
        f = GridFunction(dom, rng.random(n))
        a, b = maximal_oracle(f), maximal_fast(f)
        assert np.allclose(a.mf.values, b.mf.values, rtol=1e-12)


def test_values_variant_matches_fast():
    rng = np.random.default_rng(8)
    for _ in range(20):
        f = random_interval_function(rng, n_max=64)
        assert np.array_equal(maximal_values(f).values, maximal_fast(f).mf.values)
    for _ in range(5):
        f = random_box_function(rng, n_max=10)
        assert np.array_equal(maximal_values(f).values, maximal_fast(f).mf.values)


def test_windows_audit_random():
    rng = np.random.default_rng(9)
    for _ in range(15):
        f = random_interval_function(rng, n_max=40)
        _assert_windows_valid(maximal_fast(f), f)
    for _ in range(4):
        f = random_box_function(rng, n_max=8)
        _assert_windows_valid(maximal_fast(f), f)


@given(st.integers(0, 100_000))
@settings(max_examples=40, deadline=None)
def test_pointwise_domination(seed):
    rng = np.random.default_rng(seed)
    f = random_interval_function(rng, n_max=48)
    res = maximal_fast(f)
    assert np.all(res.mf.values >= np.abs(f.values) - 0.0)


@given(st.integers(0, 100_000), st.integers(-6, 6))
@settings(max_examples=30, deadline=None)
def test_homogeneity_exact_for_binary_scales(seed, k):
    rng = np.random.default_rng(seed)
    f = random_interval_function(rng, n_max=48)
    c = 2.0**k
    assert np.array_equal(maximal_fast(f.scaled(c)).mf.values,
                          c * maximal_fast(f).mf.values)


@given(st.integers(0, 100_000))
@settings(max_examples=30, deadline=None)
def test_monotone_and_sublinear(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 48))
    dom = make_interval(0.0, float(n), 1.0)
    f = GridFunction(dom, rng.random(n))
    g = GridFunction(dom, f.values + rng.random(n))
    mf, mg = maximal_fast(f).mf.values, maximal_fast(g).mf.values
    assert np.all(mf <= mg * (1 + 1e-12))
    s = GridFunction(dom, f.values + g.values)
    assert np.all(maximal_fast(s).mf.values <= (mf + mg) * (1 + 1e-12))


def test_indicator_matches_continuum_closed_form():
    # discrete value at a cell equals the continuum maximal function of the
    # indicator evaluated at the cell edge farthest from the support
    a, b, h = 3.0, 5.0, 0.25
    dom = make_interval(0.0, 8.0, h)
    xs = dom.center_arrays()[0]
    region = dom.with_mask((xs >= a) & (xs <= b))
    res = maximal_fast(indicator(dom, region, 1.0))
    width = region.measure
    left, right = a, a + width
    for i, x in enumerate(xs):
        if left < x < right:
            want = 1.0
        elif x <= left:
            want = width / (right - (x - h / 2))
        else:
            want = width / ((x + h / 2) - left)
        assert res.mf.values[i] == pytest.approx(want, rel=1e-12)


def test_empirical_lp_operator_constants():
    rng = np.random.default_rng(31)
    dom = make_interval(0.0, 4.0, 1 / 32)
    for pval in (1.5, 2.0, 3.0):
        p = ExponentField.constant(dom, pval)
        worst = 0.0
        for _ in range(100):
            n = dom.counts[0]
            i, j = sorted(rng.choice(n + 1, size=2, replace=False))
            amp = 10.0 ** rng.uniform(-2, 2)
            f = indicator(dom, dom.with_mask((np.arange(n) >= i) & (np.arange(n) < j)), amp)
            ratio = (luxemburg_norm(maximal_values(f), p, dom)
                     / luxemburg_norm(f, p, dom))
            worst = max(worst, ratio)
        print(f"empirical maximal-operator constant p={pval}: {worst:.4f}")
        assert 1.0 <= worst < 50.0


def test_identity_and_maximal_plugins():
    rng = np.random.default_rng(4)
    f = random_interval_function(rng, n_max=32)
    assert apply_operator(identity_op(), f) is f
    assert np.array_equal(apply_operator(maximal_op(), f).values,
                          maximal_fast(f).mf.values)


def test_fourier_impulse_flat_spectrum():
    dom = make_interval(0.0, 8.0, 1.0)
    vals = np.zeros(8)
    vals[3] = 1.0
    out = apply_operator(fourier_modulus_op(), GridFunction(dom, vals))
    assert np.allclose(out.values, 1 / math.sqrt(8), rtol=1e-12)
    assert np.sum(out.values**2) * dom.h == pytest.approx(
        np.sum(vals**2) * dom.h, rel=1e-12)


def test_fourier_matches_direct_dft():
    rng = np.random.default_rng(12)
    n = 16
    dom = make_interval(0.0, float(n), 1.0)
    f = GridFunction(dom, rng.random(n))
    out = apply_operator(fourier_modulus_op(), f)
    k = np.arange(n)
    direct = np.abs(np.exp(-2j * np.pi * np.outer(k, k) / n) @ f.values) / math.sqrt(n)
    assert np.allclose(out.values, direct, rtol=1e-10, atol=1e-12)


def test_fourier_2d_parseval():
    dom = make_box((0.0, 0.0), (4.0, 4.0), 1.0)
    rng = np.random.default_rng(13)
    f = GridFunction(dom, rng.random((4, 4)))
    out = apply_operator(fourier_modulus_op(), f)
    assert np.sum(out.values**2) == pytest.approx(np.sum(f.values**2), rel=1e-12)
