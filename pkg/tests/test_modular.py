import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import step_exponent
from vexlab.grid import (ExponentField, GridError, GridFunction, indicator,
                         make_interval)
from vexlab.modular import luxemburg_norm, modular, unit_ball_check


def _const(dom, c):
    return GridFunction(dom, np.full(dom.counts, float(c)))


def test_modular_of_one_is_the_measure():
    dom = make_interval(0.0, 5.0, 0.5)
    p = step_exponent(np.random.default_rng(0), dom, lo=1.0, hi=7.0)
    assert modular(_const(dom, 1.0), p).value == pytest.approx(5.0, rel=1e-14)


@pytest.mark.parametrize("k", [9, 27, 81])
def test_modular_step_function_square_growth(k):
    dom = make_interval(0.0, 3.0, 0.01)
    p = ExponentField(dom, np.where(dom.center_arrays()[0] >= 2.0, 3.0, 2.0))
    region = dom.with_mask(dom.mask & (dom.center_arrays()[0] <= 1.0))
    f = indicator(dom, region, k)
    assert modular(f, p, dom).value == float(k * k)  # cell-aligned: exact


def test_modular_two_cell_hand_sum():
    dom = make_interval(0.0, 2.0, 1.0)
    f = GridFunction(dom, np.array([1.0, 2.0]))
    p = ExponentField(dom, np.array([1.0, 3.0]))
    assert modular(f, p).value == 9.0


def test_modular_overflow_saturates():
    dom = make_interval(0.0, 2.0, 1.0)
    f = GridFunction(dom, np.array([1e200, 1.0]))
    p = ExponentField(dom, np.array([3.0, 2.0]))
    mv = modular(f, p)
    assert mv.overflow and mv.value == math.inf


def test_modular_grid_mismatch():
    dom_a = make_interval(0.0, 1.0, 0.5)
    dom_b = make_interval(0.0, 1.0, 0.25)
    with pytest.raises(GridError):
        modular(_const(dom_a, 1.0), ExponentField.constant(dom_b, 2.0))


def test_norm_closed_form_50_random_constant_exponent():
    # classical oracle: ||c * indicator(E)|| = c |E|^(1/p)
    rng = np.random.default_rng(123)
    for _ in range(50):
        n = int(rng.integers(2, 64))
        h = float(rng.choice([0.125, 0.5, 1.0]))
        dom = make_interval(0.0, n * h, h)
        i, j = sorted(rng.choice(n + 1, size=2, replace=False))
        region = dom.with_mask((np.arange(n) >= i) & (np.arange(n) < j))
        c = 10.0 ** rng.uniform(-1, 1)
        pval = float(rng.uniform(1.0, 8.0))
        f = indicator(dom, region, c)
        expected = c * region.measure ** (1.0 / pval)
        got = luxemburg_norm(f, ExponentField.constant(dom, pval), dom, rtol=1e-10)
        assert abs(got - expected) / expected <= 1e-9


def test_norm_of_zero():
    dom = make_interval(0.0, 1.0, 0.25)
    assert luxemburg_norm(_const(dom, 0.0), ExponentField.constant(dom, 2.0)) == 0.0


def test_norm_simple_closed_form():
    dom = make_interval(0.0, 2.0, 0.5)
    region = dom.with_mask(dom.center_arrays()[0] <= 1.0)
    f = indicator(dom, region, 2.0)
    got = luxemburg_norm(f, ExponentField.constant(dom, 2.0))
    assert got == pytest.approx(2.0, rel=1e-9)


def test_unit_ball_boundary():
    dom = make_interval(0.0, 1.0, 1.0)
    p = ExponentField.constant(dom, 2.0)
    f = _const(dom, 1.0)  # modular exactly 1
    assert unit_ball_check(f, p, dom) == (True, True)


def test_unit_ball_outside():
    dom = make_interval(0.0, 2.0, 0.5)
    region = dom.with_mask(dom.center_arrays()[0] <= 1.0)
    f = indicator(dom, region, 2.0)
    assert unit_ball_check(f, ExponentField.constant(dom, 2.0), dom) == (False, False)


def test_unit_ball_after_scaling_to_half_modular():
    rng = np.random.default_rng(5)
    dom = make_interval(0.0, 4.0, 0.25)
    p = step_exponent(rng, dom, lo=1.2, hi=5.0)
    f = GridFunction(dom, rng.uniform(0.1, 3.0, dom.counts))
    lo, hi = 1e-8, 1e8  # scale the function so its modular is 0.5
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if modular(f.scaled(mid), p).value > 0.5:
            hi = mid
        else:
            lo = mid
    g = f.scaled(lo)
    assert modular(g, p).value <= 0.5
    assert unit_ball_check(g, p, dom) == (True, True)


@given(st.floats(0.1, 10.0), st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_norm_homogeneity(c, seed):
    rng = np.random.default_rng(seed)
    dom = make_interval(0.0, 3.0, 0.25)
    p = step_exponent(rng, dom, lo=1.0, hi=6.0)
    f = GridFunction(dom, rng.uniform(0.0, 2.0, dom.counts))
    base = luxemburg_norm(f, p, dom)
    assert luxemburg_norm(f.scaled(c), p, dom) == pytest.approx(c * base, rel=1e-8)


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_modular_and_norm_monotone(seed):
    rng = np.random.default_rng(seed)
    dom = make_interval(0.0, 2.0, 0.25)
    p = step_exponent(rng, dom, lo=1.0, hi=5.0)
    g_vals = rng.uniform(0.0, 3.0, dom.counts)
    f_vals = g_vals * rng.uniform(0.0, 1.0, dom.counts)
    f, g = GridFunction(dom, f_vals), GridFunction(dom, g_vals)
    assert modular(f, p).value <= modular(g, p).value
    rtol = 1e-9
    assert luxemburg_norm(f, p, dom, rtol) <= luxemburg_norm(g, p, dom, rtol) * (1 + 2 * rtol)


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_unit_ball_equivalence_and_normalized_modular(seed):
    rng = np.random.default_rng(seed)
    dom = make_interval(0.0, 2.0, 0.125)
    p = step_exponent(rng, dom, lo=1.0, hi=8.0)
    f = GridFunction(dom, rng.uniform(0.0, 2.5, dom.counts))
    if f.max_abs() == 0.0:
        return
    rtol = 1e-9
    rho_ok, norm_ok = unit_ball_check(f, p, dom, rtol=rtol)
    nrm = luxemburg_norm(f, p, dom, rtol=rtol)
    if rho_ok != norm_ok:  # disagreement only inside the bisection band
        assert abs(nrm - 1.0) <= 4 * rtol
    p_plus = float(p.masked_values.max())
    assert modular(f.scaled(1.0 / nrm), p).value <= 1.0 + rtol * p_plus
