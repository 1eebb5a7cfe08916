"""Shared generators for the test suite.

Dyadic random values (integer multiples of a small power of two) make
every window sum exact in double precision, so the oracle and the
prefix-sum maximal implementations must agree bit for bit; continuous
data is used where only tolerance-level agreement is meaningful.
"""

from __future__ import annotations

import numpy as np

from vexlab.grid import ExponentField, GridFunction, make_box, make_interval


def dyadic_values(rng, shape, scale=64.0, top=1 << 16):
    return rng.integers(0, top, shape).astype(float) / scale


def random_interval_function(rng, n_max=96, masked=True):
    n = int(rng.integers(1, n_max + 1))
    dom = make_interval(0.0, float(n), 1.0)
    if masked:
        mask = rng.random(n) < 0.85
        if not mask.any():
            mask[int(rng.integers(0, n))] = True
        dom = dom.with_mask(mask)
    vals = np.where(dom.mask, dyadic_values(rng, n), 0.0)
    return GridFunction(dom, vals)


def random_box_function(rng, n_max=12):
    nx, ny = (int(v) for v in rng.integers(1, n_max + 1, 2))
    dom = make_box((0.0, 0.0), (float(nx), float(ny)), 1.0)
    vals = dyadic_values(rng, (nx, ny), scale=16.0, top=1 << 8)
    return GridFunction(dom, vals)


def step_exponent(rng, dom, lo=1.0, hi=4.0, pieces=4):
    """Random piecewise-constant exponent field on a 1D grid."""
    n = dom.counts[0]
    cuts = np.sort(rng.choice(n + 1, size=min(pieces, n) + 1, replace=False))
    levels = rng.uniform(lo, hi, len(cuts) - 1)
    vals = np.ones(n)
    for a, b, lev in zip(cuts, cuts[1:], levels):
        vals[a:b] = lev
    return ExponentField(dom, vals)


def ordered_exponent_pair(rng, dom, gap_lo=1.0, gap_hi=2.0):
    """(p, q) with p <= q everywhere and p_sup <= q_inf."""
    s = float(rng.uniform(1.5, 3.0))
    down = step_exponent(rng, dom, lo=0.0, hi=min(s - 1.0, 1.0) + 1.0).values - 1.0
    up = step_exponent(rng, dom, lo=1.0, hi=1.0 + gap_hi - gap_lo).values - 1.0
    p = ExponentField(dom, np.maximum(s - down, 1.0))
    q = ExponentField(dom, s + gap_lo - 1.0 + 1.0 + up)
    return p, q


def violating_exponent_pair(rng, dom):
    """(p, q) with p_sup > q_inf by at least 1 on disjoint cell blocks."""
    n = dom.counts[0]
    p = np.full(n, 2.0)
    q = np.full(n, 3.0)
    i, j = sorted(rng.choice(n, size=2, replace=False))
    p[j] = 3.5  # p_sup = 3.5
    q[i] = 2.0  # q_inf = 2.0
    return ExponentField(dom, p), ExponentField(dom, q)
