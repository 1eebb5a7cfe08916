"""Discrete uncentered Hardy-Littlewood maximal operator.

Windows are contiguous cell ranges (1D) or k-by-k cell blocks (2D aligned
to the grid); the value at a cell is the largest average of |f| over
windows containing it, with f zero-extended outside the mask. Averages
use exact cell counts, so no h-rounding enters.

Two implementations are provided. `maximal_oracle` enumerates every
window and sums it directly; `maximal_fast` answers window sums in O(1)
from prefix sums (1D) or a summed-area table (2D) and reduces with
sliding-window maxima. On data whose window sums are exact in double
precision the two agree bit for bit; both resolve argmax ties to the
smallest window, then the smallest start index (row-major in 2D).

In 1D every window poking outside the grid box is dominated by its
restriction to the box, so enumeration stops at the box. In 2D a square
window cannot be restricted to a square, so windows are enumerated over
the box dilated by one box diameter of zero cells, beyond which averages
only decrease.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .grid import GridDomain, GridError, GridFunction

__all__ = ["MaxOpResult", "Operator", "maximal_oracle", "maximal_fast",
           "maximal_values", "apply_operator", "identity_op", "maximal_op",
           "fourier_modulus_op"]


@dataclass(frozen=True, eq=False)
class MaxOpResult:
    """Maximal function plus the per-cell argmax window for audit.

    ``win_start`` holds the window start cell index per cell (shape
    ``(dim,) + counts``); 2D starts may be negative when the best window
    extends into the zero padding. ``win_len`` is the window side in cells.
    """

    mf: GridFunction
    win_start: np.ndarray
    win_len: np.ndarray


def _finish(dom: GridDomain, best: np.ndarray, starts: np.ndarray,
            lens: np.ndarray) -> MaxOpResult:
    starts = np.ascontiguousarray(starts)
    lens = np.ascontiguousarray(lens)
    starts.setflags(write=False)
    lens.setflags(write=False)
    return MaxOpResult(GridFunction(dom, best), starts, lens)


# --------------------------------------------------------------------------
# 1D
# --------------------------------------------------------------------------

def _oracle_1d(absf: np.ndarray):
    n = absf.shape[0]
    best = np.zeros(n)
    wstart = np.zeros(n, dtype=np.int64)
    wlen = np.ones(n, dtype=np.int64)
    first = True
    for L in range(1, n + 1):
        sums = sliding_window_view(absf, L).sum(axis=-1)  # direct per-window sums
        avgs = sums / L
        if first:
            best[:] = avgs
            wstart[:] = np.arange(n)
            first = False
            continue
        for a in range(n - L + 1):
            seg = best[a : a + L]
            m = avgs[a] > seg
            if m.any():
                seg[m] = avgs[a]
                wstart[a : a + L][m] = a
                wlen[a : a + L][m] = L
    return best, wstart[None, :], wlen


def _windowed_argfirst_max(v: np.ndarray, L: int):
    """Max and first-argmax over every length-L window along the last axis.

    Two-pass block decomposition (suffix maxima within blocks plus prefix
    maxima into the next block), O(M) per call instead of O(M*L); ties
    resolve to the smallest index, matching a left-to-right scan with
    strict improvement.
    """
    M = v.shape[-1]
    nwin = M - L + 1
    pad = (-M) % L
    if pad:
        v = np.concatenate([v, np.full(v.shape[:-1] + (pad,), -np.inf)], axis=-1)
    B = v.reshape(v.shape[:-1] + (-1, L))
    nb = B.shape[-2]
    col = np.arange(L)
    neg = np.full(B.shape[:-1] + (1,), -np.inf)
    # prefix running max, recording the first index attaining it
    pm = np.maximum.accumulate(B, axis=-1)
    prev = np.concatenate([neg, pm[..., :-1]], axis=-1)
    pa = np.maximum.accumulate(np.where(B > prev, col, 0), axis=-1)
    # suffix running max; weak updates in the reversed scan keep the
    # leftmost index of the original orientation
    R = B[..., ::-1]
    smr = np.maximum.accumulate(R, axis=-1)
    prevr = np.concatenate([neg, smr[..., :-1]], axis=-1)
    sar = np.maximum.accumulate(np.where(R >= prevr, col, 0), axis=-1)
    sm = smr[..., ::-1]
    sa = (L - 1) - sar[..., ::-1]
    base = (np.arange(nb) * L).reshape((1,) * (B.ndim - 2) + (nb, 1))
    flat = v.shape[:-1] + (nb * L,)
    sm_flat = sm.reshape(flat)
    sa_flat = (sa + base).reshape(flat)
    pm_flat = pm.reshape(flat)
    pa_flat = (pa + base).reshape(flat)
    t = np.arange(nwin)
    end = t + L - 1
    sval = sm_flat[..., t]
    pval = pm_flat[..., end]
    take_s = sval >= pval  # suffix indices precede prefix indices
    vals = np.where(take_s, sval, pval)
    args = np.where(take_s, sa_flat[..., t], pa_flat[..., end])
    return vals, args


def _windowed_max(v: np.ndarray, L: int) -> np.ndarray:
    """Values-only version of `_windowed_argfirst_max`."""
    M = v.shape[-1]
    nwin = M - L + 1
    pad = (-M) % L
    if pad:
        v = np.concatenate([v, np.full(v.shape[:-1] + (pad,), -np.inf)], axis=-1)
    B = v.reshape(v.shape[:-1] + (-1, L))
    flat = v.shape[:-1] + (B.shape[-2] * L,)
    pm = np.maximum.accumulate(B, axis=-1).reshape(flat)
    sm = np.maximum.accumulate(B[..., ::-1], axis=-1)[..., ::-1].reshape(flat)
    t = np.arange(nwin)
    return np.maximum(sm[..., t], pm[..., t + L - 1])


def _fast_1d(absf: np.ndarray):
    n = absf.shape[0]
    prefix = np.concatenate(([0.0], np.cumsum(absf)))
    best = np.full(n, -np.inf)
    wstart = np.zeros(n, dtype=np.int64)
    wlen = np.zeros(n, dtype=np.int64)
    for L in range(1, n + 1):
        avgs = (prefix[L:] - prefix[:-L]) / L
        pad = np.full(L - 1, -np.inf)
        cand, arg = _windowed_argfirst_max(np.concatenate([pad, avgs, pad]), L)
        starts = arg - (L - 1)
        upd = cand > best
        best[upd] = cand[upd]
        wstart[upd] = starts[upd]
        wlen[upd] = L
    return best, wstart[None, :], wlen


def _values_1d(absf: np.ndarray) -> np.ndarray:
    n = absf.shape[0]
    prefix = np.concatenate(([0.0], np.cumsum(absf)))
    best = np.full(n, -np.inf)
    for L in range(1, n + 1):
        avgs = (prefix[L:] - prefix[:-L]) / L
        pad = np.full(L - 1, -np.inf)
        np.maximum(best, _windowed_max(np.concatenate([pad, avgs, pad]), L),
                   out=best)
    return best


# --------------------------------------------------------------------------
# 2D
# --------------------------------------------------------------------------

def _pad_2d(absf: np.ndarray) -> tuple[np.ndarray, int]:
    P = max(absf.shape)
    return np.pad(absf, P), P


def _oracle_2d(absf: np.ndarray):
    nx, ny = absf.shape
    padded, P = _pad_2d(absf)
    Nx, Ny = padded.shape
    best = np.zeros((nx, ny))
    wa = np.zeros((nx, ny), dtype=np.int64)
    wb = np.zeros((nx, ny), dtype=np.int64)
    wlen = np.zeros((nx, ny), dtype=np.int64)
    first = True
    for k in range(1, min(Nx, Ny) + 1):
        rows = sliding_window_view(padded, k, axis=1).sum(axis=-1)
        blocks = sliding_window_view(rows, k, axis=0).sum(axis=-1)
        avgs = blocks / (k * k)
        if first:
            best[:] = avgs[P : P + nx, P : P + ny]
            wa[:] = np.arange(nx)[:, None]
            wb[:] = np.arange(ny)[None, :]
            wlen[:] = 1
            first = False
            continue
        a_lo, a_hi = max(0, P - k + 1), min(Nx - k, P + nx - 1)
        b_lo, b_hi = max(0, P - k + 1), min(Ny - k, P + ny - 1)
        for a in range(a_lo, a_hi + 1):
            i0, i1 = max(a, P) - P, min(a + k, P + nx) - P
            row_avgs = avgs[a]
            for b in range(b_lo, b_hi + 1):
                v = row_avgs[b]
                j0, j1 = max(b, P) - P, min(b + k, P + ny) - P
                seg = best[i0:i1, j0:j1]
                m = v > seg
                if m.any():
                    seg[m] = v
                    wa[i0:i1, j0:j1][m] = a - P
                    wb[i0:i1, j0:j1][m] = b - P
                    wlen[i0:i1, j0:j1][m] = k
    return best, np.stack([wa, wb]), wlen


def _cover_max(vals: np.ndarray, k: int, axis: int):
    """Per-cell max over the k windows covering it along ``axis``.

    ``vals`` is indexed by window start (length N-k+1 along the axis);
    returns (max over covering windows, start index of the first max),
    both of length N along the axis.
    """
    v = np.moveaxis(vals, axis, -1)
    ext = np.full(v.shape[:-1] + (k - 1,), -np.inf)
    mx, arg = _windowed_argfirst_max(np.concatenate([ext, v, ext], axis=-1), k)
    return np.moveaxis(mx, -1, axis), np.moveaxis(arg - (k - 1), -1, axis)


def _fast_2d(absf: np.ndarray):
    nx, ny = absf.shape
    padded, P = _pad_2d(absf)
    Nx, Ny = padded.shape
    sat = np.zeros((Nx + 1, Ny + 1))
    sat[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
    best = np.full((nx, ny), -np.inf)
    wa = np.zeros((nx, ny), dtype=np.int64)
    wb = np.zeros((nx, ny), dtype=np.int64)
    wlen = np.zeros((nx, ny), dtype=np.int64)
    cols = np.arange(ny)
    for k in range(1, min(Nx, Ny) + 1):
        sums = sat[k:, k:] - sat[:-k, k:] - sat[k:, :-k] + sat[:-k, :-k]
        avgs = sums / (k * k)
        rowmax, bstart = _cover_max(avgs, k, axis=1)      # over window columns
        cellmax, astart = _cover_max(rowmax, k, axis=0)   # over window rows
        cand = cellmax[P : P + nx, P : P + ny]
        a_sel = astart[P : P + nx, P : P + ny]
        b_sel = bstart[a_sel, (P + cols)[None, :]]
        upd = cand > best
        best[upd] = cand[upd]
        wa[upd] = a_sel[upd] - P
        wb[upd] = b_sel[upd] - P
        wlen[upd] = k
    return best, np.stack([wa, wb]), wlen


def _cover_values(vals: np.ndarray, k: int, axis: int) -> np.ndarray:
    v = np.moveaxis(vals, axis, -1)
    ext = np.full(v.shape[:-1] + (k - 1,), -np.inf)
    mx = _windowed_max(np.concatenate([ext, v, ext], axis=-1), k)
    return np.moveaxis(mx, -1, axis)


def _values_2d(absf: np.ndarray) -> np.ndarray:
    nx, ny = absf.shape
    padded, P = _pad_2d(absf)
    Nx, Ny = padded.shape
    sat = np.zeros((Nx + 1, Ny + 1))
    sat[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
    best = np.full((nx, ny), -np.inf)
    for k in range(1, min(Nx, Ny) + 1):
        sums = sat[k:, k:] - sat[:-k, k:] - sat[k:, :-k] + sat[:-k, :-k]
        avgs = sums / (k * k)
        cellmax = _cover_values(_cover_values(avgs, k, 1), k, 0)
        np.maximum(best, cellmax[P : P + nx, P : P + ny], out=best)
    return best


def maximal_values(f: GridFunction) -> GridFunction:
    """Maximal function values without the argmax-window audit trail.

    Identical values to `maximal_fast`; used in bulk experiment loops
    where the windows would be discarded.
    """
    absf = np.abs(f.values)
    best = _values_1d(absf) if f.domain.dim == 1 else _values_2d(absf)
    return GridFunction(f.domain, np.where(f.domain.mask, best, 0.0))


# --------------------------------------------------------------------------
# public entry points
# --------------------------------------------------------------------------

def maximal_oracle(f: GridFunction) -> MaxOpResult:
    """Exhaustive-enumeration maximal operator (reference implementation)."""
    absf = np.abs(f.values)
    if f.domain.dim == 1:
        best, starts, lens = _oracle_1d(absf)
    else:
        best, starts, lens = _oracle_2d(absf)
    return _finish(f.domain, np.where(f.domain.mask, best, 0.0), starts, lens)


def maximal_fast(f: GridFunction) -> MaxOpResult:
    """Prefix-sum/summed-area-table maximal operator; equals the oracle."""
    absf = np.abs(f.values)
    if f.domain.dim == 1:
        best, starts, lens = _fast_1d(absf)
    else:
        best, starts, lens = _fast_2d(absf)
    return _finish(f.domain, np.where(f.domain.mask, best, 0.0), starts, lens)


# --------------------------------------------------------------------------
# operator plug-ins
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Operator:
    """A plug-in operator with the exponent on which it declares boundedness.

    ``bounded_on`` is the single exponent the operator is bounded on, or
    None when it is bounded on every constant exponent in (1, inf).
    """

    name: str
    bounded_on: float | None
    fn: Callable[[GridFunction], GridFunction]


def apply_operator(T: Operator, f: GridFunction) -> GridFunction:
    return T.fn(f)


def identity_op() -> Operator:
    return Operator("identity", None, lambda f: f)


def maximal_op() -> Operator:
    return Operator("maximal", None, maximal_values)


def _fourier_modulus(f: GridFunction) -> GridFunction:
    # unitary normalization: sum |fhat|^2 h = sum |f|^2 h; the modulus lives
    # on the frequency grid, identified with the full grid box
    if f.domain.dim == 1:
        spec = np.fft.fft(f.values, norm="ortho")
    else:
        spec = np.fft.fft2(f.values, norm="ortho")
    full = f.domain.with_mask(np.ones(f.domain.counts, bool))
    return GridFunction(full, np.abs(spec))


def fourier_modulus_op() -> Operator:
    return Operator("fourier_modulus", 2.0, _fourier_modulus)
