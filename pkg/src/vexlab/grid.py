"""Uniform-grid domains and midpoint-sampled functions.

A domain is an axis-aligned uniform grid in one or two dimensions with a
boolean cell mask; a function is its values at cell centers, zero-extended
outside the mask. Every integral in this package is a midpoint Riemann sum
over masked cells, accumulated with `math.fsum` in fixed C order so that
repeated runs produce bit-identical values.

Essential infimum/supremum over a region are the plain min/max of cell
samples: on a grid there are no nontrivial null sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "GridError",
    "GridDomain",
    "GridFunction",
    "ExponentField",
    "make_interval",
    "make_box",
    "tail_restrict",
    "ball_restrict",
    "measure",
    "sample",
    "restrict_mask",
    "indicator",
    "integrate",
    "fsum",
]


class GridError(ValueError):
    """Invalid grid construction, empty region, or mismatched grids."""


def fsum(values) -> float:
    """Compensated sum of an array in C order (deterministic)."""
    a = np.asarray(values, dtype=float)
    return math.fsum(a.ravel(order="C").tolist())


def _check_finite(name: str, *xs: float) -> None:
    for x in xs:
        if not math.isfinite(x):
            raise GridError(f"{name} must be finite, got {x!r}")


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Uniform grid with a cell mask.

    Cell ``i`` along an axis spans ``[origin + i*h, origin + (i+1)*h)`` and
    has center ``origin + (i + 1/2)*h``. The measure of the domain is
    ``h**dim`` times the number of masked-in cells.

    Constructors (`make_interval`, `make_box`) always produce a fully
    masked, nonempty domain; restrictions (`tail_restrict`, `restrict_mask`)
    may legitimately return an empty mask, which callers must check before
    taking essential ranges.
    """

    dim: int
    origin: tuple[float, ...]
    h: float
    counts: tuple[int, ...]
    mask: np.ndarray

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise GridError(f"dim must be 1 or 2, got {self.dim}")
        if not (isinstance(self.h, float) and math.isfinite(self.h) and self.h > 0):
            raise GridError(f"cell size must be a positive finite float, got {self.h!r}")
        if len(self.origin) != self.dim or len(self.counts) != self.dim:
            raise GridError("origin/counts length must match dim")
        _check_finite("origin", *self.origin)
        if any((not isinstance(n, int)) or n < 1 for n in self.counts):
            raise GridError(f"counts must be positive integers, got {self.counts!r}")
        mask = np.ascontiguousarray(np.asarray(self.mask, dtype=bool))
        if mask.shape != tuple(self.counts):
            raise GridError(f"mask shape {mask.shape} does not match counts {self.counts}")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @property
    def ncells(self) -> int:
        return int(np.prod(self.counts))

    @property
    def nactive(self) -> int:
        return int(self.mask.sum())

    @property
    def measure(self) -> float:
        return self.h**self.dim * self.nactive

    def axis_centers(self, axis: int) -> np.ndarray:
        return self.origin[axis] + (np.arange(self.counts[axis]) + 0.5) * self.h

    def center_arrays(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of all cell centers, each of shape ``counts``."""
        axes = [self.axis_centers(k) for k in range(self.dim)]
        if self.dim == 1:
            return (axes[0],)
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def center_radii(self) -> np.ndarray:
        cs = self.center_arrays()
        if self.dim == 1:
            return np.abs(cs[0])
        return np.sqrt(cs[0] ** 2 + cs[1] ** 2)

    def same_grid(self, other: "GridDomain") -> bool:
        """True when both domains share dim, origin, cell size and counts."""
        return (
            self.dim == other.dim
            and self.origin == other.origin
            and self.h == other.h
            and self.counts == other.counts
        )

    def with_mask(self, mask: np.ndarray) -> "GridDomain":
        return GridDomain(self.dim, self.origin, self.h, self.counts, mask)

    # -- serialization: exact round-trip text record ------------------------

    def to_record(self) -> str:
        runs = _rle_encode(self.mask.ravel(order="C"))
        fields = [
            f"dim={self.dim}",
            "origin=" + ",".join(repr(x) for x in self.origin),
            f"h={self.h!r}",
            "counts=" + ",".join(str(n) for n in self.counts),
            "mask=" + runs,
        ]
        return ";".join(fields)

    @staticmethod
    def from_record(text: str) -> "GridDomain":
        kv = {}
        for part in text.strip().split(";"):
            key, _, val = part.partition("=")
            kv[key.strip()] = val
        try:
            dim = int(kv["dim"])
            origin = tuple(float(x) for x in kv["origin"].split(","))
            h = float(kv["h"])
            counts = tuple(int(x) for x in kv["counts"].split(","))
            flat = _rle_decode(kv["mask"])
        except (KeyError, ValueError) as exc:
            raise GridError(f"malformed domain record: {exc}") from exc
        mask = flat.reshape(counts)
        return GridDomain(dim, origin, h, counts, mask)


def _rle_encode(flat: np.ndarray) -> str:
    runs = []
    n = len(flat)
    i = 0
    while i < n:
        j = i
        while j < n and flat[j] == flat[i]:
            j += 1
        runs.append(f"{j - i}x{int(flat[i])}")
        i = j
    return ",".join(runs) if runs else "0x0"

def _rle_decode(text: str) -> np.ndarray:
    chunks = []
    for run in text.split(","):
        count, _, val = run.partition("x")
        chunks.append(np.full(int(count), bool(int(val))))
    return np.concatenate(chunks) if chunks else np.zeros(0, bool)


def make_interval(a: float, b: float, h: float) -> GridDomain:
    """1D domain covering [a, b] with all cells masked in.

    The cell count is (b-a)/h rounded to the nearest integer and must be
    at least 1; the grid extent is ``n*h`` starting at ``a``.
    """
    _check_finite("interval bounds", a, b)
    _check_finite("cell size", h)
    if not (a < b and h > 0):
        raise GridError(f"need a < b and h > 0, got a={a}, b={b}, h={h}")
    n = round((b - a) / h)
    if n < 1:
        raise GridError(f"interval [{a}, {b}] with h={h} yields zero cells")
    return GridDomain(1, (float(a),), float(h), (n,), np.ones(n, bool))


def make_box(lo: Sequence[float], hi: Sequence[float], h: float) -> GridDomain:
    """2D analogue of `make_interval`: a fully masked axis-aligned box."""
    if len(lo) != 2 or len(hi) != 2:
        raise GridError("make_box expects 2D corner points")
    _check_finite("box bounds", *lo, *hi)
    _check_finite("cell size", h)
    if h <= 0:
        raise GridError(f"need h > 0, got {h}")
    counts = []
    for a, b in zip(lo, hi):
        if not a < b:
            raise GridError(f"need lo < hi per axis, got {a} >= {b}")
        n = round((b - a) / h)
        if n < 1:
            raise GridError(f"axis [{a}, {b}] with h={h} yields zero cells")
        counts.append(n)
    return GridDomain(
        2, (float(lo[0]), float(lo[1])), float(h), tuple(counts),
        np.ones(tuple(counts), bool),
    )


def tail_restrict(dom: GridDomain, R: float) -> GridDomain:
    """Restrict the mask to cells whose center lies outside the ball of radius R.

    May return an empty mask; callers must check before taking extrema.
    """
    if not (math.isfinite(R) and R >= 0):
        raise GridError(f"radius must be finite and >= 0, got {R!r}")
    return dom.with_mask(dom.mask & (dom.center_radii() > R))


def ball_restrict(dom: GridDomain, R: float) -> GridDomain:
    """Restrict the mask to cells whose center lies inside the closed ball of radius R."""
    if not (math.isfinite(R) and R >= 0):
        raise GridError(f"radius must be finite and >= 0, got {R!r}")
    return dom.with_mask(dom.mask & (dom.center_radii() <= R))


def measure(dom: GridDomain) -> float:
    return dom.measure


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real samples at cell centers of a domain, zero outside the mask.

    ``values`` is stored for the full grid box; entries at masked-out cells
    are forced to 0 (the zero-extension), entries on the mask must be finite.
    """

    domain: GridDomain
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != tuple(self.domain.counts):
            raise GridError(
                f"values shape {vals.shape} does not match grid {self.domain.counts}"
            )
        if not np.all(np.isfinite(vals[self.domain.mask])):
            raise GridError("non-finite sample on a masked-in cell")
        vals = np.where(self.domain.mask, vals, 0.0)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def masked_values(self) -> np.ndarray:
        return self.values[self.domain.mask]

    def value_at(self, index) -> float:
        """Sample at a cell index; 0 for masked-out cells (zero-extension)."""
        return float(self.values[index])

    def scaled(self, c: float) -> "GridFunction":
        return GridFunction(self.domain, self.values * c)

    def max_abs(self) -> float:
        mv = self.masked_values
        return float(np.abs(mv).max()) if mv.size else 0.0


class ExponentField(GridFunction):
    """A grid function constrained to values in [1, inf)."""

    def __post_init__(self):
        super().__post_init__()
        mv = self.values[self.domain.mask]
        if mv.size and mv.min() < 1.0:
            bad = float(mv.min())
            raise GridError(f"exponent sample {bad} < 1")

    @staticmethod
    def constant(dom: GridDomain, value: float) -> "ExponentField":
        return ExponentField(dom, np.full(dom.counts, float(value)))

    @staticmethod
    def from_function(f: GridFunction) -> "ExponentField":
        return ExponentField(f.domain, f.values)


def sample(fn: Callable, dom: GridDomain) -> GridFunction:
    """Evaluate a callable (e.g. a parsed expression) at all cell centers.

    ``fn`` receives one coordinate array per axis and must evaluate
    vectorized; evaluation errors propagate with the offending cell
    coordinate attached by the expression evaluator.
    """
    coords = dom.center_arrays()
    vals = np.broadcast_to(np.asarray(fn(*coords), dtype=float), dom.counts).copy()
    return GridFunction(dom, np.where(dom.mask, vals, 0.0))


def restrict_mask(f: GridFunction, pred: Callable) -> GridDomain:
    """Sub-domain of cells (within the mask) whose sample satisfies ``pred``.

    ``pred`` maps the value array to a boolean array; level and sublevel
    sets are all built this way.
    """
    sel = np.asarray(pred(f.values), dtype=bool)
    sel = np.broadcast_to(sel, f.domain.counts)
    return f.domain.with_mask(f.domain.mask & sel)


def indicator(dom: GridDomain, region: GridDomain, amplitude: float = 1.0) -> GridFunction:
    """Indicator of a sub-region (times an amplitude) as a function on ``dom``."""
    if not dom.same_grid(region):
        raise GridError("indicator region lives on a different grid")
    return GridFunction(dom, np.where(region.mask, float(amplitude), 0.0))


def integrate(values: np.ndarray, dom: GridDomain) -> float:
    """Midpoint Riemann sum of a value array over the masked cells of ``dom``.

    The h**dim factor multiplies the compensated sum once, outside the
    accumulation, so cell-aligned integer data integrates exactly.
    """
    vals = np.asarray(values, dtype=float)
    return fsum(vals[dom.mask]) * dom.h**dom.dim
