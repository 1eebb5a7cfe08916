"""Modular functional and Luxemburg norm.

The modular of f with exponent field p over a region is the midpoint sum
of |f|^p; the Luxemburg norm is the infimum of lambda > 0 with
modular(f/lambda) <= 1, computed by bracketing and bisection on the
monotone map lambda -> modular(f/lambda).

Overflow policy: a per-cell power that exceeds the double range saturates
the whole sum to +inf and sets the overflow flag (the falsifier drives
such blow-ups deliberately).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import ExponentField, GridDomain, GridError, GridFunction, fsum

__all__ = ["ModularValue", "NormConvergenceError", "modular", "luxemburg_norm",
           "unit_ball_check"]

_MAX_BISECTIONS = 200
_MAX_BRACKET_STEPS = 2000


class NormConvergenceError(ArithmeticError):
    """Bisection failed to converge; signals pathological inputs."""


@dataclass(frozen=True)
class ModularValue:
    value: float          # >= 0, +inf on overflow
    measure: float        # measure of the region integrated over
    overflow: bool

    def __float__(self) -> float:
        return self.value


def _require_same_grid(f: GridFunction, p: ExponentField, dom: GridDomain) -> None:
    if not (f.domain.same_grid(p.domain) and f.domain.same_grid(dom)):
        raise GridError("function, exponent and region live on different grids")


def _power_terms(absvals: np.ndarray, pvals: np.ndarray) -> np.ndarray:
    # |f|^p in double precision; overflow becomes +inf and is flagged by the
    # caller, which matches computing the exponent p*log|f| in log space and
    # cutting at the double range
    with np.errstate(over="ignore", invalid="ignore"):
        return np.power(absvals, pvals)


def modular(f: GridFunction, p: ExponentField, dom: GridDomain | None = None) -> ModularValue:
    """Midpoint sum of |f(x)|^p(x) over the masked cells of ``dom``."""
    if dom is None:
        dom = f.domain
    _require_same_grid(f, p, dom)
    terms = _power_terms(np.abs(f.values[dom.mask]), p.values[dom.mask])
    if np.isinf(terms).any():
        return ModularValue(math.inf, dom.measure, True)
    return ModularValue(fsum(terms) * dom.h**dom.dim, dom.measure, False)


def _modular_scaled(absvals: np.ndarray, pvals: np.ndarray, scale: float,
                    cell: float) -> float:
    terms = _power_terms(absvals / scale, pvals)
    if np.isinf(terms).any():
        return math.inf
    return fsum(terms) * cell


def luxemburg_norm(f: GridFunction, p: ExponentField, dom: GridDomain | None = None,
                   rtol: float = 1e-9) -> float:
    """inf{lambda > 0 : modular(f/lambda) <= 1}, to relative width ``rtol``.

    Brackets by doubling/halving from lambda0 = max|f| * measure^(1/p_min),
    then bisects; the upper bracket end is returned, so the result always
    satisfies modular(f/norm) <= 1. Returns 0 for f identically 0.
    """
    if not (0 < rtol <= 1e-2):
        raise ValueError(f"rtol must lie in (0, 1e-2], got {rtol}")
    if dom is None:
        dom = f.domain
    _require_same_grid(f, p, dom)
    absvals = np.abs(f.values[dom.mask])
    pvals = p.values[dom.mask]
    cell = dom.h**dom.dim
    fmax = float(absvals.max()) if absvals.size else 0.0
    if fmax == 0.0:
        return 0.0
    pmin = float(pvals.min())
    lam0 = fmax * dom.measure ** (1.0 / pmin)

    def rho(lam: float) -> float:
        return _modular_scaled(absvals, pvals, lam, cell)

    lo = hi = lam0
    if rho(lam0) <= 1.0:
        for _ in range(_MAX_BRACKET_STEPS):
            lo = lo / 2.0
            if rho(lo) > 1.0:
                break
        else:
            raise NormConvergenceError("no lower bracket found")
    else:
        for _ in range(_MAX_BRACKET_STEPS):
            hi = hi * 2.0
            if rho(hi) <= 1.0:
                break
        else:
            raise NormConvergenceError("no upper bracket found")

    for _ in range(_MAX_BISECTIONS):
        if hi - lo <= rtol * hi:
            return hi
        mid = 0.5 * (lo + hi)
        if rho(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    raise NormConvergenceError(
        f"bisection did not reach rtol={rtol} in {_MAX_BISECTIONS} steps")


def unit_ball_check(f: GridFunction, p: ExponentField,
                    dom: GridDomain | None = None,
                    rtol: float = 1e-9) -> tuple[bool, bool]:
    """(modular(f) <= 1, norm(f) <= 1); the two agree up to bisection tolerance."""
    rho_ok = modular(f, p, dom).value <= 1.0
    norm_ok = luxemburg_norm(f, p, dom, rtol=rtol) <= 1.0
    return rho_ok, norm_ok
