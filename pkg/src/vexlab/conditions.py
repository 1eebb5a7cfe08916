"""Verdict engines for the modular-inequality hypotheses.

Every checker returns a `ConditionReport` with verdict ``holds``,
``fails`` or ``inconclusive`` plus an evidence trail over an expanding
truncation schedule. Convergence and divergence of improper integrals is
only semi-decidable from finite data, so ``inconclusive`` is an honest
first-class outcome; thresholds are fixed and reported, never tuned per
run.

Sublevel characterization of touching at infinity (repo lemma)
--------------------------------------------------------------
Let s = ess sup p = ess inf q over the whole unbounded domain. Then p and
q touch at infinity (every infinite-measure subset E has
``p_sup(E) = s = q_inf(E)``) if and only if for every eps > 0 the sets
``{p <= s - eps}`` and ``{q >= s + eps}`` both have finite measure.

* (<=) If both exceptional sets are finite for every eps, an infinite E
  meets ``{p > s - eps}`` and ``{q < s + eps}`` in infinite measure for
  every eps, forcing ``p_sup(E) >= s`` and ``q_inf(E) <= s``; the reverse
  bounds hold because E is a subset of the domain.
* (=>) If some exceptional set were infinite it would itself be an
  infinite-measure subset violating ``p_sup(E) = s`` (or
  ``q_inf(E) = s``).

Numerically the two exceptional-measure sequences are tracked over the
schedule. A genuinely convergent-from-above exponent (doubly-logarithmic
decay, say) keeps its exceptional sets beyond any feasible horizon, so in
addition to plain stabilization the checker recognizes a monotone-trend
pattern: one side is stable with stable exceptional measures while the
other side's extreme value is still descending (or ascending) steadily
toward it across the whole schedule. Such verdicts are flagged
``trend`` in the report notes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grid import (ExponentField, GridDomain, GridError, GridFunction,
                   ball_restrict, fsum)

__all__ = [
    "EPS_TIE", "DELTA_STAB", "DELTA_GROW", "GAP_TOL",
    "VERDICT_HOLDS", "VERDICT_FAILS", "VERDICT_INCONCLUSIVE",
    "ConditionReport", "TruncationSchedule", "geometric_radii",
    "PreconditionError", "NoAdmissibleKappa",
    "ess_range", "check_finite_measure", "check_touching", "check_lerner",
    "DefectField", "defect_exponent", "defect_integral_estimate",
    "check_embedding", "OmegaCertificate", "construct_omega",
]

EPS_TIE = 1e-12      # tie tolerance for comparisons of sampled exponents
DELTA_STAB = 1e-9    # stabilization threshold for evidence increments
DELTA_GROW = 1e-6    # growth threshold for divergence calls
GAP_TOL = 1e-3       # tolerance for p_sup vs q_inf agreement at the horizon

VERDICT_HOLDS = "holds"
VERDICT_FAILS = "fails"
VERDICT_INCONCLUSIVE = "inconclusive"

_OMEGA_FLOOR = 1e-300  # keeps 0 < omega when lambda**(-r/p) underflows


class PreconditionError(RuntimeError):
    """An operation was called with its stated preconditions violated."""


class NoAdmissibleKappa(RuntimeError):
    """No candidate kappa produced a stabilizing high-exponent set."""

    def __init__(self, tables: dict):
        self.tables = tables
        super().__init__("no admissible kappa: no candidate's high-exponent set "
                         "stabilizes on the schedule")


@dataclass(frozen=True)
class ConditionReport:
    name: str
    verdict: str
    evidence: tuple        # rows of (radius, measured quantity)
    params: dict
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict,
            "evidence": [[float(r), float(v)] for r, v in self.evidence],
            "params": self.params,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class TruncationSchedule:
    """A bounded base grid plus strictly increasing truncation radii.

    Unbounded domains are never materialized; every infinite-measure
    statement is evaluated as a limit over ``domain`` intersected with
    balls of the scheduled radii.
    """

    domain: GridDomain
    radii: tuple

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if len(radii) < 3:
            raise GridError("truncation schedule needs at least 3 radii")
        if any(not (math.isfinite(r) and r > 0) for r in radii):
            raise GridError("radii must be positive and finite")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise GridError("radii must be strictly increasing")
        object.__setattr__(self, "radii", radii)

    def truncation(self, R: float) -> GridDomain:
        return ball_restrict(self.domain, R)

    def truncations(self):
        return [self.truncation(R) for R in self.radii]


def geometric_radii(r0: float, levels: int = 13) -> tuple:
    """Doubling radii r0 * 2**k, k = 0..levels-1."""
    return tuple(r0 * 2.0**k for k in range(levels))


# --------------------------------------------------------------------------
# evidence-series helpers
# --------------------------------------------------------------------------

def _partial_series(dom: GridDomain, setmask: np.ndarray, radii,
                    terms: np.ndarray | None = None) -> tuple:
    """Partial integrals of ``terms`` (default 1) over setmask within B(0, R).

    One stable pass ordered by center radius; each partial is a
    compensated sum of chunk sums, so the series is deterministic and
    non-decreasing for nonnegative terms.
    """
    rad = dom.center_radii()[setmask]
    cell = dom.h**dom.dim
    if terms is None:
        vals = None
    else:
        vals = np.asarray(terms, dtype=float)[setmask]
    order = np.argsort(rad, kind="stable")
    rad_sorted = rad[order]
    bounds = np.searchsorted(rad_sorted, np.asarray(radii, float), side="right")
    out = []
    partials = []
    prev = 0
    for b in bounds:
        if vals is None:
            partials.append(float(b - prev) * cell)
        else:
            partials.append(fsum(vals[order[prev:b]]) * cell)
        prev = int(b)
        out.append(math.fsum(partials))
    return tuple(out)


def _last_changes(seq, m: int = 3):
    diffs = [b - a for a, b in zip(seq, seq[1:])]
    return diffs[-m:] if diffs else []


def _stabilized(seq, delta: float = DELTA_STAB) -> bool:
    if len(seq) < 2:
        return False
    scale = 1.0 + abs(seq[-1])
    return all(abs(d) < delta * scale for d in _last_changes(seq))


def _growing(seq, delta: float = DELTA_GROW) -> bool:
    if len(seq) < 2:
        return False
    return all(d > delta for d in _last_changes(seq))


# --------------------------------------------------------------------------
# extrema and the finite-measure criterion
# --------------------------------------------------------------------------

def ess_range(p: ExponentField, region: GridDomain) -> tuple[float, float]:
    """(min, max) of the exponent samples over the masked cells of a region."""
    if not p.domain.same_grid(region):
        raise GridError("region lives on a different grid")
    vals = p.values[region.mask]
    if vals.size == 0:
        raise GridError("essential range of an empty region")
    return float(vals.min()), float(vals.max())


def check_finite_measure(p: ExponentField, q: ExponentField,
                         dom: GridDomain) -> ConditionReport:
    """On a bounded domain the modular inequality holds iff p_sup <= q_inf."""
    _, p_sup = ess_range(p, dom)
    q_inf, _ = ess_range(q, dom)
    gap = p_sup - q_inf
    verdict = VERDICT_HOLDS if gap <= EPS_TIE else VERDICT_FAILS
    radius = float(np.max(dom.center_radii()[dom.mask]))
    return ConditionReport(
        "finite_measure", verdict, ((radius, gap),),
        {"p_sup": p_sup, "q_inf": q_inf, "eps_tie": EPS_TIE,
         "measure": dom.measure},
    )


def check_lerner(p: ExponentField, dom: GridDomain) -> ConditionReport:
    """With q = p, the plain modular inequality holds iff p is a constant > 1."""
    p_inf, p_sup = ess_range(p, dom)
    constant = (p_sup - p_inf) <= EPS_TIE
    above_one = p_inf > 1.0 + EPS_TIE
    verdict = VERDICT_HOLDS if constant and above_one else VERDICT_FAILS
    radius = float(np.max(dom.center_radii()[dom.mask]))
    return ConditionReport(
        "lerner_constancy", verdict, ((radius, p_sup - p_inf),),
        {"p_inf": p_inf, "p_sup": p_sup, "eps_tie": EPS_TIE},
    )


# --------------------------------------------------------------------------
# touching at infinity
# --------------------------------------------------------------------------

def check_touching(p: ExponentField, q: ExponentField,
                   schedule: TruncationSchedule,
                   eps_grid: Sequence[float] = (0.5, 0.25, 0.125, 0.0625),
                   ) -> ConditionReport:
    """Decide p/q touching at infinity via the sublevel characterization.

    Tracks per-truncation extreme values and the measures of the two
    exceptional sets for each eps. Fails on a stabilized extreme-value gap
    or on an exceptional set growing beyond every bound; holds when the
    gap closes and all exceptional measures stabilize, or in the flagged
    trend pattern (one side stable, the other still converging steadily
    across the whole schedule).
    """
    dom = schedule.domain
    if not (p.domain.same_grid(dom) and q.domain.same_grid(dom)):
        raise GridError("exponents must be sampled on the schedule grid")
    radii = schedule.radii
    p_sup, q_inf = [], []
    for R in radii:
        trunc = schedule.truncation(R)
        if trunc.nactive == 0:
            raise GridError(f"truncation at R={R} is empty")
        p_sup.append(ess_range(p, trunc)[1])
        q_inf.append(ess_range(q, trunc)[0])
    gaps = [qi - ps for ps, qi in zip(p_sup, q_inf)]
    gap_final = gaps[-1]

    p_stable = _stabilized(p_sup)
    q_stable = _stabilized(q_inf)
    if abs(gap_final) <= GAP_TOL:
        s_est = 0.5 * (p_sup[-1] + q_inf[-1])
    elif p_stable:
        s_est = p_sup[-1]
    elif q_stable:
        s_est = q_inf[-1]
    else:
        s_est = p_sup[-1]

    mp, mq = {}, {}
    for eps in eps_grid:
        mp[eps] = _partial_series(dom, dom.mask & (p.values <= s_est - eps), radii)
        mq[eps] = _partial_series(dom, dom.mask & (q.values >= s_est + eps), radii)

    mp_stab = all(_stabilized(mp[e]) for e in eps_grid)
    mq_stab = all(_stabilized(mq[e]) for e in eps_grid)
    any_growing = any(_growing(mp[e]) or _growing(mq[e]) for e in eps_grid)

    # gap stabilized when its last changes are small relative to delta_grow
    gap_scale = DELTA_GROW * (1.0 + abs(gap_final))
    gap_changes = _last_changes(gaps)
    gap_settled = all(abs(d) < gap_scale for d in gap_changes)

    abs_gaps = [abs(g) for g in gaps]
    trending = (
        abs(gap_final) > GAP_TOL
        and all(b < a for a, b in zip(abs_gaps, abs_gaps[1:]))
        and all(abs(d) > gap_scale for d in gap_changes)
        and abs_gaps[-1] <= 0.5 * abs_gaps[0]
    )

    notes = []
    if abs(gap_final) > GAP_TOL and gap_settled:
        verdict = VERDICT_FAILS
        notes.append("extreme values stabilized unequal")
    elif abs(gap_final) <= GAP_TOL and any_growing:
        verdict = VERDICT_FAILS
        notes.append("an exceptional set grows beyond every bound")
    elif abs(gap_final) <= GAP_TOL and mp_stab and mq_stab:
        verdict = VERDICT_HOLDS
    elif trending and ((p_stable and mp_stab) or (q_stable and mq_stab)):
        verdict = VERDICT_HOLDS
        notes.append("trend: one side still converging steadily; exceptional "
                     "measures on the stable side are settled")
    else:
        verdict = VERDICT_INCONCLUSIVE

    return ConditionReport(
        "touching_at_infinity", verdict,
        tuple(zip(radii, gaps)),
        {
            "p_sup": p_sup, "q_inf": q_inf, "s_est": s_est,
            "eps_grid": list(eps_grid),
            "exceptional_low": {str(e): list(mp[e]) for e in eps_grid},
            "exceptional_high": {str(e): list(mq[e]) for e in eps_grid},
            "delta_stab": DELTA_STAB, "delta_grow": DELTA_GROW,
            "gap_tol": GAP_TOL,
        },
        tuple(notes),
    )


# --------------------------------------------------------------------------
# defect exponent and its integral condition
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DefectField:
    """Defect exponent r with 1/r = 1/p - 1/q on the set D = {p < q}."""

    r: GridFunction
    D: GridDomain


def defect_exponent(p: ExponentField, q: ExponentField) -> DefectField:
    if not p.domain.same_grid(q.domain):
        raise GridError("exponents live on different grids")
    diff = q.values - p.values
    dmask = p.domain.mask & (diff > EPS_TIE)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(dmask, p.values * q.values / np.where(dmask, diff, 1.0), 0.0)
    D = p.domain.with_mask(dmask)
    return DefectField(GridFunction(D, r), D)


def defect_integral_estimate(rf: DefectField, lam: float,
                             schedule: TruncationSchedule) -> ConditionReport:
    """Partial integrals of lam**(-r) over D within expanding balls.

    Convergent when the last increments decrease and the final one is
    negligible; divergent when they are non-decreasing and above the
    growth threshold; inconclusive otherwise.
    """
    if not lam > 1.0:
        raise ValueError(f"lambda must exceed 1, got {lam}")
    if not rf.D.same_grid(schedule.domain):
        raise GridError("defect field must live on the schedule grid")
    radii = schedule.radii
    params = {"lambda": lam, "delta_stab": DELTA_STAB, "delta_grow": DELTA_GROW,
              "D_measure": rf.D.measure}
    if rf.D.nactive == 0:
        evid = tuple((R, 0.0) for R in radii)
        return ConditionReport("defect_integral", "convergent", evid,
                               params, ("empty defect set",))
    with np.errstate(under="ignore"):
        terms = np.exp(-rf.r.values * math.log(lam))
    partials = _partial_series(rf.D, rf.D.mask, radii, terms)
    d = _last_changes(partials)
    decreasing = all(b <= a for a, b in zip(d, d[1:]))
    nondecreasing = all(b >= a for a, b in zip(d, d[1:]))
    if decreasing and d[-1] < DELTA_STAB * (1.0 + partials[-1]):
        verdict = "convergent"
    elif nondecreasing and all(x > DELTA_GROW for x in d):
        verdict = "divergent"
    else:
        verdict = VERDICT_INCONCLUSIVE
    return ConditionReport("defect_integral", verdict,
                           tuple(zip(radii, partials)), params)


def check_embedding(p: ExponentField, q: ExponentField,
                    schedule: TruncationSchedule,
                    lambdas: Sequence[float] = (1.5, 2.0, 4.0, 8.0),
                    ) -> ConditionReport:
    """Inclusion of the q-space into the p-space: p <= q a.e. plus a
    convergent defect integral for some lambda."""
    dom = schedule.domain
    pointwise_ok = bool(np.all(p.values[dom.mask] <= q.values[dom.mask] + EPS_TIE))
    rf = defect_exponent(p, q)
    sub = {}
    best = None
    for lam in lambdas:
        rep = defect_integral_estimate(rf, lam, schedule)
        sub[str(lam)] = rep.verdict
        if rep.verdict == "convergent" and best is None:
            best = rep
    if not pointwise_ok:
        verdict = VERDICT_FAILS
        notes = ("p > q on a set of positive measure",)
    elif best is not None:
        verdict = VERDICT_HOLDS
        notes = ()
    elif all(v == "divergent" for v in sub.values()):
        verdict = VERDICT_FAILS
        notes = ("defect integral divergent for every lambda tried",)
    else:
        verdict = VERDICT_INCONCLUSIVE
        notes = ()
    evidence = best.evidence if best is not None else ()
    return ConditionReport(
        "embedding", verdict, evidence,
        {"pointwise_p_le_q": pointwise_ok, "lambda_verdicts": sub,
         "lambdas": list(lambdas)},
        notes,
    )


# --------------------------------------------------------------------------
# the certifying weight
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OmegaCertificate:
    """Explicit weight certifying the modular inequality on unbounded domains.

    omega equals lam**(-r/p) off the high-exponent set {q > kappa} and 1 on
    it; the two sup-norm factors must not exceed lam**kappa each.
    """

    omega: GridFunction
    kappa: float
    lam: float
    p_plus: float
    sup_p: float                 # || omega**(-|p_plus - p|) ||_inf over D
    sup_q: float                 # || omega**(-|q - p_plus|) ||_inf over D
    modular_partials: tuple      # partial sums of the p-modular of omega
    e_measure_partials: tuple    # partial measures of {q > kappa}
    D: GridDomain
    notes: tuple = ()

    def verify(self, rel_stab: float = 1e-6) -> dict:
        ov = self.omega.masked_values
        positive = bool(ov.min() > 0.0) if ov.size else True
        at_most_one = bool(ov.max() <= 1.0) if ov.size else True
        # equality sup = lam**kappa is attainable; allow rounding at eps-tie scale
        bound = self.lam**self.kappa * (1.0 + EPS_TIE)
        partials = self.modular_partials
        if len(partials) >= 2:
            stab = (partials[-1] - partials[-2]) <= rel_stab * (1.0 + partials[-1])
        else:
            stab = True
        return {
            "omega_positive": positive,
            "omega_at_most_one": at_most_one,
            "sup_p_bounded": self.sup_p <= bound,
            "sup_q_bounded": self.sup_q <= bound,
            "product_bounded": self.sup_p * self.sup_q <= bound**2,
            "modular_stabilized": bool(stab),
        }


def construct_omega(p: ExponentField, q: ExponentField, lam: float,
                    schedule: TruncationSchedule,
                    touching: ConditionReport | None = None) -> OmegaCertificate:
    """Build the certifying weight for a lambda with a convergent defect
    integral.

    kappa is chosen from {p_plus + 1, p_plus + 1/2, p_plus + 1/4}, trying
    the canonical margin p_plus + 1 first and the tighter margins after
    it, and taking the first whose set {q > kappa} has stabilizing measure
    on the schedule. (Tighter margins can swallow the whole defect set
    into the trivial omega = 1 branch, so they are fallbacks, not
    defaults.) Raises `NoAdmissibleKappa` when no candidate stabilizes and
    `PreconditionError` when touching fails.
    """
    if not lam > 1.0:
        raise ValueError(f"lambda must exceed 1, got {lam}")
    dom = schedule.domain
    if touching is None:
        touching = check_touching(p, q, schedule)
    if touching.verdict == VERDICT_FAILS:
        raise PreconditionError("touching at infinity fails; no certificate exists")

    _, p_plus = ess_range(p, dom)
    candidates = (p_plus + 1.0, p_plus + 0.5, p_plus + 0.25)
    tables = {}
    kappa = None
    e_partials = None
    for cand in candidates:
        setmask = dom.mask & (q.values > cand + EPS_TIE)
        series = _partial_series(dom, setmask, schedule.radii)
        tables[str(cand)] = list(series)
        if _stabilized(series):
            kappa = cand
            e_partials = series
            break
    if kappa is None:
        raise NoAdmissibleKappa(tables)

    rf = defect_exponent(p, q)
    D = rf.D
    emask = dom.mask & (q.values > kappa + EPS_TIE)
    notes = []
    with np.errstate(under="ignore"):
        decay = np.exp(-(rf.r.values / p.values) * math.log(lam))
    if bool(np.any(D.mask & ~emask & (decay < _OMEGA_FLOOR))):
        notes.append(f"omega clamped at {_OMEGA_FLOOR} where lam**(-r/p) underflows")
    decay = np.maximum(decay, _OMEGA_FLOOR)
    omega_vals = np.where(emask, 1.0, decay)
    omega = GridFunction(D, np.where(D.mask, omega_vals, 0.0))

    if D.nactive:
        ov = omega.values[D.mask]
        with np.errstate(over="ignore"):
            sup_p = float(np.max(ov ** (-np.abs(p_plus - p.values[D.mask]))))
            sup_q = float(np.max(ov ** (-np.abs(q.values[D.mask] - p_plus))))
        terms = ov ** p.values[D.mask]
        full = np.zeros(dom.counts)
        full[D.mask] = terms
        modular_partials = _partial_series(dom, D.mask, schedule.radii, full)
    else:
        sup_p = sup_q = 1.0
        modular_partials = tuple(0.0 for _ in schedule.radii)
        notes.append("empty defect set; certificate is vacuous")

    return OmegaCertificate(
        omega=omega, kappa=kappa, lam=lam, p_plus=p_plus,
        sup_p=sup_p, sup_q=sup_q,
        modular_partials=modular_partials,
        e_measure_partials=tuple(e_partials),
        D=D, notes=tuple(notes),
    )
