"""Worst-case capacity search and storage/bandwidth curve optimization.

``worst_case_capacity`` minimizes the cut bound over every admissible
data-collector partition and, under an adversary, over every placement
of the misbehaving-newcomer budget.  It is a dynamic program over
(prefix sum of group sizes, groups used, remaining budget) and returns a
minimizing witness, with ties broken toward the lexicographically
smallest partition.

``optimize_gamma`` minimizes the repair bandwidth gamma = d*beta +
(t-1)*beta' subject to the worst-case capacity reaching the object size.
The capacity is concave and piecewise linear in (beta, beta'), so the
feasible set is convex and upward closed; a coarse grid with iterated
local refinement converges.  Grid searching runs on floats for speed;
every returned point is re-certified with exact rational arithmetic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from typing import Optional, Sequence

from .capacity import (
    AdversaryKind,
    AdversaryProfile,
    GroupPartition,
    InfeasibleError,
    ParameterError,
    SystemParams,
    _check_among_live,
    as_fraction,
    mbr_point,
    msr_point,
    msr_selfish_bounds,
)

log = logging.getLogger(__name__)

_GRID_POINTS = 21
_MIN_REFINEMENTS = 3
_MAX_REFINEMENTS = 8
_MAX_BOX_EXPANSIONS = 40
_FEASIBILITY_SLACK = Fraction(1, 10**9)

# (beta range, beta_prime range) in raw units
BandwidthBox = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


@dataclass(frozen=True)
class CurvePoint:
    """One trade-off curve sample, normalized by B/k."""

    alpha_norm: float
    beta_norm: float
    beta_prime_norm: float
    gamma_norm: float
    witness_partition: GroupPartition
    witness_allocation: Optional[tuple[int, ...]]


@dataclass
class SweepConfig:
    """A curve sweep: optimize gamma for each storage level in the grid.

    ``characteristic_range`` restricts the bandwidth search to the window
    between the minimum-bandwidth and minimum-storage operating points
    (the adversary-adjusted ones when an adversary is active).  It
    defaults to on for fixed-partition sweeps, where a single cut
    expression would otherwise admit a degenerate all-collaboration
    optimum that every other collector partition forbids."""

    params: SystemParams
    adversary: Optional[AdversaryProfile] = None
    alpha_grid: Optional[Sequence[Fraction]] = None
    fixed_g: Optional[int] = None
    tolerance: float = 1e-4
    characteristic_range: Optional[bool] = None

    def resolved_box(self) -> Optional[BandwidthBox]:
        use = self.characteristic_range
        if use is None:
            use = self.fixed_g is not None
        if not use:
            return None
        return characteristic_bandwidth_box(self.params, self.adversary)


def characteristic_bandwidth_box(
    p: SystemParams, adversary: Optional[AdversaryProfile] = None
) -> BandwidthBox:
    """Bandwidth window between the characteristic operating points.

    The lower corner is the minimum-bandwidth point.  The upper corner is
    the minimum-storage bandwidth: the closed forms for a selfish
    adversary, their factor-2 counterparts for a polluting one (each bad
    equation costs one good equation to offset), and the plain values
    otherwise."""
    _, mbr_beta, mbr_bp = mbr_point(p)
    if adversary is None or adversary.total == 0 and adversary.among_live == 0:
        _, hi_beta, hi_bp = msr_point(p)
    elif adversary.kind is AdversaryKind.SELFISH:
        bounds = msr_selfish_bounds(p, adversary)
        hi_beta, hi_bp = bounds.beta_max, bounds.beta_prime_max
    else:
        d_eff = p.d - 2 * adversary.among_live
        spread = 2 * (adversary.per_group_max or 0)
        denom_hi = d_eff - p.k + p.t - spread
        collab = p.t - spread - 1
        if denom_hi <= 0 or collab <= 0 or d_eff - p.k + p.t <= 0:
            raise InfeasibleError(
                "no characteristic bandwidth window under this pollution level"
            )
        hi_beta = p.unit / denom_hi
        hi_bp = p.unit * (p.t - 1) / ((d_eff - p.k + p.t) * collab)
    if p.t == 1:
        return (mbr_beta, max(hi_beta, mbr_beta)), (Fraction(0), Fraction(0))
    return (mbr_beta, max(hi_beta, mbr_beta)), (mbr_bp, max(hi_bp, mbr_bp))


def _validate_search(
    p: SystemParams, adversary: Optional[AdversaryProfile], fixed_g: Optional[int]
) -> tuple[int, int, int, int]:
    """Returns (factor, among_live, per_group_max, total) for the search."""
    if fixed_g is not None:
        if not (fixed_g >= 1 and fixed_g <= p.k <= fixed_g * p.t):
            raise ParameterError(
                f"fixed group count g={fixed_g} incompatible with k={p.k}, t={p.t}"
            )
    if adversary is None:
        return 1, 0, 0, 0
    if adversary.per_group is not None:
        raise ParameterError(
            "worst-case search allocates the budget itself; pass per_group=None"
        )
    _check_among_live(p, adversary)
    return adversary.factor, adversary.among_live, adversary.per_group_max, adversary.total


def worst_case_capacity(
    p: SystemParams,
    adversary: Optional[AdversaryProfile] = None,
    fixed_g: Optional[int] = None,
) -> tuple[Fraction, GroupPartition, Optional[tuple[int, ...]]]:
    """Minimum cut bound over partitions and adversary allocations.

    Returns (value, witness partition, witness allocation); the
    allocation is None when no adversary is given.  Raises
    InfeasibleError when no admissible partition/allocation exists
    (e.g. the budget cannot be placed under the per-group cap).
    """
    f, among, maxa, total = _validate_search(p, adversary, fixed_g)
    k, t, d = p.k, p.t, p.d
    alpha, beta, beta_prime = p.alpha, p.beta, p.beta_prime

    def term(s: int, u: int, a: int) -> Fraction:
        bw = max(0, d - f * among - s) * beta + max(0, t - f * a - u) * beta_prime
        return u * min(alpha, bw)

    @cache
    def best(s: int, parts: int, r: int) -> Optional[Fraction]:
        if s == k:
            if r == 0 and (fixed_g is None or parts == fixed_g):
                return Fraction(0)
            return None
        if fixed_g is not None and parts >= fixed_g:
            return None
        result: Optional[Fraction] = None
        for u in range(1, min(t, k - s) + 1):
            if fixed_g is not None:
                rem_groups = fixed_g - parts - 1
                rem_k = k - s - u
                if rem_k < rem_groups or rem_k > rem_groups * t:
                    continue
            a_hi = min(maxa, r)
            if adversary is not None and f:
                a_hi = min(a_hi, (t - u) // f)
            for a in range(a_hi + 1):
                sub = best(s + u, parts + 1, r - a)
                if sub is None:
                    continue
                cand = term(s, u, a) + sub
                if result is None or cand < result:
                    result = cand
        return result

    value = best(0, 0, total)
    if value is None:
        raise InfeasibleError("no admissible partition/allocation for this search")

    groups: list[int] = []
    alloc: list[int] = []
    s, parts, r = 0, 0, total
    while s < k:
        target = best(s, parts, r)
        for u in range(1, min(t, k - s) + 1):
            if fixed_g is not None:
                rem_groups = fixed_g - parts - 1
                rem_k = k - s - u
                if rem_k < rem_groups or rem_k > rem_groups * t:
                    continue
            a_hi = min(maxa, r)
            if adversary is not None and f:
                a_hi = min(a_hi, (t - u) // f)
            chosen = None
            for a in range(a_hi + 1):
                sub = best(s + u, parts + 1, r - a)
                if sub is not None and term(s, u, a) + sub == target:
                    chosen = a
                    break
            if chosen is not None:
                groups.append(u)
                alloc.append(chosen)
                s, parts, r = s + u, parts + 1, r - chosen
                break
        else:  # pragma: no cover - reconstruction always succeeds
            raise AssertionError("witness reconstruction failed")
    best.cache_clear()
    witness_alloc = tuple(alloc) if adversary is not None else None
    return value, GroupPartition(tuple(groups)), witness_alloc


class _Evaluator:
    """Capacity value for fixed search structure, fast enough for grids.

    Arithmetic is type-generic: called with floats inside the optimizer
    and with Fractions when exactness is wanted.
    """

    def __init__(
        self,
        p: SystemParams,
        adversary: Optional[AdversaryProfile],
        fixed_g: Optional[int],
    ):
        self.f, self.among, self.maxa, self.total = _validate_search(p, adversary, fixed_g)
        self.k, self.t, self.d = p.k, p.t, p.d
        self.fixed_g = fixed_g
        self.has_adv = adversary is not None and self.total > 0
        if self.has_adv and fixed_g == p.k:
            if self.t - self.f < 1:
                raise InfeasibleError("budget cannot be placed in single-node groups")
            if self.total > p.k * min(self.maxa, (self.t - 1) // self.f):
                raise InfeasibleError("adversary budget exceeds what groups can hold")
        if fixed_g == p.k:
            self._mode = "ones"
        elif not self.has_adv and fixed_g is None:
            self._mode = "partitions"
        else:
            self._mode = "general"

    def value(self, alpha, beta, beta_prime):
        if self._mode == "ones":
            return self._ones(alpha, beta, beta_prime)
        if self._mode == "partitions":
            return self._partitions(alpha, beta, beta_prime)
        return self._general(alpha, beta, beta_prime)

    def _ones(self, alpha, beta, beta_prime):
        d_eff = self.d - self.f * self.among
        full = (self.t - 1) * beta_prime
        values = [
            min(alpha, max(0, d_eff - i) * beta + full) for i in range(self.k)
        ]
        total_v = sum(values)
        if not self.has_adv:
            return total_v
        if self.maxa == 1:
            hit = max(0, self.t - self.f - 1) * beta_prime
            deltas = [
                v - min(alpha, max(0, d_eff - i) * beta + hit)
                for i, v in enumerate(values)
            ]
            deltas.sort()
            return total_v - sum(deltas[-self.total :])
        return self._ones_budget_dp(alpha, beta, beta_prime, d_eff)

    def _ones_budget_dp(self, alpha, beta, beta_prime, d_eff):
        a_cap = min(self.maxa, (self.t - 1) // self.f)
        INF = float("inf")
        value = [INF] * (self.total + 1)
        value[0] = 0
        for i in range(self.k - 1, -1, -1):
            live = max(0, d_eff - i) * beta
            terms = [
                min(alpha, live + max(0, self.t - self.f * a - 1) * beta_prime)
                for a in range(a_cap + 1)
            ]
            nxt = [INF] * (self.total + 1)
            for r in range(self.total + 1):
                best = INF
                for a in range(min(a_cap, r) + 1):
                    prev = value[r - a]
                    if prev is not INF:
                        cand = terms[a] + prev
                        if cand < best:
                            best = cand
                nxt[r] = best
            value = nxt
        if value[self.total] is INF:
            raise InfeasibleError("adversary budget cannot be placed")
        return value[self.total]

    def _partitions(self, alpha, beta, beta_prime):
        k, t = self.k, self.t
        d_eff = self.d - self.f * self.among
        value = [None] * (k + 1)
        value[k] = 0
        for s in range(k - 1, -1, -1):
            live = max(0, d_eff - s) * beta
            best = None
            for u in range(1, min(t, k - s) + 1):
                cand = u * min(alpha, live + (t - u) * beta_prime) + value[s + u]
                if best is None or cand < best:
                    best = cand
            value[s] = best
        return value[0]

    def _general(self, alpha, beta, beta_prime):
        k, t, d = self.k, self.t, self.d
        f, among, maxa, total = self.f, self.among, self.maxa, self.total
        fixed_g = self.fixed_g
        memo: dict[tuple[int, int, int], object] = {}

        def best(s, parts, r):
            if s == k:
                if r == 0 and (fixed_g is None or parts == fixed_g):
                    return 0
                return None
            if fixed_g is not None and parts >= fixed_g:
                return None
            key = (s, parts, r)
            if key in memo:
                return memo[key]
            result = None
            for u in range(1, min(t, k - s) + 1):
                if fixed_g is not None:
                    rem_groups = fixed_g - parts - 1
                    rem_k = k - s - u
                    if rem_k < rem_groups or rem_k > rem_groups * t:
                        continue
                a_hi = min(maxa, r)
                if self.has_adv and f:
                    a_hi = min(a_hi, (t - u) // f)
                live = max(0, d - f * among - s) * beta
                for a in range(a_hi + 1):
                    sub = best(s + u, parts + 1, r - a)
                    if sub is None:
                        continue
                    cand = u * min(alpha, live + max(0, t - f * a - u) * beta_prime) + sub
                    if result is None or cand < result:
                        result = cand
            memo[key] = result
            return result

        out = best(0, 0, total)
        if out is None:
            raise InfeasibleError("no admissible partition/allocation for this search")
        return out


def supremum_capacity(
    p: SystemParams,
    adversary: Optional[AdversaryProfile] = None,
    fixed_g: Optional[int] = None,
) -> Fraction:
    """Worst-case capacity limit as beta, beta' grow without bound.

    Integer bandwidth coefficients mean any positive coefficient saturates a
    term at alpha once beta = beta' = max(alpha, 1)."""
    big = max(p.alpha, Fraction(1))
    value, _, _ = worst_case_capacity(
        p.with_point(p.alpha, big, big), adversary, fixed_g
    )
    return value


def default_alpha_grid(
    p: SystemParams,
    points: int = 64,
    alpha_min: Optional[Fraction] = None,
    alpha_max: Optional[Fraction] = None,
) -> list[Fraction]:
    """Evenly spaced exact storage levels from minimum storage to the
    minimum-bandwidth storage level."""
    if points < 1:
        raise ParameterError("grid needs at least one point")
    lo = as_fraction(alpha_min) if alpha_min is not None else p.unit
    hi = as_fraction(alpha_max) if alpha_max is not None else mbr_point(p)[0]
    if hi < lo:
        raise ParameterError("alpha grid upper end below lower end")
    if points == 1:
        return [lo]
    step = (hi - lo) / (points - 1)
    return [lo + step * i for i in range(points)]


def _grid_search(ev, alpha, B, d, t, bounds, warm=None, tolerance=1e-4):
    """Refined grid minimization of gamma over the feasible region.

    ``bounds`` is ((b_min, b_max), (p_min, p_max)); refinement windows
    are clipped back into it.  Refining stops once the grid spacing
    bounds the gamma error below the requested relative tolerance."""
    feas_floor = B * (1.0 - 1e-12)
    (b_min, b_max), (p_min, p_max) = bounds

    def feasible(b, bp):
        return ev.value(alpha, b, bp) >= feas_floor

    best = None  # (gamma, beta, beta_prime)
    if warm is not None and b_min <= warm[0] <= b_max and p_min <= warm[1] <= p_max:
        if feasible(*warm):
            best = (d * warm[0] + (t - 1) * warm[1], warm[0], warm[1])

    b_lo, b_hi = b_min, b_max
    p_lo, p_hi = p_min, p_max
    pts = _GRID_POINTS
    for round_no in range(_MAX_REFINEMENTS + 1):
        bs = [b_lo + (b_hi - b_lo) * i / (pts - 1) for i in range(pts)]
        if t > 1 and p_hi > p_lo:
            ps = [p_lo + (p_hi - p_lo) * i / (pts - 1) for i in range(pts)]
        elif t > 1 and p_hi > 0:
            ps = [p_hi]
        else:
            ps = [p_lo]
        cands = sorted(
            ((d * b + (t - 1) * bp, b, bp) for b in bs for bp in ps),
            key=lambda c: c[0],
        )
        found = None
        for gamma, b, bp in cands:
            if best is not None and gamma >= best[0]:
                break
            if feasible(b, bp):
                found = (gamma, b, bp)
                break
        if found is None and best is None:
            return None  # window holds nothing feasible
        if found is not None:
            best = found
        sb = (b_hi - b_lo) / (pts - 1)
        sp = (p_hi - p_lo) / (pts - 1) if len(ps) > 1 else 0.0
        err = d * sb + (t - 1) * sp
        if round_no >= _MIN_REFINEMENTS and best[0] > 0 and err <= tolerance * best[0]:
            break
        b_lo = max(b_min, best[1] - 2 * sb)
        b_hi = min(b_max, best[1] + 2 * sb)
        p_lo = max(p_min, best[2] - 2 * sp)
        p_hi = min(p_max, best[2] + 2 * sp)
    return best


def optimize_gamma(
    p: SystemParams,
    adversary: Optional[AdversaryProfile],
    alpha: Fraction,
    fixed_g: Optional[int] = None,
    tolerance: float = 1e-4,
    bandwidth_box: Optional[BandwidthBox] = None,
    _warm: Optional[tuple[float, float]] = None,
) -> CurvePoint:
    """Minimize gamma at fixed storage, subject to worst-case capacity >= B.

    Searches beta, beta' >= 0 by default; ``bandwidth_box`` restricts the
    search window instead.  Raises InfeasibleError when the storage level
    cannot support the object under the search model (exit path, not a
    crash).
    """
    alpha = as_fraction(alpha)
    if alpha < 0:
        raise ParameterError("alpha must be nonnegative")
    base = p.with_point(alpha, 0, 0)
    unit = p.unit
    if p.B > 0 and alpha < unit:
        raise InfeasibleError(f"alpha={float(alpha):.6g} below minimum storage B/k")
    if p.B == 0:
        return CurvePoint(0.0, 0.0, 0.0, 0.0, GroupPartition.all_ones(p.k), None)
    if supremum_capacity(base, adversary, fixed_g) < p.B:
        raise InfeasibleError("capacity cannot reach the object size at this alpha")

    ev = _Evaluator(base, adversary, fixed_g)
    alpha_f, B_f = float(alpha), float(p.B)

    best = None
    if bandwidth_box is not None:
        (lo_b, hi_b), (lo_p, hi_p) = bandwidth_box
        bounds = ((float(lo_b), float(hi_b)), (float(lo_p), float(hi_p)))
        best = _grid_search(
            ev, alpha_f, B_f, p.d, p.t, bounds, warm=_warm, tolerance=tolerance
        )
        if best is None:
            raise InfeasibleError(
                "no feasible bandwidth inside the characteristic window"
            )
    else:
        _, mbr_beta, _ = mbr_point(p)
        _, _, msr_bp = msr_point(p)
        beta_hi = 2.0 * float(mbr_beta)
        bp_hi = 2.0 * float(msr_bp) if p.t > 1 else 0.0
        for _ in range(_MAX_BOX_EXPANSIONS):
            bounds = ((0.0, beta_hi), (0.0, bp_hi))
            best = _grid_search(
                ev, alpha_f, B_f, p.d, p.t, bounds, warm=_warm, tolerance=tolerance
            )
            if best is not None:
                near_edge_b = best[1] > beta_hi * 0.98
                near_edge_p = bp_hi > 0 and best[2] > bp_hi * 0.98
                if not near_edge_b and not near_edge_p:
                    break
            beta_hi *= 2.0
            bp_hi = bp_hi * 2.0 if bp_hi > 0 else 0.0
        if best is None:  # pragma: no cover - supremum check precludes this
            raise InfeasibleError("no feasible bandwidth found")

    # Exact certification; nudge outward if float feasibility was marginal.
    threshold = p.B * (1 - _FEASIBILITY_SLACK)
    b, bp = Fraction(best[1]), Fraction(best[2])
    for _ in range(4):
        point = p.with_point(alpha, b, bp)
        value, wpart, walloc = worst_case_capacity(point, adversary, fixed_g)
        if value >= threshold:
            break
        b *= 1 + Fraction(1, 10**9)
        bp *= 1 + Fraction(1, 10**9)
    else:  # pragma: no cover
        raise InfeasibleError("could not certify a feasible point")

    # Never end up above the warm-start candidate: it was certified at a
    # smaller storage level, so it certifies here without nudging.
    if _warm is not None:
        warm_gamma = p.d * _warm[0] + (p.t - 1) * _warm[1]
        if float(p.d * b + (p.t - 1) * bp) > warm_gamma:
            wb, wbp = Fraction(_warm[0]), Fraction(_warm[1])
            value, wpart2, walloc2 = worst_case_capacity(
                p.with_point(alpha, wb, wbp), adversary, fixed_g
            )
            if value >= threshold:
                b, bp, wpart, walloc = wb, wbp, wpart2, walloc2

    beta_n = float(b / unit)
    bp_n = float(bp / unit)
    return CurvePoint(
        alpha_norm=float(alpha / unit),
        beta_norm=beta_n,
        beta_prime_norm=bp_n,
        gamma_norm=p.d * beta_n + (p.t - 1) * bp_n,
        witness_partition=wpart,
        witness_allocation=walloc,
    )


def sweep_curve(cfg: SweepConfig) -> list[CurvePoint]:
    """One CurvePoint per feasible grid storage level, gamma non-increasing.

    The previous point's bandwidth pair seeds the next optimization: it
    stays feasible as storage grows, which pins down monotonicity.
    Infeasible grid points are skipped with a logged reason.
    """
    grid = (
        list(cfg.alpha_grid)
        if cfg.alpha_grid is not None
        else default_alpha_grid(cfg.params)
    )
    grid = sorted(as_fraction(a) for a in grid)
    box = cfg.resolved_box()
    unit = cfg.params.unit
    out: list[CurvePoint] = []
    warm: Optional[tuple[float, float]] = None
    for alpha in grid:
        try:
            point = optimize_gamma(
                cfg.params,
                cfg.adversary,
                alpha,
                fixed_g=cfg.fixed_g,
                tolerance=cfg.tolerance,
                bandwidth_box=box,
                _warm=warm,
            )
        except InfeasibleError as exc:
            log.info("skipping alpha=%s: %s", float(alpha), exc)
            continue
        out.append(point)
        warm = (point.beta_norm * float(unit), point.beta_prime_norm * float(unit))
    return out
