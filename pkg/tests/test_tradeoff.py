"""Worst-case capacity DP against brute force, and the gamma optimizer."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collabregen.capacity import (
    AdversaryKind,
    AdversaryProfile,
    GroupPartition,
    InfeasibleError,
    SystemParams,
    mbr_point,
    mincut_single,
    msr_point,
)
from collabregen.tradeoff import (
    SweepConfig,
    _Evaluator,
    default_alpha_grid,
    optimize_gamma,
    supremum_capacity,
    sweep_curve,
    worst_case_capacity,
)


from oracles import oracle_value


def params(k, d, t, B=0, alpha=0, beta=0, beta_prime=0):
    return SystemParams.for_repair_network(
        k=k, d=d, t=t, B=B, alpha=alpha, beta=beta, beta_prime=beta_prime
    )


def selfish(among=0, maxa=0, total=0):
    return AdversaryProfile(AdversaryKind.SELFISH, among, None, maxa, total)


def polluting(among=0, maxa=0, total=0):
    return AdversaryProfile(AdversaryKind.POLLUTING, among, None, maxa, total)


class TestWorstCaseCapacity:
    def test_t_one_forces_single_partition(self):
        p = params(k=5, d=8, t=1, alpha=F(3, 2), beta=F(1, 4))
        value, part, alloc = worst_case_capacity(p)
        assert value == mincut_single(p)
        assert part == GroupPartition.all_ones(5)
        assert alloc is None

    def test_small_case_equals_enumeration(self):
        p = params(k=4, d=5, t=2, alpha=1, beta=F(1, 3), beta_prime=F(1, 6))
        value, part, _ = worst_case_capacity(p)
        assert value == oracle_value(p, None, None) == F(23, 6)
        assert part == GroupPartition.all_ones(4)  # lexicographically smallest

    def test_min_storage_point_meets_object_size(self):
        p = params(k=32, d=48, t=4, B=32)
        value, _, _ = worst_case_capacity(p.with_point(*msr_point(p)))
        assert value == 32

    def test_budget_that_cannot_be_placed(self):
        p = params(k=4, d=6, t=2, alpha=1, beta=1, beta_prime=1)
        with pytest.raises(InfeasibleError):
            worst_case_capacity(p, selfish(0, maxa=1, total=5))

    def test_fixed_group_count(self):
        p = params(k=4, d=5, t=3, alpha=1, beta=F(1, 3), beta_prime=F(1, 6))
        value, part, _ = worst_case_capacity(p, fixed_g=2)
        assert value == oracle_value(p, None, 2)
        assert part.g == 2

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(st.data())
    def test_matches_oracle_randomized(self, data):
        k = data.draw(st.integers(1, 7))
        t = data.draw(st.integers(1, 4))
        d = data.draw(st.integers(k, k + 4))
        p = params(
            k=k,
            d=d,
            t=t,
            alpha=data.draw(st.integers(0, 6)),
            beta=data.draw(st.integers(0, 3)),
            beta_prime=data.draw(st.integers(0, 3)),
        )
        kind = data.draw(st.sampled_from(["none", "selfish", "polluting"]))
        adv = None
        if kind != "none":
            mk = selfish if kind == "selfish" else polluting
            adv = mk(
                among=data.draw(st.integers(0, d // (2 if kind == "polluting" else 1))),
                maxa=data.draw(st.integers(0, 2)),
                total=data.draw(st.integers(0, 4)),
            )
        expected = oracle_value(p, adv, None)
        if expected is None or (adv and adv.total > adv.per_group_max * k):
            feasible_exists = expected is not None
            if not feasible_exists:
                with pytest.raises(InfeasibleError):
                    worst_case_capacity(p, adv)
                return
        value, part, alloc = worst_case_capacity(p, adv)
        assert value == expected
        # the witness must achieve the value under the same term rules
        f = adv.factor if adv else 1
        among = adv.among_live if adv else 0
        walloc = alloc if alloc is not None else (0,) * part.g
        check = F(0)
        prefix = 0
        for u, a in zip(part.groups, walloc):
            bw = max(0, d - f * among - prefix) * p.beta
            bw += max(0, t - f * a - u) * p.beta_prime
            check += u * min(p.alpha, bw)
            prefix += u
        assert check == value


class TestEvaluatorAgreesWithExactSearch:
    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(st.data())
    def test_fast_paths_match_dp(self, data):
        k = data.draw(st.integers(2, 8))
        t = data.draw(st.integers(2, 4))
        d = data.draw(st.integers(k, k + 4))
        mode = data.draw(st.sampled_from(["ones-noadv", "ones-selfish", "ones-polluting", "worst"]))
        fixed_g = k if mode.startswith("ones") else None
        adv = None
        if mode == "ones-selfish":
            adv = selfish(1, maxa=1, total=data.draw(st.integers(0, k)))
        elif mode == "ones-polluting" and t >= 3:
            adv = polluting(min(1, d // 2), maxa=1, total=data.draw(st.integers(0, k)))
        p = params(
            k=k,
            d=d,
            t=t,
            alpha=data.draw(st.integers(0, 5)),
            beta=data.draw(st.fractions(min_value=0, max_value=2, max_denominator=8)),
            beta_prime=data.draw(st.fractions(min_value=0, max_value=2, max_denominator=8)),
        )
        try:
            ev = _Evaluator(p, adv, fixed_g)
        except InfeasibleError:
            with pytest.raises(InfeasibleError):
                worst_case_capacity(p, adv, fixed_g)
            return
        value, _, _ = worst_case_capacity(p, adv, fixed_g)
        assert ev.value(p.alpha, p.beta, p.beta_prime) == value


class TestOptimizer:
    def setup_method(self):
        self.p = params(k=32, d=48, t=4, B=32)

    def test_min_storage_endpoint(self):
        alpha, beta, _ = msr_point(self.p)
        point = optimize_gamma(self.p, None, alpha)
        target = float(self.p.d * beta + (self.p.t - 1) * beta)
        assert abs(point.gamma_norm - target) <= 1e-3 * target

    def test_min_bandwidth_endpoint(self):
        alpha, _, _ = mbr_point(self.p)
        point = optimize_gamma(self.p, None, alpha)
        target = float(alpha)
        assert abs(point.gamma_norm - target) <= 1e-3 * target

    def test_alpha_below_minimum_is_infeasible(self):
        with pytest.raises(InfeasibleError):
            optimize_gamma(self.p, None, F(1, 2))

    def test_point_invariants(self):
        point = optimize_gamma(self.p, None, F(11, 10))
        gamma = self.p.d * point.beta_norm + (self.p.t - 1) * point.beta_prime_norm
        assert abs(point.gamma_norm - gamma) <= 1e-9
        raw = self.p.with_point(
            F(11, 10),
            F(point.beta_norm) * self.p.unit,
            F(point.beta_prime_norm) * self.p.unit,
        )
        value, _, _ = worst_case_capacity(raw)
        assert value >= self.p.B * (1 - F(1, 10**9))

    def test_optimizer_near_exhaustive_small_case(self):
        # Fine bandwidth scan oracle on a small system.
        p = params(k=4, d=5, t=2, B=4)
        alpha = F(13, 10)
        point = optimize_gamma(p, None, alpha)
        best = None
        steps = 160
        for i in range(steps + 1):
            for j in range(steps + 1):
                b = F(i, steps)
                bp = F(j, steps)
                value, _, _ = worst_case_capacity(p.with_point(alpha, b, bp))
                if value >= 4:
                    gamma = 5 * b + bp
                    if best is None or gamma < best:
                        best = gamma
        assert point.gamma_norm <= float(best) * (1 + 2e-3)


class TestSweep:
    def test_gamma_non_increasing_and_dominance(self):
        p4 = params(k=32, d=48, t=4, B=32)
        p8 = params(k=32, d=48, t=8, B=32)
        grid = default_alpha_grid(p4, points=9)
        c4 = sweep_curve(SweepConfig(p4, alpha_grid=grid))
        c8 = sweep_curve(SweepConfig(p8, alpha_grid=grid))
        for row in (c4, c8):
            for a, b in zip(row, row[1:]):
                assert b.gamma_norm <= a.gamma_norm + 1e-12
        for a4, a8 in zip(c4, c8):
            assert a8.gamma_norm <= a4.gamma_norm

    def test_selfish_curve_dominates_baseline(self):
        p = params(k=32, d=48, t=4, B=32)
        grid = default_alpha_grid(p, points=7)
        base = sweep_curve(SweepConfig(p, alpha_grid=grid, fixed_g=32))
        hit = sweep_curve(
            SweepConfig(p, selfish(1, maxa=1, total=16), alpha_grid=grid, fixed_g=32)
        )
        assert len(base) == len(hit) == 7
        for b, h in zip(base, hit):
            assert h.gamma_norm >= b.gamma_norm

    def test_infeasible_grid_points_skipped(self):
        p = params(k=4, d=5, t=2, B=4)
        grid = [F(1, 2), F(1), F(3, 2)]
        pts = sweep_curve(SweepConfig(p, alpha_grid=grid))
        assert len(pts) == 2  # alpha = 1/2 dropped

    def test_supremum_blocks_hopeless_alpha(self):
        p = params(k=4, d=5, t=2, B=4, alpha=F(3, 4))
        assert supremum_capacity(p) == 3
