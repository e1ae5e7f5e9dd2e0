import math
import random

import numpy as np
import pytest

from bombsquad.analysis import (
    BranchError,
    SearchDomain,
    adversarial_search,
    bound_rows,
    canonical_instance,
    competitive_ratio,
    curve_maximum,
    discoverable_family_formula,
    discoverable_lower_family,
    expansion_objective,
    grid_ratios,
    invisible_lower_bound,
    invisible_lower_objective,
    oneaxis_lower_curve,
    oneaxis_nocoop_curve,
    optimize_expansion_factor,
    ternary_search,
    visible_lower_family,
    zigzag_cr,
)
from bombsquad.core import ConfigurationError
from bombsquad.offline import offline_optimal_time
from bombsquad.strategies import A_STAR, ZigzagStrategy, closed_form_time

SQRT2 = math.sqrt(2)
CR_STAR = (7 + math.sqrt(17)) / 2


class TestCompetitiveRatio:
    def test_one_axis_worst(self):
        inst = canonical_instance("one-axis", 0.0, SQRT2, SQRT2 - 1)
        assert competitive_ratio(inst, "one-axis") == pytest.approx((5 + 4 * SQRT2) / 7, abs=1e-12)

    def test_visible_example(self):
        inst = canonical_instance("visible-wait", 0.0, 0.5, 0.5)  # slow (v=1/2) waits 2 at S; fast arrives at 0.5
        assert competitive_ratio(inst, "visible-wait") == pytest.approx(1.5 / offline_optimal_time(inst))

    def test_offline_is_one(self):
        rng = random.Random(1)
        for _ in range(20):
            inst = canonical_instance("offline", rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0.05, 1))
            assert competitive_ratio(inst, "offline") == pytest.approx(1.0, abs=1e-12)


class TestGridClosedForms:
    @pytest.mark.parametrize("alg", ["offline", "one-axis", "visible-wait", "discoverable", "invisible-zigzag"])
    def test_matches_scalar_closed_form(self, alg):
        rng = np.random.default_rng(4)
        n = 400
        invisible = alg == "invisible-zigzag"
        d1 = rng.uniform(0, 200 if invisible else 5, n)
        d2 = rng.uniform(0, 200 if invisible else 5, n)
        v = rng.uniform(0.05, 1, n)
        D = rng.uniform(1, 180, n) if invisible else np.ones(n)
        d1[:40] = 0.0
        d2[40:60] = 0.0
        v[60:80] = 1.0
        got = grid_ratios(alg, d1, d2, v, D)
        for k in range(n):
            inst = canonical_instance(alg, d1[k], d2[k], v[k], D[k])
            want = closed_form_time(inst, alg) / offline_optimal_time(inst)
            assert got[k] == pytest.approx(want, rel=1e-12), k


class TestSearch:
    def test_small_budget_rejected(self):
        with pytest.raises(ConfigurationError, match="budget"):
            adversarial_search("one-axis", SearchDomain(), budget=10)

    @pytest.mark.parametrize("doc", [{"grid": 5}, {"d1": [3, 1]}, {"v_slow": [0, 1]}, {"v_slow": [0.1, 2]}])
    def test_bad_domain(self, doc):
        with pytest.raises(ConfigurationError):
            SearchDomain.from_dict(doc)

    def test_monotone_trace_and_exact_best(self):
        res = adversarial_search("one-axis", SearchDomain(levels=3))
        ratios = [r for _, _, r in res.refinement_trace]
        assert ratios == sorted(ratios)
        assert res.best_ratio == competitive_ratio(res.best_instance, "one-axis")
        assert res.best_ratio == ratios[-1]

    def test_deterministic_and_job_independent(self):
        dom = SearchDomain(levels=1)
        a = adversarial_search("visible-wait", dom, jobs=1)
        b = adversarial_search("visible-wait", dom, jobs=2)
        assert a.best_ratio == b.best_ratio and a.best_params == b.best_params
        assert a.evaluations == b.evaluations

    def test_budget_truncates_levels(self):
        dom = SearchDomain(levels=4)
        res = adversarial_search("one-axis", dom, budget=25 ** 3 + 10)
        assert len(res.refinement_trace) == 1

    def test_offline_search_is_one(self):
        res = adversarial_search("offline", SearchDomain(levels=0))
        assert res.best_ratio == pytest.approx(1.0, abs=1e-12)


class TestCurves:
    def test_ternary_search(self):
        assert ternary_search(lambda x: (x - 2.5) ** 2, 0, 10, 1e-10) == pytest.approx(2.5, abs=1e-8)
        assert ternary_search(lambda x: -abs(x - 1), 0, 3, 1e-10, maximize=True) == pytest.approx(1, abs=1e-8)

    def test_lower_curve_values(self):
        assert oneaxis_lower_curve(1.67696) == pytest.approx(1.48102, abs=1e-5)
        assert oneaxis_lower_curve(0.0) == pytest.approx(1 / SQRT2, abs=1e-5)

    def test_nocoop_curve_max(self):
        assert oneaxis_nocoop_curve(SQRT2) == pytest.approx((5 + 4 * SQRT2) / 7, abs=1e-12)
        x, y = curve_maximum(oneaxis_nocoop_curve, 0, 10)
        assert x == pytest.approx(SQRT2, abs=1e-6)
        assert y == pytest.approx((5 + 4 * SQRT2) / 7, abs=1e-12)

    def test_negative_x_rejected(self):
        with pytest.raises(ValueError):
            oneaxis_lower_curve(-1.0)


class TestVisibleFamily:
    @pytest.mark.parametrize("t", [0.8, 1.2, 1, 10, 100])
    def test_closed_branch(self, t):
        _, r = visible_lower_family(t)
        assert r == pytest.approx(1 + SQRT2, abs=1e-12)

    def test_epsilon_branch(self):
        eps = 1e-6
        _, r = visible_lower_family(0.5, eps)
        assert r >= (1 + SQRT2) / (1 + SQRT2 * eps) - 1e-9

    def test_forced_closed_branch_below_cut(self):
        with pytest.raises(BranchError):
            visible_lower_family(0.5, branch="closed")

    def test_epsilon_branch_needs_epsilon(self):
        with pytest.raises(BranchError):
            visible_lower_family(0.5)

    def test_adversary_beats_waiting(self):
        inst, _ = visible_lower_family(1.2)
        assert inst.robots[1].distance / inst.robots[1].speed > 1.2


class TestDiscoverableFamily:
    def test_formula(self):
        assert discoverable_family_formula(1e-6) == pytest.approx(3.7499996, abs=1e-6)
        assert discoverable_family_formula(0.05) == pytest.approx(3 + 8.1 / 11.51, abs=1e-12)

    @pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-6])
    def test_simulation_matches_formula(self, eps):
        _, r = discoverable_lower_family(eps)
        assert r == pytest.approx(discoverable_family_formula(eps), abs=1e-9)

    def test_range(self):
        with pytest.raises(ValueError):
            discoverable_lower_family(0.5)


class TestZigzag:
    def test_a_star(self):
        assert zigzag_cr(ZigzagStrategy.geometric(A_STAR), 60) == pytest.approx(CR_STAR, abs=1e-6)

    def test_doubling(self):
        assert zigzag_cr(ZigzagStrategy.geometric(2.0), 60) == pytest.approx(5.0, abs=1e-9)

    def test_linear_diverges(self):
        assert zigzag_cr(ZigzagStrategy.of(range(1, 61)), 60) == math.inf

    def test_expansion_objective(self):
        assert expansion_objective(2.0) == 6.0
        assert expansion_objective(1.0 + 1e-9) > 1e9

    def test_optimize_expansion_factor(self):
        a, cr = optimize_expansion_factor(1.01, 10, 1e-9)
        assert a == pytest.approx((3 + math.sqrt(17)) / 4, abs=1e-6)
        assert cr == pytest.approx(CR_STAR, abs=1e-6)
        with pytest.raises(ValueError):
            optimize_expansion_factor(0.5, 2)

    def test_invisible_lower(self):
        assert invisible_lower_objective(1.0) == 5.0
        assert invisible_lower_objective(1e-9) > 1e9
        alpha, cr = invisible_lower_bound()
        assert alpha == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-9)
        assert cr == pytest.approx(2 + math.sqrt(5), abs=1e-9)


class TestBoundRows:
    def test_all_rows_close(self):
        rows = bound_rows()
        assert len(rows) == 8
        for r in rows:
            assert r.difference < 1e-4, r
            if r.exact is not None:
                assert abs(r.computed - r.exact) < 1e-9, r
