import math

import pytest

from bombsquad.core import Instance, KnowledgeConfig, RobotSpec, UncoveredCaseError, check_outcome
from bombsquad.offline import offline_optimal_time
from bombsquad.strategies import A_STAR, ZigzagStrategy, closed_form_time, run

SQRT2 = math.sqrt(2)


def inst_of(D, r0, r1, axis="none", boundary="visible"):
    return Instance(D, (RobotSpec(*r0), RobotSpec(*r1)), KnowledgeConfig(axis, boundary))


def both(inst, alg, params=None):
    """Simulated and closed-form times, checked against each other."""
    out = run(inst, alg, params)
    assert check_outcome(out, inst) == []
    cf = closed_form_time(inst, alg, params)
    assert out.delivery_time == pytest.approx(cf, rel=1e-9)
    return out.delivery_time


class TestZigzagStrategy:
    def test_geometric(self):
        X = ZigzagStrategy.geometric(2.0)
        assert [X.turning_distance(k) for k in (1, 2, 3, 4)] == [1, 2, 4, 8]

    def test_explicit_ends(self):
        X = ZigzagStrategy.of([1, 2, 3])
        assert list(X) == [1, 2, 3]
        assert X.turning_distance(4) is None

    @pytest.mark.parametrize("xs", [[1, 1], [2, 1], [0, 1], []])
    def test_explicit_must_increase(self, xs):
        with pytest.raises(ValueError):
            ZigzagStrategy.of(xs)

    def test_geometric_needs_a_above_one(self):
        with pytest.raises(ValueError):
            ZigzagStrategy.geometric(1.0)


class TestOneAxis:
    def test_worst_instance(self):
        inst = inst_of(1.0, ((0, 0), SQRT2 - 1), ((-SQRT2, 0), 1.0), axis="one")
        t = both(inst, "one-axis")
        assert t == pytest.approx(1 + SQRT2, abs=1e-12)
        assert t / offline_optimal_time(inst) == pytest.approx((5 + 4 * SQRT2) / 7, abs=1e-12)

    def test_catch_at_boundary(self):
        inst = inst_of(1.0, ((0, 0), 0.5), ((-1, 0), 1.0), axis="one")
        t = both(inst, "one-axis")
        assert t == pytest.approx(2.0)
        assert offline_optimal_time(inst) == pytest.approx(4 / 3)

    def test_fast_at_source(self):
        inst = inst_of(1.0, ((0, 3), 0.5), ((0, 0), 1.0), axis="one")
        assert both(inst, "one-axis") == pytest.approx(offline_optimal_time(inst))

    def test_head_on_takeover(self):
        inst = inst_of(1.0, ((0, 0), 0.25), ((3, 0), 1.0), axis="one")
        # slow carries from t=0; fast meets it at t=2.4 (x=0.6) and finishes at 2.8
        assert both(inst, "one-axis") == pytest.approx(2.8)


class TestVisibleWait:
    def test_fast_arrives_inside_window(self):
        inst = inst_of(1.0, ((0, 0), 1.0), ((1, 0), 2.0))
        t = both(inst, "visible-wait")
        assert t == pytest.approx(1.0)
        assert t / offline_optimal_time(inst) == pytest.approx(1.5)

    def test_waiter_times_out(self):
        inst = inst_of(1.0, ((0, 0), 1.0), ((10, 0), 0.1))
        t = both(inst, "visible-wait")
        assert t == pytest.approx(2.0)
        assert t / offline_optimal_time(inst) == pytest.approx(2.0)

    def test_both_at_source(self):
        inst = inst_of(1.0, ((0, 0), 0.3), ((0, 0), 1.0))
        assert both(inst, "visible-wait") / offline_optimal_time(inst) == pytest.approx(1.0)


class TestDiscoverable:
    def test_family(self):
        eps = 1e-6
        inst = inst_of(1.0, ((0, 0), 2 / (3 - 2 * eps)), ((-(1 - eps), 0), 1.0), boundary="discoverable")
        ratio = both(inst, "discoverable") / offline_optimal_time(inst)
        assert ratio == pytest.approx(3 + (9 - 18 * eps) / (12 - 10 * eps + 4 * eps * eps), abs=1e-9)

    def test_fast_at_source_alone(self):
        inst = inst_of(1.0, ((0, -1e6), 1e-6), ((0, 0), 1.0), boundary="discoverable")
        assert both(inst, "discoverable") / offline_optimal_time(inst) == pytest.approx(3.0, abs=1e-9)

    def test_slow_starts_outside(self):
        inst = inst_of(1.0, ((0, -2), 1.0), ((0, -1e6), 1e-6), boundary="discoverable")
        t = both(inst, "discoverable")
        assert t == pytest.approx(4.0, abs=1e-6)
        assert offline_optimal_time(inst) == pytest.approx(3.0)

    def test_ray_start_is_uncovered(self):
        inst = inst_of(1.0, ((0.5, 0), 1.0), ((0, -3), 1.0), boundary="discoverable")
        with pytest.raises(UncoveredCaseError):
            closed_form_time(inst, "discoverable")
        assert run(inst, "discoverable").delivery_time > 0


class TestInvisibleZigzag:
    def test_single_robot_round_structure(self):
        inst = inst_of(1.5, ((0, 0), 1.0), ((0, -1e9), 1e-12), boundary="invisible")
        t = both(inst, "invisible-zigzag")
        assert t == pytest.approx(5.5)
        assert t / 1.5 == pytest.approx(11 / 3)

    def test_fast_waits_for_return(self):
        inst = inst_of(2.0, ((0, 0), 1.0), ((-25, 0), 10.0), boundary="invisible")
        t = both(inst, "invisible-zigzag")
        assert t == pytest.approx(4.2)
        assert offline_optimal_time(inst) == pytest.approx(2.0)

    def test_both_at_source(self):
        inst = inst_of(3.0, ((0, 0), 0.5), ((0, 0), 1.0), boundary="invisible")
        assert both(inst, "invisible-zigzag") == pytest.approx(3.0)

    def test_custom_expansion_factor(self):
        inst = inst_of(5.0, ((0, 0), 1.0), ((0, -1e9), 1e-12), boundary="invisible")
        # wait 2, rounds to 1, 2, 4, then carry to 5: 2 + 2*(1+2+4) + 5
        assert both(inst, "invisible-zigzag", {"a": 2.0}) == pytest.approx(21.0)


class TestGenericZigzag:
    def test_just_past_a_turning_point(self):
        inst = inst_of(8 + 1e-9, ((0, 0), 1.0), ((0, -5), 1.0), boundary="invisible")
        t = both(inst, "generic-zigzag", {"a": 2.0})
        assert t == pytest.approx(38.0, abs=1e-6)
        assert t / inst.critical_distance == pytest.approx(4.75, abs=1e-6)

    def test_boundary_before_first_turn(self):
        inst = inst_of(1.0, ((0, 0), 1.0), ((0, -5), 1.0), boundary="invisible")
        assert both(inst, "generic-zigzag", {"X": [2.0, 4.0]}) == pytest.approx(1.0)

    def test_divergent_explicit_sequence(self):
        X = ZigzagStrategy.of(range(1, 200))
        ratios = [both(inst_of(D + 1e-6, ((0, 0), 1.0), ((0, -5), 1.0), boundary="invisible"),
                       "generic-zigzag", {"X": X}) / D for D in (4, 16, 64)]
        assert ratios[0] < ratios[1] < ratios[2]

    def test_a_star_value(self):
        assert A_STAR == pytest.approx((3 + math.sqrt(17)) / 4)
