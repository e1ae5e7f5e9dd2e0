import dataclasses
import math

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from bombsquad.core import Breakpoint, Instance, KnowledgeConfig, Point2, RobotSpec, Trajectory, normalize_instance
from bombsquad.offline import offline_optimal_time
from bombsquad.strategies import run
from props import check_instance, custody_problems, ratio
from randgen import MODEL, STRATEGIES

SETTINGS = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])

coord = st.floats(-5, 5, allow_nan=False)
speed = st.floats(0.05, 1.0)


@st.composite
def instances(draw, alg):
    axis, boundary = MODEL[alg]
    lo, hi = (1.0, 50.0) if boundary == "invisible" else (0.2, 3.0)
    D = draw(st.floats(lo, hi))
    robots = tuple(RobotSpec(Point2(draw(coord), draw(coord)), draw(speed)) for _ in range(2))
    return Instance(D, robots, KnowledgeConfig(axis, boundary))


@st.composite
def cases(draw):
    alg = draw(st.sampled_from(STRATEGIES))
    return alg, draw(instances(alg))


@SETTINGS
@given(cases(), st.floats(0.1, 10), st.floats(0.1, 10))
def test_all_properties(case, c_speed, c_dist):
    alg, inst = case
    assert check_instance(inst, alg, c_speed, c_dist) == []


@SETTINGS
@given(cases())
def test_speed_normalization(case):
    alg, inst = case
    norm, _ = normalize_instance(inst)
    assert math.isclose(ratio(norm, alg), ratio(inst, alg), rel_tol=1e-9)


@SETTINGS
@given(instances("offline"))
def test_offline_strategy_is_optimal(inst):
    assert math.isclose(run(inst, "offline").delivery_time, offline_optimal_time(inst), rel_tol=1e-12)


def test_custody_checker_flags_teleporting_bomb():
    inst = Instance(1.0, (RobotSpec((0, 0), 1 / 3), RobotSpec((2, 0), 1.0)))
    out = run(inst, "offline")
    assert custody_problems(out, inst) == []
    bps = list(out.bomb_trajectory.breakpoints)
    mid = bps[len(bps) // 2]
    bps[len(bps) // 2] = Breakpoint(mid.time, Point2(mid.position.x, mid.position.y + 0.3))
    bad = dataclasses.replace(out, bomb_trajectory=Trajectory(tuple(bps)))
    assert custody_problems(bad, inst) != []
