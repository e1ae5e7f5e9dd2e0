"""Property checks shared by the hypothesis suite and the acceptance run."""

import io
import math

from bombsquad.core import EventKind, Instance, Point2, RobotSpec, check_outcome, trajectory_position
from bombsquad.offline import offline_optimal_time
from bombsquad.strategies import run

DISTANCE_SCALE_FREE = ("offline", "one-axis", "visible-wait", "discoverable")


def scale_speeds(inst: Instance, c: float) -> Instance:
    robots = tuple(RobotSpec(r.start, r.speed * c) for r in inst.robots)
    return Instance(inst.critical_distance, robots, inst.knowledge)


def scale_distances(inst: Instance, c: float) -> Instance:
    robots = tuple(RobotSpec(Point2(r.start.x * c, r.start.y * c), r.speed) for r in inst.robots)
    return Instance(inst.critical_distance * c, robots, inst.knowledge)


def ratio(inst, alg, params=None):
    return run(inst, alg, params).delivery_time / offline_optimal_time(inst)


def _close(p, q, scale):
    return math.dist(p, q) <= 1e-7 * max(1.0, scale)


def custody_problems(outcome, inst) -> list:
    """The bomb is held by at most one robot, moves only with its holder, and rests otherwise."""
    problems = []
    bomb = outcome.bomb_trajectory
    robots = outcome.robot_trajectories
    scale = inst.critical_distance + max(r.distance for r in inst.robots)
    holder = None
    since = 0.0
    intervals = []
    for ev in outcome.events:
        if ev.kind is EventKind.BOMB_PICKUP:
            if holder == ev.robot:
                problems.append(f"robot {ev.robot} picked up a bomb it already holds at t={ev.time}")
            if holder is not None:
                other = trajectory_position(robots[holder], ev.time)
                if not _close(other, ev.position, scale):
                    problems.append(f"handoff at t={ev.time} between robots that are apart")
            if not _close(trajectory_position(bomb, ev.time), ev.position, scale):
                problems.append(f"pickup at t={ev.time} away from the bomb")
            intervals.append((since, ev.time, holder))
            holder, since = ev.robot, ev.time
        elif ev.kind is EventKind.BOMB_SET_DOWN:
            if holder != ev.robot:
                problems.append(f"robot {ev.robot} set down a bomb held by {holder} at t={ev.time}")
            intervals.append((since, ev.time, holder))
            holder, since = None, ev.time
        elif ev.kind is EventKind.DELIVERY and holder is None:
            problems.append("delivered without a holder")
    intervals.append((since, outcome.delivery_time, holder))
    times = sorted({bp.time for bp in bomb.breakpoints})
    for a, b, h in intervals:
        samples = [t for t in times if a <= t <= b] + [0.5 * (a + b)]
        rest = trajectory_position(bomb, a)
        for t in samples:
            p = trajectory_position(bomb, t)
            want = rest if h is None else trajectory_position(robots[h], t)
            if not _close(p, want, scale):
                problems.append(f"bomb at {p} at t={t}, expected {want} (holder {h})")
                break
    return problems


def event_log_text(inst, alg, params=None) -> str:
    buf = io.StringIO()
    run(inst, alg, params, event_log=buf)
    return buf.getvalue()


def check_instance(inst, alg, c_speed, c_dist, params=None) -> list:
    """All property checks for one instance; returns a list of failure messages."""
    fails = []
    out = run(inst, alg, params)
    t_opt = offline_optimal_time(inst)
    r = out.delivery_time / t_opt
    if r < 1 - 1e-9:
        fails.append(f"ratio {r} below 1")
    fails += check_outcome(out, inst)
    fails += custody_problems(out, inst)
    if event_log_text(inst, alg, params) != event_log_text(inst, alg, params):
        fails.append("event log differs between reruns")
    r_s = ratio(scale_speeds(inst, c_speed), alg, params)
    if abs(r_s - r) > 1e-9 * r:
        fails.append(f"speed scaling by {c_speed}: ratio {r} -> {r_s}")
    if alg in DISTANCE_SCALE_FREE:
        r_d = ratio(scale_distances(inst, c_dist), alg, params)
        if abs(r_d - r) > 1e-9 * r:
            fails.append(f"distance scaling by {c_dist}: ratio {r} -> {r_d}")
    return fails
