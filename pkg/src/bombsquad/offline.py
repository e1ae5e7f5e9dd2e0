"""Optimal offline delivery with full knowledge of both robots."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    AXIS,
    ORIGIN,
    Breakpoint,
    DeliveryOutcome,
    Event,
    EventKind,
    Instance,
    Point2,
    Trajectory,
    norm,
    unit,
)


class OfflineMode(str, enum.Enum):
    FAST_ALONE = "FastAlone"
    SLOW_ALONE = "SlowAlone"
    HANDOFF = "Handoff"


def offline_terms(d_s: float, v_s: float, d_f: float, v_f: float, D: float) -> tuple[float, float, float]:
    """(slow alone, fast alone, handoff) delivery times."""
    return (
        (d_s + D) / v_s,
        (d_f + D) / v_f,
        (D - d_f) / v_f + 2.0 * (d_s + d_f) / (v_s + v_f),
    )


def offline_optimal_time(inst: Instance) -> float:
    s, f = inst.slow, inst.fast
    return min(offline_terms(s.distance, s.speed, f.distance, f.speed, inst.critical_distance))


@dataclass(frozen=True)
class OfflinePlan:
    mode: OfflineMode
    handoff: Optional[tuple[float, Point2]]
    outcome: DeliveryOutcome


def _traj(points) -> Trajectory:
    # Drop repeated times; the later position wins (they coincide in practice).
    out: list[Breakpoint] = []
    for t, p in points:
        if out and t <= out[-1].time:
            out[-1] = Breakpoint(out[-1].time, Point2(*p))
        else:
            out.append(Breakpoint(t, Point2(*p)))
    return Trajectory(tuple(out))


def _alone(inst: Instance, runner: int, mode: OfflineMode) -> OfflinePlan:
    D = inst.critical_distance
    r = inst.robots[runner]
    t_s = r.distance / r.speed
    T = t_s + D / r.speed
    end = Point2(D * AXIS.x, D * AXIS.y)
    trajs = [None, None]
    trajs[runner] = _traj([(0.0, r.start), (t_s, ORIGIN), (T, end)])
    idle = inst.robots[1 - runner]
    trajs[1 - runner] = _traj([(0.0, idle.start), (T, idle.start)])
    bomb = _traj([(0.0, ORIGIN), (t_s, ORIGIN), (T, end)])
    events = (
        Event(t_s, EventKind.ARRIVE_SOURCE, ORIGIN, runner),
        Event(t_s, EventKind.BOMB_PICKUP, ORIGIN, runner),
        Event(T, EventKind.DELIVERY, end, runner),
    )
    return OfflinePlan(mode, None, DeliveryOutcome(T, events, tuple(trajs), bomb))


def _handoff(inst: Instance) -> OfflinePlan:
    D = inst.critical_distance
    si, fi = inst.slow_index, inst.fast_index
    s, f = inst.robots[si], inst.robots[fi]
    d_s, v_s, d_f, v_f = s.distance, s.speed, f.distance, f.speed
    u = unit(f.start)
    t_s = d_s / v_s
    t_m = (d_s + d_f) / (v_s + v_f)
    m = (d_f * v_s - d_s * v_f) / (v_s + v_f)
    M = Point2(m * u.x, m * u.y)
    T = t_m + (D - m) / v_f
    end = Point2(D * u.x, D * u.y)
    trajs = [None, None]
    trajs[si] = _traj([(0.0, s.start), (t_s, ORIGIN), (t_m, M), (T, M)])
    trajs[fi] = _traj([(0.0, f.start), (t_m, M), (T, end)])
    bomb = _traj([(0.0, ORIGIN), (t_s, ORIGIN), (t_m, M), (T, end)])
    events = (
        Event(t_s, EventKind.ARRIVE_SOURCE, ORIGIN, si),
        Event(t_s, EventKind.BOMB_PICKUP, ORIGIN, si),
        Event(t_m, EventKind.COLLOCATE, M, None),
        Event(t_m, EventKind.BOMB_PICKUP, M, fi),
        Event(T, EventKind.DELIVERY, end, fi),
    )
    return OfflinePlan(OfflineMode.HANDOFF, (t_m, M), DeliveryOutcome(T, events, tuple(trajs), bomb))


def offline_mode(inst: Instance) -> OfflineMode:
    s, f = inst.slow, inst.fast
    slow_alone, fast_alone, handoff = offline_terms(s.distance, s.speed, f.distance, f.speed, inst.critical_distance)
    if handoff < min(slow_alone, fast_alone):
        return OfflineMode.HANDOFF
    return OfflineMode.FAST_ALONE if fast_alone <= slow_alone else OfflineMode.SLOW_ALONE


def offline_optimal_plan(inst: Instance) -> OfflinePlan:
    """Explicit optimal plan.

    In handoff mode the slow robot fetches the bomb and heads straight at the
    fast robot, which heads straight at the source; they meet on the segment
    between the source and the fast robot's start, and the fast robot then
    runs radially outward.
    """
    mode = offline_mode(inst)
    if mode is OfflineMode.HANDOFF:
        return _handoff(inst)
    if mode is OfflineMode.FAST_ALONE:
        return _alone(inst, inst.fast_index, mode)
    return _alone(inst, inst.slow_index, mode)


def offline_bruteforce_oracle(inst: Instance, grid_n: int = 512) -> float:
    """Grid search over handoff points in the disk, independent of the closed form.

    The slow robot walks to the source, then carries the bomb straight to a
    handoff point M; the fast robot walks straight to M; the fast robot then
    carries the bomb radially out from M. Lone deliveries are also considered.
    """
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    D = inst.critical_distance
    si = inst.slow_index
    slow, fast = inst.robots[si], inst.robots[1 - si]
    sx, sy = slow.start
    kx, ky = fast.start
    d1 = np.hypot(sx, sy)
    alone = min((d1 + D) / slow.speed, (np.hypot(kx, ky) + D) / fast.speed)

    axis = np.linspace(-D, D, grid_n)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    R = np.hypot(X, Y)
    inside = R <= D
    X, Y, R = X[inside], Y[inside], R[inside]
    slow_ready = d1 / slow.speed + R / slow.speed
    fast_ready = np.hypot(X - kx, Y - ky) / fast.speed
    cost = np.maximum(slow_ready, fast_ready) + (D - R) / fast.speed
    return float(min(alone, cost.min()))
