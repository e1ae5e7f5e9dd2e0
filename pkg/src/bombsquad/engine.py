"""Event-driven continuous-time simulator for two robots and one bomb.

Robots move along straight segments at constant velocity. Between events
nothing interesting happens, so the simulator jumps from one analytically
computed event time to the next:

* a robot finishes its current directive (arrival or wake-up),
* the two robots come together (closest approach of two linear motions),
* a robot crosses the boundary circle (discoverable model only),
* the carried bomb reaches the boundary (delivery).

At each event the robots that have something new to react to are asked for
their next directive. Strategies only ever see a RobotView, which exposes what
the robot is allowed to know under the instance's knowledge model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Optional, Sequence, Union

from .core import (
    AXIS,
    ORIGIN,
    Axis,
    Boundary,
    Breakpoint,
    DeliveryOutcome,
    Event,
    EventKind,
    Instance,
    ModelViolationError,
    NonterminationError,
    Point2,
    SimulationTimeoutError,
    Trajectory,
    event_tol,
    slow_index,
)

INF = math.inf

# ---------------------------------------------------------------- directives


@dataclass(frozen=True)
class MoveTo:
    target: Point2


@dataclass(frozen=True)
class MoveRadiallyOutward:
    """Move away from the source along the ray through the robot.

    ``direction`` is used when the robot stands on the source. ``until`` is a
    distance from the source at which to stop; None means forever.
    """

    direction: Optional[Point2] = None
    until: Optional[float] = None


@dataclass(frozen=True)
class WaitUntil:
    time: float


@dataclass(frozen=True)
class WaitForever:
    pass


@dataclass(frozen=True)
class PickUpBomb:
    pass


@dataclass(frozen=True)
class SetDownBomb:
    pass


@dataclass(frozen=True)
class ShareBombDirection:
    pass


Directive = Union[MoveTo, MoveRadiallyOutward, WaitUntil, WaitForever, PickUpBomb, SetDownBomb, ShareBombDirection]
_INSTANT = (PickUpBomb, SetDownBomb, ShareBombDirection)


@dataclass(frozen=True)
class SimConfig:
    max_events: int = 10_000
    collocation_tolerance: float = 1e-9
    horizon_time: float = 1e9

    def __post_init__(self):
        if self.max_events <= 0 or self.collocation_tolerance <= 0 or self.horizon_time <= 0:
            raise ValueError("SimConfig fields must be positive")


# Reasons a robot is being queried, in processing priority order.
T_DISCOVERED = "discovered"
T_ARRIVED = "arrived"
T_COLLOCATED = "collocated"
T_WOKE = "woke"
T_START = "start"
T_BOMB_TAKEN = "bomb_taken"
T_INFORMED = "informed"
T_ACTION = "action"

_PRIORITY = {
    T_DISCOVERED: 0,
    T_ARRIVED: 1,
    T_COLLOCATED: 2,
    T_WOKE: 3,
    T_START: 4,
    T_BOMB_TAKEN: 4,
    T_INFORMED: 4,
    T_ACTION: 4,
}


class RobotView:
    """What one robot knows at the moment it is asked to decide."""

    __slots__ = (
        "robot", "time", "position", "speed", "holding_bomb", "bomb_here", "other_here",
        "other_holding_bomb", "boundary_discovered", "knows_other_speed", "bomb_location",
        "triggers", "at_source", "_D", "_other_speed",
    )

    def __init__(self, **kw):
        for k, v in kw.items():
            setattr(self, k, v)

    @property
    def critical_distance(self) -> float:
        if not self.boundary_discovered:
            raise ModelViolationError(f"robot {self.robot} read the critical distance without knowing it")
        return self._D

    @property
    def other_speed(self) -> float:
        if not self.knows_other_speed:
            raise ModelViolationError(f"robot {self.robot} read the other robot's speed without meeting it")
        return self._other_speed

    @property
    def other_is_faster(self) -> bool:
        speeds = (self.speed, self.other_speed) if self.robot == 0 else (self.other_speed, self.speed)
        return slow_index(*speeds) == self.robot


class Strategy:
    """Base class for a single robot's controller."""

    name = "strategy"
    requires_axis: Optional[Axis] = None
    boundaries: Optional[frozenset] = None

    def decide(self, view: RobotView) -> Optional[Directive]:
        raise NotImplementedError


def check_applicable(strategy: Strategy, inst: Instance) -> None:
    k = inst.knowledge
    if strategy.requires_axis is not None and k.axis is not strategy.requires_axis:
        raise ModelViolationError(f"{strategy.name} requires axis={strategy.requires_axis.value}, got {k.axis.value}")
    if strategy.boundaries is not None and k.boundary not in strategy.boundaries:
        allowed = ", ".join(sorted(b.value for b in strategy.boundaries))
        raise ModelViolationError(f"{strategy.name} requires boundary in {{{allowed}}}, got {k.boundary.value}")


# ---------------------------------------------------------------- event times


def collocation_time(p1, v1, p2, v2, t0: float = 0.0, tolerance: float = 1e-9) -> Optional[float]:
    """Time of closest approach of two linear motions, if they come within tolerance.

    Returns None when the closest approach lies in the past or the gap there
    exceeds the tolerance.
    """
    px, py = p1[0] - p2[0], p1[1] - p2[1]
    wx, wy = v1[0] - v2[0], v1[1] - v2[1]
    ww = wx * wx + wy * wy
    if math.hypot(px, py) <= tolerance:
        return t0
    if ww == 0.0:
        return None
    tau = -(px * wx + py * wy) / ww
    if tau < 0.0:
        return None
    if math.hypot(px + wx * tau, py + wy * tau) > tolerance:
        return None
    return t0 + tau


def circle_crossing(p, w, R: float) -> Optional[float]:
    """Smallest tau > 0 with |p + w tau| = R, or None."""
    a = w[0] * w[0] + w[1] * w[1]
    if a == 0.0:
        return None
    b = 2.0 * (p[0] * w[0] + p[1] * w[1])
    c = p[0] * p[0] + p[1] * p[1] - R * R
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    roots = []
    if q != 0.0:
        roots.append(c / q)
    roots.append(q / a)
    pos = [r for r in roots if r > 0.0]
    return min(pos) if pos else None


# ---------------------------------------------------------------- simulator


class _Robot:
    __slots__ = (
        "idx", "speed", "strategy", "pos", "vel", "t0", "end", "target", "directive", "kind",
        "holding", "knows_other_speed", "discovered", "bomb_known", "triggers", "bps",
    )

    def __init__(self, idx, spec, strategy):
        self.idx = idx
        self.speed = spec.speed
        self.strategy = strategy
        self.pos = spec.start
        self.vel = (0.0, 0.0)
        self.t0 = 0.0
        self.end = INF
        self.target = None
        self.directive = WaitForever()
        self.kind = None  # "arrive" or "wake" for finite segments
        self.holding = False
        self.knows_other_speed = False
        self.discovered = False
        self.bomb_known: Optional[Point2] = ORIGIN
        self.triggers: set = {T_START}
        self.bps: list = [Breakpoint(0.0, spec.start)]

    def position_at(self, t):
        dt = t - self.t0
        return Point2(self.pos[0] + self.vel[0] * dt, self.pos[1] + self.vel[1] * dt)


class Simulation:
    def __init__(self, inst: Instance, strategies: Sequence[Strategy], cfg: Optional[SimConfig] = None,
                 event_log: Optional[IO[str]] = None):
        if len(strategies) != 2:
            raise ValueError("exactly two strategies are required")
        for s in strategies:
            check_applicable(s, inst)
        self.inst = inst
        self.cfg = cfg or SimConfig()
        self.D = inst.critical_distance
        self.boundary = inst.knowledge.boundary
        self.robots = [_Robot(i, inst.robots[i], strategies[i]) for i in range(2)]
        self.t = 0.0
        self.bomb = ORIGIN
        self.holder: Optional[int] = None
        self.bomb_bps = [Breakpoint(0.0, ORIGIN)]
        self.events: list[Event] = []
        self.together = False
        self.delivered_at: Optional[float] = None
        self.event_log = event_log
        self._exit_at = INF
        self._cross_at = [INF, INF]
        if self.boundary is Boundary.VISIBLE:
            for r in self.robots:
                r.discovered = True

    # -- bookkeeping

    def _emit(self, kind: EventKind, pos, robot: Optional[int]):
        ev = Event(self.t, kind, Point2(*pos), robot)
        self.events.append(ev)
        if self.event_log is not None:
            self.event_log.write(json.dumps(ev.to_dict()) + "\n")

    def _stop(self, r: _Robot, directive=None):
        r.vel = (0.0, 0.0)
        r.t0 = self.t
        r.end = INF
        r.kind = None
        r.target = None
        r.directive = directive or WaitForever()

    def _start(self, r: _Robot, d: Directive):
        """Begin a movement/wait directive at the current time."""
        t = self.t
        r.directive = d
        r.t0 = t
        if isinstance(d, MoveTo):
            tgt = Point2(float(d.target[0]), float(d.target[1]))
            dx, dy = tgt[0] - r.pos[0], tgt[1] - r.pos[1]
            L = math.hypot(dx, dy)
            if L <= event_tol(max(abs(tgt[0]), abs(tgt[1]))):
                r.pos = tgt
                self._stop(r, d)
                self._arrived(r, tgt)
                return
            r.vel = (dx / L * r.speed, dy / L * r.speed)
            r.end = t + L / r.speed
            r.target = tgt
            r.kind = "arrive"
        elif isinstance(d, MoveRadiallyOutward):
            n = math.hypot(r.pos[0], r.pos[1])
            if n > event_tol(0.0):
                u = (r.pos[0] / n, r.pos[1] / n)
            else:
                u = tuple(d.direction) if d.direction is not None else AXIS
                un = math.hypot(u[0], u[1])
                u = (u[0] / un, u[1] / un)
            r.vel = (u[0] * r.speed, u[1] * r.speed)
            if d.until is None:
                r.end = INF
                r.target = None
                r.kind = None
            else:
                L = d.until - n
                if L <= event_tol(d.until):
                    self._stop(r, d)
                    self._arrived(r, r.pos)
                    return
                r.end = t + L / r.speed
                r.target = Point2(u[0] * d.until, u[1] * d.until)
                r.kind = "arrive"
        elif isinstance(d, WaitUntil):
            r.vel = (0.0, 0.0)
            r.target = r.pos
            if d.time <= t:
                self._stop(r, d)
                r.triggers.add(T_WOKE)
                return
            r.end = d.time
            r.kind = "wake"
        elif isinstance(d, WaitForever):
            self._stop(r, d)
        else:
            raise TypeError(f"not a movement directive: {d!r}")

    def _arrived(self, r: _Robot, where):
        r.triggers.add(T_ARRIVED)
        if where[0] == 0.0 and where[1] == 0.0:
            self._emit(EventKind.ARRIVE_SOURCE, ORIGIN, r.idx)

    def _record(self):
        t = self.t
        for r in self.robots:
            if r.bps[-1].time < t:
                r.bps.append(Breakpoint(t, r.pos))
            else:
                r.bps[-1] = Breakpoint(r.bps[-1].time, r.pos)
        if self.bomb_bps[-1].time < t:
            self.bomb_bps.append(Breakpoint(t, self.bomb))
        else:
            self.bomb_bps[-1] = Breakpoint(self.bomb_bps[-1].time, self.bomb)

    # -- views

    def _bomb_here(self, r: _Robot) -> bool:
        if self.holder is not None:
            return False
        return math.hypot(self.bomb[0] - r.pos[0], self.bomb[1] - r.pos[1]) <= self.cfg.collocation_tolerance

    def _view(self, r: _Robot) -> RobotView:
        o = self.robots[1 - r.idx]
        here = self._bomb_here(r)
        if r.holding:
            r.bomb_known = r.pos
        elif here:
            r.bomb_known = self.bomb
        elif r.bomb_known is not None and math.hypot(
                r.bomb_known[0] - r.pos[0], r.bomb_known[1] - r.pos[1]) <= self.cfg.collocation_tolerance:
            # The robot is where it believed the bomb was, and it is not there.
            r.bomb_known = None
        bl = None
        if r.bomb_known is not None:
            n = math.hypot(r.bomb_known[0], r.bomb_known[1])
            direction = Point2(r.bomb_known[0] / n, r.bomb_known[1] / n) if n > 0 else None
            bl = (direction, n)
        other_here = self.together
        return RobotView(
            robot=r.idx,
            time=self.t,
            position=r.pos,
            speed=r.speed,
            holding_bomb=r.holding,
            bomb_here=here,
            other_here=other_here,
            other_holding_bomb=other_here and o.holding,
            boundary_discovered=r.discovered,
            knows_other_speed=r.knows_other_speed,
            bomb_location=bl,
            triggers=frozenset(r.triggers),
            at_source=math.hypot(r.pos[0], r.pos[1]) <= self.cfg.collocation_tolerance,
            _D=self.D,
            _other_speed=o.speed,
        )

    # -- instant actions

    def _pick_up(self, r: _Robot):
        if r.holding:
            return
        o = self.robots[1 - r.idx]
        if self.holder is None:
            if not self._bomb_here(r):
                raise ModelViolationError(f"robot {r.idx} tried to pick up a bomb that is not here")
        elif self.holder == o.idx and self.together:
            o.holding = False
            o.bomb_known = None
            o.triggers.add(T_BOMB_TAKEN)
        else:
            raise ModelViolationError(f"robot {r.idx} tried to take the bomb from a robot it is not with")
        self.holder = r.idx
        r.holding = True
        self.bomb = r.pos
        r.bomb_known = r.pos
        self._emit(EventKind.BOMB_PICKUP, r.pos, r.idx)

    def _set_down(self, r: _Robot):
        if not r.holding:
            raise ModelViolationError(f"robot {r.idx} tried to set down a bomb it does not hold")
        r.holding = False
        self.holder = None
        self.bomb = r.pos
        r.bomb_known = r.pos
        self._emit(EventKind.BOMB_SET_DOWN, r.pos, r.idx)

    def _share(self, r: _Robot):
        o = self.robots[1 - r.idx]
        if not self.together:
            raise ModelViolationError(f"robot {r.idx} tried to share information while apart")
        if r.bomb_known is None:
            raise ModelViolationError(f"robot {r.idx} shared a bomb location it does not know")
        o.bomb_known = r.bomb_known
        o.triggers.add(T_INFORMED)

    # -- main loop pieces

    def _query(self):
        budget = 64
        while True:
            pending = [r for r in self.robots if r.triggers]
            if not pending:
                return
            budget -= 1
            if budget < 0:
                raise NonterminationError(f"strategies keep issuing instant actions at t={self.t}")
            r = min(pending, key=lambda q: (min(_PRIORITY[x] for x in q.triggers), q.idx))
            view = self._view(r)
            r.triggers.clear()
            d = r.strategy.decide(view)
            if d is None:
                continue
            if isinstance(d, _INSTANT):
                if isinstance(d, PickUpBomb):
                    self._pick_up(r)
                elif isinstance(d, SetDownBomb):
                    self._set_down(r)
                else:
                    self._share(r)
                r.triggers.add(T_ACTION)
            else:
                self._start(r, d)

    def _check_contacts(self):
        """Discovery and collocation at the current instant."""
        if self.boundary is Boundary.DISCOVERABLE:
            D = self.D
            for r in self.robots:
                if not r.discovered and abs(math.hypot(r.pos[0], r.pos[1]) - D) <= event_tol(D):
                    r.discovered = True
                    r.triggers.add(T_DISCOVERED)
                    self._emit(EventKind.BOUNDARY_DISCOVERY, r.pos, r.idx)
        a, b = self.robots
        gap = math.hypot(a.pos[0] - b.pos[0], a.pos[1] - b.pos[1])
        if gap <= self.cfg.collocation_tolerance:
            if not self.together:
                self.together = True
                if gap > 0.0:
                    if math.hypot(a.pos[0], a.pos[1]) <= self.cfg.collocation_tolerance:
                        snap = ORIGIN
                    elif a.vel == (0.0, 0.0):
                        snap = a.pos
                    elif b.vel == (0.0, 0.0):
                        snap = b.pos
                    else:
                        snap = Point2(0.5 * (a.pos[0] + b.pos[0]), 0.5 * (a.pos[1] + b.pos[1]))
                    for r in (a, b):
                        r.pos = snap
                        if r.directive is not None and r.end < INF and r.kind == "arrive":
                            self._resume(r)
                    if self.holder is not None:
                        self.bomb = snap
                a.knows_other_speed = b.knows_other_speed = True
                if self.boundary is Boundary.DISCOVERABLE and a.discovered != b.discovered:
                    for r in (a, b):
                        if not r.discovered:
                            r.discovered = True
                            r.triggers.add(T_INFORMED)
                a.triggers.add(T_COLLOCATED)
                b.triggers.add(T_COLLOCATED)
                self._emit(EventKind.COLLOCATE, a.pos, None)
        else:
            self.together = False

    def _resume(self, r: _Robot):
        """Re-aim an in-progress move from a slightly adjusted position."""
        tgt = r.target
        dx, dy = tgt[0] - r.pos[0], tgt[1] - r.pos[1]
        L = math.hypot(dx, dy)
        r.t0 = self.t
        if L == 0.0:
            r.vel = (0.0, 0.0)
            r.end = self.t
            return
        r.vel = (dx / L * r.speed, dy / L * r.speed)
        r.end = self.t + L / r.speed

    def _next_event_time(self) -> float:
        t = self.t
        best = INF
        self._exit_at = INF
        self._cross_at = [INF, INF]
        for r in self.robots:
            if r.end < best:
                best = r.end
        if self.holder is not None:
            h = self.robots[self.holder]
            if h.vel != (0.0, 0.0):
                tau = circle_crossing(h.pos, h.vel, self.D)
                if tau is not None:
                    self._exit_at = t + tau
                    best = min(best, t + tau)
        if self.boundary is Boundary.DISCOVERABLE:
            for r in self.robots:
                if not r.discovered and r.vel != (0.0, 0.0):
                    tau = circle_crossing(r.pos, r.vel, self.D)
                    if tau is not None:
                        self._cross_at[r.idx] = t + tau
                        best = min(best, t + tau)
        if not self.together:
            a, b = self.robots
            if a.vel != (0.0, 0.0) or b.vel != (0.0, 0.0):
                tc = collocation_time(a.pos, a.vel, b.pos, b.vel, t, self.cfg.collocation_tolerance)
                if tc is not None and tc > t and tc < best:
                    best = tc
        return best

    def _advance(self, t_next: float):
        eps = event_tol(t_next)
        self.t = t_next
        for r in self.robots:
            if r.end <= t_next + eps:
                finished = r.kind
                if r.target is not None:
                    r.pos = r.target
                d = r.directive
                self._stop(r, d)
                if finished == "arrive":
                    self._arrived(r, r.pos)
                elif finished == "wake":
                    r.triggers.add(T_WOKE)
            elif r.vel != (0.0, 0.0):
                r.pos = r.position_at(t_next)
                r.t0 = t_next
        if self.holder is not None:
            h = self.robots[self.holder]
            if t_next >= self._exit_at:
                # Land exactly on the boundary to absorb rounding in the root.
                n = math.hypot(h.pos[0], h.pos[1])
                h.pos = Point2(h.pos[0] * self.D / n, h.pos[1] * self.D / n)
            self.bomb = h.pos
        for r in self.robots:
            if t_next >= self._cross_at[r.idx] and not r.discovered:
                n = math.hypot(r.pos[0], r.pos[1])
                if n > 0.0:
                    r.pos = Point2(r.pos[0] * self.D / n, r.pos[1] * self.D / n)

    def _check_delivery(self) -> bool:
        if self.holder is None:
            return False
        n = math.hypot(self.bomb[0], self.bomb[1])
        if n >= self.D - event_tol(self.D):
            self.delivered_at = self.t
            self._emit(EventKind.DELIVERY, self.bomb, self.holder)
            return True
        return False

    def run(self) -> DeliveryOutcome:
        cfg = self.cfg
        self._check_contacts()
        self._query()
        n_events = 0
        while not self._check_delivery():
            t_next = self._next_event_time()
            if t_next == INF:
                raise NonterminationError(f"simulation stalled at t={self.t}: no further events")
            if t_next > cfg.horizon_time:
                raise SimulationTimeoutError(f"next event at t={t_next} is beyond the horizon {cfg.horizon_time}")
            n_events += 1
            if n_events > cfg.max_events:
                raise NonterminationError(f"more than {cfg.max_events} events")
            self._advance(t_next)
            self._check_contacts()
            self._record()
            if self._check_delivery():
                break
            self._query()
        self._record()
        return DeliveryOutcome(
            self.delivered_at,
            tuple(self.events),
            (Trajectory(tuple(self.robots[0].bps)), Trajectory(tuple(self.robots[1].bps))),
            Trajectory(tuple(self.bomb_bps)),
        )


def simulate(inst: Instance, strategies: Sequence[Strategy], cfg: Optional[SimConfig] = None,
             event_log: Optional[IO[str]] = None) -> DeliveryOutcome:
    return Simulation(inst, strategies, cfg, event_log).run()
