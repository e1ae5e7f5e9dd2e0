"""Online delivery strategies, the offline plan as a strategy, and closed forms.

Every strategy that has to pick an arbitrary direction uses +x (``AXIS``).
Under the one-axis model +x is also the shared axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

from .core import (
    AXIS,
    ORIGIN,
    Axis,
    Boundary,
    ConfigurationError,
    DeliveryOutcome,
    Instance,
    Point2,
    UncoveredCaseError,
    event_tol,
    on_positive_axis,
    unit,
)
from .engine import (
    T_ARRIVED,
    T_COLLOCATED,
    T_DISCOVERED,
    T_WOKE,
    MoveRadiallyOutward,
    MoveTo,
    PickUpBomb,
    RobotView,
    SetDownBomb,
    ShareBombDirection,
    SimConfig,
    Strategy,
    WaitForever,
    WaitUntil,
    simulate,
)
from .offline import OfflineMode, offline_mode

A_STAR = (3.0 + math.sqrt(17.0)) / 4.0

ALGORITHMS = ("offline", "one-axis", "visible-wait", "discoverable", "invisible-zigzag", "generic-zigzag")


# ---------------------------------------------------------------- zigzag sequences


@dataclass(frozen=True)
class ZigzagStrategy:
    """Increasing turning distances: geometric x_k = a^(k-1) or an explicit list."""

    a: Optional[float] = None
    explicit: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if (self.a is None) == (self.explicit is None):
            raise ConfigurationError("give exactly one of a or explicit")
        if self.a is not None and not self.a > 1.0:
            raise ConfigurationError(f"expansion factor must be > 1, got {self.a}")
        if self.explicit is not None:
            xs = tuple(float(x) for x in self.explicit)
            if not xs or xs[0] <= 0 or any(b <= a for a, b in zip(xs, xs[1:])):
                raise ConfigurationError("turning distances must be positive and strictly increasing")
            object.__setattr__(self, "explicit", xs)

    @classmethod
    def geometric(cls, a: float) -> "ZigzagStrategy":
        return cls(a=a)

    @classmethod
    def of(cls, xs: Sequence[float]) -> "ZigzagStrategy":
        return cls(explicit=tuple(xs))

    def turning_distance(self, k: int) -> Optional[float]:
        """x_k for k >= 1, or None past the end of an explicit list."""
        if self.a is not None:
            return self.a ** (k - 1)
        return self.explicit[k - 1] if k <= len(self.explicit) else None

    def __iter__(self) -> Iterator[float]:
        k = 1
        while True:
            x = self.turning_distance(k)
            if x is None:
                return
            yield x
            k += 1


# ---------------------------------------------------------------- offline


class OfflineRobot(Strategy):
    """Follows the optimal offline plan; it may read the whole instance."""

    name = "offline"

    def __init__(self, inst: Instance, idx: int):
        self.idx = idx
        mode = offline_mode(inst)
        si, fi = inst.slow_index, inst.fast_index
        self.role = "idle"
        if mode is OfflineMode.FAST_ALONE and idx == fi or mode is OfflineMode.SLOW_ALONE and idx == si:
            self.role = "alone"
        elif mode is OfflineMode.HANDOFF:
            s, f = inst.robots[si], inst.robots[fi]
            m = (f.distance * s.speed - s.distance * f.speed) / (s.speed + f.speed)
            u = unit(f.start)
            self.meet = Point2(m * u.x, m * u.y)
            self.role = "carrier" if idx == si else "receiver"
        self.state = "start"

    def decide(self, view: RobotView):
        if self.role == "idle":
            return None
        if self.role == "alone":
            if self.state == "start":
                self.state = "to_source"
                return MoveTo(ORIGIN)
            if self.state == "to_source" and T_ARRIVED in view.triggers:
                self.state = "pickup"
                return PickUpBomb()
            if self.state == "pickup":
                self.state = "run"
                return MoveRadiallyOutward(AXIS)
            return None
        if self.role == "carrier":
            if self.state == "start":
                self.state = "to_source"
                return MoveTo(ORIGIN)
            if self.state == "to_source" and T_ARRIVED in view.triggers:
                self.state = "pickup"
                return PickUpBomb()
            if self.state == "pickup":
                self.state = "to_meet"
                return MoveTo(self.meet)
            return None
        # receiver
        if self.state == "start":
            self.state = "to_meet"
            return MoveTo(self.meet)
        if self.state == "to_meet" and view.other_here and view.other_holding_bomb:
            self.state = "pickup"
            return PickUpBomb()
        if self.state == "pickup":
            self.state = "run"
            return MoveRadiallyOutward(AXIS)
        return None


# ---------------------------------------------------------------- one axis


class OneAxisRobot(Strategy):
    """Go to the source, then follow the shared axis; a faster robot takes the bomb on contact."""

    name = "one-axis"
    requires_axis = Axis.ONE

    def __init__(self):
        self.state = "start"

    def _take_from_slower(self, view):
        return view.other_here and view.other_holding_bomb and not view.other_is_faster

    def decide(self, view: RobotView):
        st = self.state
        if st == "start":
            self.state = "to_source"
            return MoveTo(ORIGIN)
        if st in ("to_source", "follow") and self._take_from_slower(view):
            self.state = "take"
            return PickUpBomb()
        if st == "to_source" and T_ARRIVED in view.triggers:
            if view.bomb_here:
                self.state = "take"
                return PickUpBomb()
            self.state = "follow"
            return MoveRadiallyOutward(AXIS)
        if st == "take":
            self.state = "carry"
            return MoveRadiallyOutward(AXIS)
        return None


# ---------------------------------------------------------------- visible boundary


class VisibleWaitRobot(Strategy):
    """Go to the source and wait D/v; the faster robot present carries the bomb out."""

    name = "visible-wait"
    boundaries = frozenset({Boundary.VISIBLE})

    def __init__(self):
        self.state = "start"

    def _meet(self, view):
        if view.other_is_faster or not view.bomb_here:
            self.state = "done"
            return WaitForever()
        self.state = "take"
        return PickUpBomb()

    def decide(self, view: RobotView):
        st = self.state
        if st == "start":
            self.state = "to_source"
            return MoveTo(ORIGIN)
        if st == "to_source" and T_ARRIVED in view.triggers:
            if not view.bomb_here:
                self.state = "done"
                return WaitForever()
            if view.other_here:
                return self._meet(view)
            self.state = "wait"
            return WaitUntil(view.time + view.critical_distance / view.speed)
        if st == "wait":
            if view.other_here:
                return self._meet(view)
            if T_WOKE in view.triggers:
                if not view.bomb_here:
                    self.state = "done"
                    return WaitForever()
                self.state = "take"
                return PickUpBomb()
            return None
        if st == "take":
            self.state = "carry"
            return MoveRadiallyOutward(AXIS)
        return None


# ---------------------------------------------------------------- discoverable boundary


class DiscoverableRobot(Strategy):
    """Learn D (on the way in, by exploring along +x, or from the other robot), then deliver if the bomb is still at S."""

    name = "discoverable"
    boundaries = frozenset({Boundary.DISCOVERABLE})

    def __init__(self):
        self.state = "start"

    def _complete(self, view):
        if view.bomb_here:
            self.state = "take"
            return PickUpBomb()
        self.state = "done"
        return WaitForever()

    def decide(self, view: RobotView):
        st = self.state
        if st == "start":
            self.state = "to_source"
            return MoveTo(ORIGIN)
        if st == "to_source" and T_ARRIVED in view.triggers:
            if view.boundary_discovered:
                self.state = "wait"
                return WaitUntil(view.time + view.critical_distance / view.speed)
            self.state = "explore"
            return MoveRadiallyOutward(AXIS)
        if st == "explore":
            if T_DISCOVERED in view.triggers:
                self.state = "return"
                return MoveTo(ORIGIN)
            if view.boundary_discovered:
                # Told about the boundary on the way out: finish the trip to it.
                self.state = "explore_known"
                return MoveRadiallyOutward(AXIS, until=view.critical_distance)
            return None
        if st == "explore_known" and T_ARRIVED in view.triggers:
            self.state = "return"
            return MoveTo(ORIGIN)
        if st == "return" and T_ARRIVED in view.triggers:
            return self._complete(view)
        if st == "wait" and T_WOKE in view.triggers:
            return self._complete(view)
        if st == "take":
            self.state = "carry"
            return MoveRadiallyOutward(AXIS)
        return None


# ---------------------------------------------------------------- invisible boundary


class InvisibleZigzagRobot(Strategy):
    """Wait 2/v at the source, then zigzag the bomb out to 1, a, a^2, ... until the faster robot shows up."""

    name = "invisible-zigzag"
    boundaries = frozenset({Boundary.INVISIBLE})

    def __init__(self, a: float = A_STAR):
        if not a > 1.0:
            raise ConfigurationError(f"expansion factor must be > 1, got {a}")
        self.a = a
        self.state = "start"
        self.trip = 0

    def _meet(self, view):
        """Both robots at the source: the slower shares what it knows and stays."""
        if view.other_is_faster:
            if view.bomb_location is not None and not view.bomb_here and view.bomb_location[1] > 0:
                self.state = "stay"
                return ShareBombDirection()
            self.state = "done"
            return WaitForever()
        if view.bomb_here:
            self.state = "final_take"
            return PickUpBomb()
        if view.bomb_location is not None:
            self.state = "final_fetch"
            return MoveTo(self._bomb_point(view))
        self.state = "await_share"
        return WaitForever()

    @staticmethod
    def _bomb_point(view):
        (u, r) = view.bomb_location
        return Point2(u.x * r, u.y * r)

    def _carry(self, view):
        self.state = "carry"
        return MoveRadiallyOutward(AXIS, until=self.a ** self.trip)

    def decide(self, view: RobotView):
        st = self.state
        if st == "start":
            self.state = "to_source"
            return MoveTo(ORIGIN)
        if st == "to_source":
            if T_ARRIVED not in view.triggers:
                return None
            if view.other_here:
                return self._meet(view)
            if view.bomb_here:
                self.state = "initial_wait"
                return WaitUntil(view.time + 2.0 / view.speed)
            self.state = "await_return"
            return WaitForever()
        if st in ("initial_wait", "await_return", "await_share", "returning") and view.other_here and view.at_source:
            if st == "returning" and T_ARRIVED not in view.triggers:
                return None
            if st == "await_share" and view.bomb_location is None:
                return None
            return self._meet(view)
        if st == "initial_wait" and T_WOKE in view.triggers:
            self.state = "lift"
            return PickUpBomb()
        if st == "lift":
            return self._carry(view)
        if st == "carry" and T_ARRIVED in view.triggers:
            self.state = "drop"
            return SetDownBomb()
        if st == "drop":
            self.state = "returning"
            return MoveTo(ORIGIN)
        if st == "returning" and T_ARRIVED in view.triggers:
            self.trip += 1
            self.state = "fetch"
            return MoveTo(self._bomb_point(view))
        if st == "fetch" and T_ARRIVED in view.triggers:
            self.state = "lift"
            return PickUpBomb()
        if st == "final_fetch" and T_ARRIVED in view.triggers:
            self.state = "final_take"
            return PickUpBomb()
        if st == "final_take":
            self.state = "final_carry"
            return MoveRadiallyOutward(AXIS)
        if st == "stay":
            self.state = "done"
            return WaitForever()
        return None


# ---------------------------------------------------------------- generic zigzag


class ZigzagSearcher(Strategy):
    """Single searcher: carry the bomb to x_1, set it down, return; fetch it and carry to x_2; ..."""

    name = "generic-zigzag"

    def __init__(self, X: ZigzagStrategy):
        self.X = X
        self.k = 1
        self.state = "start"

    def decide(self, view: RobotView):
        st = self.state
        if st == "start":
            self.state = "to_source"
            return MoveTo(ORIGIN)
        if st in ("to_source", "fetch") and T_ARRIVED in view.triggers:
            self.state = "lift"
            return PickUpBomb()
        if st == "lift":
            x = self.X.turning_distance(self.k)
            if x is None:
                self.state = "exhausted"
                return WaitForever()
            self.state = "carry"
            return MoveRadiallyOutward(AXIS, until=x)
        if st == "carry" and T_ARRIVED in view.triggers:
            self.state = "drop"
            return SetDownBomb()
        if st == "drop":
            self.state = "returning"
            return MoveTo(ORIGIN)
        if st == "returning" and T_ARRIVED in view.triggers:
            self.k += 1
            if self.X.turning_distance(self.k) is None:
                self.state = "exhausted"
                return WaitForever()
            self.state = "fetch"
            (u, r) = view.bomb_location
            return MoveTo(Point2(u.x * r, u.y * r))
        return None


class Idle(Strategy):
    name = "idle"

    def decide(self, view: RobotView):
        return None


# ---------------------------------------------------------------- factory


Params = dict


def make_strategies(alg: str, inst: Instance, params: Optional[Params] = None) -> tuple[Strategy, Strategy]:
    params = params or {}
    if alg == "offline":
        return OfflineRobot(inst, 0), OfflineRobot(inst, 1)
    if alg == "one-axis":
        return OneAxisRobot(), OneAxisRobot()
    if alg == "visible-wait":
        return VisibleWaitRobot(), VisibleWaitRobot()
    if alg == "discoverable":
        return DiscoverableRobot(), DiscoverableRobot()
    if alg == "invisible-zigzag":
        a = params.get("a", A_STAR)
        return InvisibleZigzagRobot(a), InvisibleZigzagRobot(a)
    if alg == "generic-zigzag":
        X = _zigzag_param(params)
        searcher = params.get("searcher", 0)
        pair = [Idle(), Idle()]
        pair[searcher] = ZigzagSearcher(X)
        return tuple(pair)
    raise ConfigurationError(f"unknown algorithm {alg!r}; choose from {', '.join(ALGORITHMS)}")


def _zigzag_param(params: Params) -> ZigzagStrategy:
    X = params.get("X")
    if isinstance(X, ZigzagStrategy):
        return X
    if X is not None:
        return ZigzagStrategy.of(X)
    return ZigzagStrategy.geometric(params.get("a", A_STAR))


def run(inst: Instance, alg: str, params: Optional[Params] = None, cfg: Optional[SimConfig] = None,
        event_log=None) -> DeliveryOutcome:
    return simulate(inst, make_strategies(alg, inst, params), cfg, event_log)


def simulated_time(inst: Instance, alg: str, params: Optional[Params] = None) -> float:
    return run(inst, alg, params).delivery_time


# ---------------------------------------------------------------- closed forms


def _arrivals(inst: Instance):
    return [r.distance / r.speed for r in inst.robots]


def _faster_speed(inst: Instance) -> float:
    return inst.fast.speed


def oneaxis_time(inst: Instance) -> float:
    D = inst.critical_distance
    s, f = inst.slow, inst.fast
    v_s, v_f = s.speed, f.speed
    t_s, t_f = s.distance / v_s, f.distance / v_f
    if t_f <= t_s:
        return t_f + D / v_f
    alone = t_s + D / v_s
    if on_positive_axis(f.start):
        t = (f.distance + v_s * t_s) / (v_f + v_s)
        x = v_s * (t - t_s)
        return t + (D - x) / v_f if x < D else alone
    if v_f > v_s:
        t_c = (v_f * t_f - v_s * t_s) / (v_f - v_s)
        p = v_s * (t_c - t_s)
        if p < D:
            return t_c + (D - p) / v_f
    return alone


def visible_wait_time(inst: Instance) -> float:
    D = inst.critical_distance
    a = _arrivals(inst)
    first = 0 if a[0] <= a[1] else 1
    other = 1 - first
    v_first = inst.robots[first].speed
    if a[other] <= a[first] + D / v_first:
        return a[other] + D / _faster_speed(inst)
    return a[first] + 2.0 * D / v_first


def discoverable_time(inst: Instance) -> float:
    D = inst.critical_distance
    for r in inst.robots:
        if on_positive_axis(r.start):
            raise UncoveredCaseError("a robot starts on the exploration ray")
    a = _arrivals(inst)
    d = [r.distance for r in inst.robots]
    v = [r.speed for r in inst.robots]
    outside = [d[i] >= D - event_tol(D) for i in range(2)]
    c_wait = [a[i] + D / v[i] for i in range(2)]
    informed = []
    for i in range(2):
        j = 1 - i
        informed.append(outside[i] or (outside[j] and a[j] <= a[i] <= c_wait[j]))
    c = [c_wait[i] if informed[i] else a[i] + 2.0 * D / v[i] for i in range(2)]
    k = min(range(2), key=lambda i: (c[i], informed[i], i))
    return c[k] + D / v[k]


def invisible_zigzag_time(inst: Instance, a: float = A_STAR) -> float:
    D = inst.critical_distance
    for r in inst.robots:
        if on_positive_axis(r.start):
            raise UncoveredCaseError("a robot starts on the zigzag ray")
    arr = _arrivals(inst)
    F = 0 if arr[0] <= arr[1] else 1
    O = 1 - F
    v_F = inst.robots[F].speed
    E = arr[F] + 2.0 / v_F
    if arr[O] <= E:
        return arr[O] + D / _faster_speed(inst)
    reach = D - event_tol(D)
    R = E
    partial = 0.0
    j = 0
    while True:
        if a ** j >= reach:
            return E + (2.0 * partial + D) / v_F
        partial += a ** j
        R = E + 2.0 * partial / v_F
        if R >= arr[O]:
            return R + D / _faster_speed(inst)
        j += 1


def generic_zigzag_time(inst: Instance, X: ZigzagStrategy, searcher: int = 0) -> float:
    D = inst.critical_distance
    r = inst.robots[searcher]
    reach = D - event_tol(D)
    travelled = 0.0
    for x in X:
        if x >= reach:
            return r.distance / r.speed + (travelled + D) / r.speed
        travelled += 2.0 * x
    raise UncoveredCaseError("turning distances never reach the boundary")


def closed_form_time(inst: Instance, alg: str, params: Optional[Params] = None) -> float:
    """Analytic delivery time; raises UncoveredCaseError outside the covered cases."""
    from .offline import offline_optimal_time

    params = params or {}
    if alg == "offline":
        return offline_optimal_time(inst)
    if alg == "one-axis":
        return oneaxis_time(inst)
    if alg == "visible-wait":
        return visible_wait_time(inst)
    if alg == "discoverable":
        return discoverable_time(inst)
    if alg == "invisible-zigzag":
        return invisible_zigzag_time(inst, params.get("a", A_STAR))
    if alg == "generic-zigzag":
        return generic_zigzag_time(inst, _zigzag_param(params), params.get("searcher", 0))
    raise ConfigurationError(f"unknown algorithm {alg!r}")
