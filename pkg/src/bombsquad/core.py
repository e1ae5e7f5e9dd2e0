"""Domain types, geometry helpers and trajectory utilities.

The source is fixed at the origin. Robot 0 and robot 1 keep their positional
identity; which one is "slow" is derived from the speeds, with ties resolved in
favour of the lower index being the slower robot.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

# Position/time tolerance used for validation and comparisons.
REL_TOL = 1e-9
# Tighter tolerance used by the simulator for deciding that an event happened.
EVENT_EPS = 1e-12


def tol(x: float) -> float:
    return REL_TOL * max(1.0, abs(x))


def event_tol(x: float) -> float:
    return EVENT_EPS * max(1.0, abs(x))


# ---------------------------------------------------------------- errors


class BombSquadError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInstanceError(BombSquadError, ValueError):
    pass


class MalformedTrajectoryError(BombSquadError, ValueError):
    pass


class OutOfRangeError(BombSquadError, ValueError):
    pass


class ModelViolationError(BombSquadError):
    """A strategy tried to use knowledge or an action its model forbids."""


class NonterminationError(BombSquadError):
    """The simulation stalled or exceeded its event budget."""


class SimulationTimeoutError(NonterminationError):
    """Simulated time passed the configured horizon."""


class UncoveredCaseError(BombSquadError):
    """No closed-form case applies; callers should simulate instead."""


class ConfigurationError(BombSquadError, ValueError):
    pass


class BranchError(BombSquadError, ValueError):
    """A parameter lies outside the branch of a construction that was requested."""


# ---------------------------------------------------------------- geometry


class Point2(NamedTuple):
    x: float
    y: float


ORIGIN = Point2(0.0, 0.0)
AXIS = Point2(1.0, 0.0)


def norm(p: Sequence[float]) -> float:
    return math.hypot(p[0], p[1])


def dist(p: Sequence[float], q: Sequence[float]) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def unit(p: Sequence[float]) -> Point2:
    n = math.hypot(p[0], p[1])
    if n == 0.0:
        raise ValueError("zero vector has no direction")
    return Point2(p[0] / n, p[1] / n)


def on_positive_axis(p: Sequence[float]) -> bool:
    """True if p lies on the open ray from the source along +x."""
    return p[1] == 0.0 and p[0] > 0.0


# ---------------------------------------------------------------- knowledge


class Axis(str, enum.Enum):
    ONE = "one"
    NONE = "none"


class Boundary(str, enum.Enum):
    VISIBLE = "visible"
    DISCOVERABLE = "discoverable"
    INVISIBLE = "invisible"


@dataclass(frozen=True)
class KnowledgeConfig:
    axis: Axis = Axis.NONE
    boundary: Boundary = Boundary.VISIBLE

    def __post_init__(self):
        try:
            object.__setattr__(self, "axis", Axis(self.axis))
        except ValueError:
            raise InvalidInstanceError(f"axis: unknown value {self.axis!r}") from None
        try:
            object.__setattr__(self, "boundary", Boundary(self.boundary))
        except ValueError:
            raise InvalidInstanceError(f"boundary: unknown value {self.boundary!r}") from None


def _check_finite(name: str, value) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise InvalidInstanceError(f"{name}: expected a number, got {value!r}") from None
    if not math.isfinite(v):
        raise InvalidInstanceError(f"{name}: must be finite, got {value!r}")
    return v


@dataclass(frozen=True)
class RobotSpec:
    start: Point2
    speed: float

    def __post_init__(self):
        x = _check_finite("start.x", self.start[0])
        y = _check_finite("start.y", self.start[1])
        object.__setattr__(self, "start", Point2(x, y))
        s = _check_finite("speed", self.speed)
        if s <= 0.0:
            raise InvalidInstanceError(f"speed: must be > 0, got {s}")
        object.__setattr__(self, "speed", s)

    @property
    def distance(self) -> float:
        return norm(self.start)


@dataclass(frozen=True)
class Instance:
    critical_distance: float
    robots: tuple[RobotSpec, RobotSpec]
    knowledge: KnowledgeConfig = field(default_factory=KnowledgeConfig)

    def __post_init__(self):
        D = _check_finite("critical_distance", self.critical_distance)
        if D <= 0.0:
            raise InvalidInstanceError(f"critical_distance: must be > 0, got {D}")
        if len(self.robots) != 2:
            raise InvalidInstanceError(f"robots: expected exactly 2, got {len(self.robots)}")
        if self.knowledge.boundary is Boundary.INVISIBLE and D < 1.0:
            raise InvalidInstanceError(
                f"critical_distance: must be >= 1 under the invisible boundary model, got {D}"
            )
        object.__setattr__(self, "critical_distance", D)
        object.__setattr__(self, "robots", tuple(self.robots))

    @property
    def D(self) -> float:
        return self.critical_distance

    @property
    def slow_index(self) -> int:
        return slow_index(self.robots[0].speed, self.robots[1].speed)

    @property
    def fast_index(self) -> int:
        return 1 - self.slow_index

    @property
    def slow(self) -> RobotSpec:
        return self.robots[self.slow_index]

    @property
    def fast(self) -> RobotSpec:
        return self.robots[self.fast_index]

    @property
    def v_max(self) -> float:
        return max(self.robots[0].speed, self.robots[1].speed)

    @classmethod
    def from_distances(
        cls,
        d_slow: float,
        d_fast: float,
        v_slow: float,
        v_fast: float = 1.0,
        D: float = 1.0,
        axis: Axis = Axis.NONE,
        boundary: Boundary = Boundary.VISIBLE,
    ) -> "Instance":
        """Canonical placement: slow robot (index 0) at (0, -d_slow), fast robot at (-d_fast, 0).

        Neither start lies on the +x ray, which every strategy uses as its
        default direction.
        """
        slow = RobotSpec(Point2(0.0, -float(d_slow) or 0.0), v_slow)  # "or" turns -0.0 into 0.0
        fast = RobotSpec(Point2(-float(d_fast) or 0.0, 0.0), v_fast)
        return cls(D, (slow, fast), KnowledgeConfig(axis, boundary))

    def with_knowledge(self, axis=None, boundary=None) -> "Instance":
        k = KnowledgeConfig(axis or self.knowledge.axis, boundary or self.knowledge.boundary)
        return Instance(self.critical_distance, self.robots, k)


def slow_index(v0: float, v1: float) -> int:
    """Index of the slower robot; on a tie robot 0 counts as slower."""
    return 1 if v1 < v0 else 0


def normalize_instance(inst: Instance) -> tuple[Instance, float]:
    """Scale speeds so the faster robot has speed 1.

    Returns the new instance and ``time_scale = v_max``; delivery times satisfy
    ``T_normalized = T_original * time_scale``.
    """
    vm = inst.v_max
    robots = tuple(RobotSpec(r.start, r.speed / vm) for r in inst.robots)
    return Instance(inst.critical_distance, robots, inst.knowledge), vm


def scale_distances(inst: Instance, s: float) -> Instance:
    robots = tuple(RobotSpec(Point2(r.start.x * s, r.start.y * s), r.speed) for r in inst.robots)
    return Instance(inst.critical_distance * s, robots, inst.knowledge)


# ---------------------------------------------------------------- JSON


def instance_from_dict(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise InvalidInstanceError("instance: expected a JSON object")
    if "critical_distance" not in doc:
        raise InvalidInstanceError("critical_distance: missing")
    robots = doc.get("robots")
    if not isinstance(robots, list) or len(robots) != 2:
        raise InvalidInstanceError("robots: expected a list of exactly 2 robots")
    specs = []
    for i, r in enumerate(robots):
        if not isinstance(r, dict):
            raise InvalidInstanceError(f"robots[{i}]: expected an object")
        for key in ("x", "y", "speed"):
            if key not in r:
                raise InvalidInstanceError(f"robots[{i}].{key}: missing")
        x = _check_finite(f"robots[{i}].x", r["x"])
        y = _check_finite(f"robots[{i}].y", r["y"])
        v = _check_finite(f"robots[{i}].speed", r["speed"])
        if v <= 0:
            raise InvalidInstanceError(f"robots[{i}].speed: must be > 0, got {v}")
        specs.append(RobotSpec(Point2(x, y), v))
    D = _check_finite("critical_distance", doc["critical_distance"])
    knowledge = KnowledgeConfig(doc.get("axis", "none"), doc.get("boundary", "visible"))
    return Instance(D, tuple(specs), knowledge)


def instance_to_dict(inst: Instance) -> dict:
    return {
        "critical_distance": inst.critical_distance,
        "robots": [{"x": r.start.x, "y": r.start.y, "speed": r.speed} for r in inst.robots],
        "axis": inst.knowledge.axis.value,
        "boundary": inst.knowledge.boundary.value,
    }


def _reject_constant(name):
    raise InvalidInstanceError(f"non-finite number {name} is not allowed")


def load_instance(text: str) -> Instance:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"instance: invalid JSON ({exc})") from None
    return instance_from_dict(doc)


def dump_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2, allow_nan=False)


# ---------------------------------------------------------------- trajectories


class Breakpoint(NamedTuple):
    time: float
    position: Point2


@dataclass(frozen=True)
class Trajectory:
    """Timed piecewise-linear path. Validity is checked by validate_trajectory."""

    breakpoints: tuple[Breakpoint, ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "breakpoints",
            tuple(Breakpoint(float(t), Point2(float(p[0]), float(p[1]))) for t, p in self.breakpoints),
        )

    @property
    def end_time(self) -> float:
        return self.breakpoints[-1].time

    @property
    def end(self) -> Point2:
        return self.breakpoints[-1].position


class SpeedViolation(NamedTuple):
    segment: int
    speed: float
    v_max: float


def _check_monotone(traj: Trajectory) -> None:
    bps = traj.breakpoints
    if not bps:
        raise MalformedTrajectoryError("trajectory has no breakpoints")
    for k in range(len(bps) - 1):
        if not bps[k + 1].time > bps[k].time:
            raise MalformedTrajectoryError(
                f"breakpoint times must be strictly increasing (segment {k}: "
                f"{bps[k].time} -> {bps[k + 1].time})"
            )


def trajectory_position(traj: Trajectory, t: float) -> Point2:
    bps = traj.breakpoints
    if not bps:
        raise MalformedTrajectoryError("trajectory has no breakpoints")
    t0, tn = bps[0].time, bps[-1].time
    if t < t0 or t > tn or math.isnan(t):
        raise OutOfRangeError(f"t={t} outside [{t0}, {tn}]")
    lo, hi = 0, len(bps) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if bps[mid].time <= t:
            lo = mid
        else:
            hi = mid
    if lo == hi or t == bps[lo].time:
        return bps[lo].position
    (ta, pa), (tb, pb) = bps[lo], bps[hi]
    if t >= tb:
        return pb
    f = (t - ta) / (tb - ta)
    return Point2(pa.x + f * (pb.x - pa.x), pa.y + f * (pb.y - pa.y))


def validate_trajectory(traj: Trajectory, v_max: float) -> Optional[SpeedViolation]:
    """Return None if every segment respects v_max, else the first violation."""
    _check_monotone(traj)
    bps = traj.breakpoints
    for k in range(len(bps) - 1):
        (ta, pa), (tb, pb) = bps[k], bps[k + 1]
        dt = tb - ta
        step = dist(pa, pb)
        # Relative slack plus a few ulps of the stored times and coordinates,
        # so very short segments far from the origin are not flagged for rounding.
        t_ulp = 4.0 * math.ulp(max(1.0, abs(tb)))
        p_ulp = 4.0 * math.ulp(max(1.0, abs(pa[0]), abs(pa[1]), abs(pb[0]), abs(pb[1])))
        if step > v_max * (dt * (1.0 + REL_TOL) + t_ulp) + p_ulp:
            return SpeedViolation(k, step / dt, v_max)
    return None


# ---------------------------------------------------------------- outcomes


class EventKind(str, enum.Enum):
    ARRIVE_SOURCE = "ArriveSource"
    COLLOCATE = "Collocate"
    BOMB_PICKUP = "BombPickup"
    BOMB_SET_DOWN = "BombSetDown"
    BOUNDARY_DISCOVERY = "BoundaryDiscovery"
    DELIVERY = "Delivery"


class Event(NamedTuple):
    time: float
    kind: EventKind
    position: Point2
    robot: Optional[int]

    def to_dict(self) -> dict:
        return {"t": self.time, "kind": self.kind.value, "robot": self.robot,
                "x": self.position.x, "y": self.position.y}


@dataclass(frozen=True)
class DeliveryOutcome:
    delivery_time: float
    events: tuple[Event, ...]
    robot_trajectories: tuple[Trajectory, Trajectory]
    bomb_trajectory: Trajectory

    def events_of(self, kind: EventKind) -> list[Event]:
        return [e for e in self.events if e.kind is kind]


def check_outcome(outcome: DeliveryOutcome, inst: Instance) -> list[str]:
    """Return a list of invariant violations (empty when the outcome is sound)."""
    problems = []
    D = inst.critical_distance
    for i, traj in enumerate(outcome.robot_trajectories):
        try:
            bad = validate_trajectory(traj, inst.robots[i].speed)
        except MalformedTrajectoryError as exc:
            problems.append(f"robot {i}: {exc}")
            continue
        if bad is not None:
            problems.append(f"robot {i}: speed violation {bad}")
    bomb = outcome.bomb_trajectory
    try:
        bad = validate_trajectory(bomb, inst.v_max)
        if bad is not None:
            problems.append(f"bomb: speed violation {bad}")
    except MalformedTrajectoryError as exc:
        problems.append(f"bomb: {exc}")
    if norm(bomb.breakpoints[0].position) > tol(0.0):
        problems.append("bomb does not start at the source")
    if abs(norm(bomb.end) - D) > tol(D):
        problems.append(f"bomb ends at distance {norm(bomb.end)}, expected {D}")
    deliveries = outcome.events_of(EventKind.DELIVERY)
    if len(deliveries) != 1:
        problems.append(f"expected one delivery event, got {len(deliveries)}")
    elif abs(norm(deliveries[0].position) - D) > tol(D):
        problems.append("delivery position is not on the boundary")
    times = [e.time for e in outcome.events]
    if any(b < a for a, b in zip(times, times[1:])):
        problems.append("event times decrease")
    return problems
