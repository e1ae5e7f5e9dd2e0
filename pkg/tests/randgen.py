"""Random instance generators shared by the test modules."""

import math
import random

from bombsquad.core import Axis, Boundary, Instance, KnowledgeConfig, Point2, RobotSpec, on_positive_axis

# Knowledge model each strategy is exercised under.
MODEL = {
    "offline": (Axis.NONE, Boundary.VISIBLE),
    "one-axis": (Axis.ONE, Boundary.VISIBLE),
    "visible-wait": (Axis.NONE, Boundary.VISIBLE),
    "discoverable": (Axis.NONE, Boundary.DISCOVERABLE),
    "invisible-zigzag": (Axis.NONE, Boundary.INVISIBLE),
    "generic-zigzag": (Axis.NONE, Boundary.INVISIBLE),
}
STRATEGIES = tuple(MODEL)


def random_robot(rng, d_max=5.0, v_lo=0.05, v_hi=1.0, at_source_prob=0.1):
    d = 0.0 if rng.random() < at_source_prob else rng.uniform(0.0, d_max)
    th = rng.uniform(0.0, 2 * math.pi)
    return RobotSpec(Point2(d * math.cos(th), d * math.sin(th)), rng.uniform(v_lo, v_hi))


def random_instance(rng, alg="offline", D_range=None):
    axis, boundary = MODEL[alg]
    if D_range is None:
        D_range = (1.0, 50.0) if boundary is Boundary.INVISIBLE else (0.2, 3.0)
    D = rng.uniform(*D_range)
    robots = (random_robot(rng), random_robot(rng))
    return Instance(D, robots, KnowledgeConfig(axis, boundary))


def covered(inst, alg):
    """Instances the closed forms handle (no +x-ray starts for the exploring strategies)."""
    if alg in ("discoverable", "invisible-zigzag"):
        return not any(on_positive_axis(r.start) for r in inst.robots)
    return True


def make_rng(seed):
    return random.Random(seed)
