"""Competitive ratios, adversarial instance search and analytic bound curves."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    Axis,
    Boundary,
    BranchError,
    ConfigurationError,
    Instance,
    KnowledgeConfig,
    Point2,
    RobotSpec,
    EVENT_EPS,
)
from .offline import offline_optimal_time
from .strategies import A_STAR, ZigzagStrategy, run

SQRT2 = math.sqrt(2.0)

# Knowledge model each algorithm is searched under.
SEARCH_MODEL = {
    "offline": (Axis.NONE, Boundary.VISIBLE),
    "one-axis": (Axis.ONE, Boundary.VISIBLE),
    "visible-wait": (Axis.NONE, Boundary.VISIBLE),
    "discoverable": (Axis.NONE, Boundary.DISCOVERABLE),
    "invisible-zigzag": (Axis.NONE, Boundary.INVISIBLE),
    "generic-zigzag": (Axis.NONE, Boundary.INVISIBLE),
}


def competitive_ratio(inst: Instance, alg: str, params: Optional[dict] = None) -> float:
    """Simulated delivery time divided by the offline optimum."""
    return run(inst, alg, params).delivery_time / offline_optimal_time(inst)


# ---------------------------------------------------------------- search domain


@dataclass(frozen=True)
class SearchDomain:
    d1: tuple[float, float] = (0.0, 5.0)
    d2: tuple[float, float] = (0.0, 5.0)
    v_slow: tuple[float, float] = (0.05, 1.0)
    D: tuple[float, float] = (1.0, 1.0)
    grid: int = 25
    levels: int = 4

    def __post_init__(self):
        for name in ("d1", "d2", "v_slow", "D"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
                raise ConfigurationError(f"{name}: invalid range [{lo}, {hi}]")
        if self.d1[0] < 0 or self.d2[0] < 0:
            raise ConfigurationError("distances must be non-negative")
        if self.v_slow[0] <= 0 or self.v_slow[1] > 1:
            raise ConfigurationError("v_slow must lie in (0, 1]")
        if self.D[0] <= 0:
            raise ConfigurationError("D must be positive")
        if self.grid < 25:
            raise ConfigurationError(f"grid: need at least 25 points per axis, got {self.grid}")
        if self.levels < 0:
            raise ConfigurationError("levels must be non-negative")

    @property
    def ranges(self) -> list[tuple[float, float]]:
        return [self.d1, self.d2, self.v_slow, self.D]

    @classmethod
    def from_dict(cls, doc: dict, base: Optional["SearchDomain"] = None) -> "SearchDomain":
        base = base or cls()
        kw = {}
        for name in ("d1", "d2", "v_slow", "D"):
            if name in doc:
                val = doc[name]
                if not (isinstance(val, (list, tuple)) and len(val) == 2):
                    raise ConfigurationError(f"{name}: expected [lo, hi]")
                kw[name] = (float(val[0]), float(val[1]))
            else:
                kw[name] = getattr(base, name)
        kw["grid"] = int(doc.get("grid", base.grid))
        kw["levels"] = int(doc.get("levels", base.levels))
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str, base: Optional["SearchDomain"] = None) -> "SearchDomain":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"domain: invalid JSON ({exc})") from None
        if not isinstance(doc, dict):
            raise ConfigurationError("domain: expected a JSON object")
        return cls.from_dict(doc, base)


def default_domain(alg: str, Dmax: float = 180.0) -> SearchDomain:
    if alg == "invisible-zigzag":
        return SearchDomain(d1=(0.0, 200.0), d2=(0.0, 200.0), v_slow=(0.05, 1.0), D=(1.0, Dmax))
    return SearchDomain()


def canonical_instance(alg: str, d1: float, d2: float, v_slow: float, D: float = 1.0) -> Instance:
    axis, boundary = SEARCH_MODEL[alg]
    return Instance.from_distances(d1, d2, v_slow, 1.0, D, axis, boundary)


@dataclass
class SearchResult:
    best_instance: Instance
    best_ratio: float
    evaluations: int
    refinement_trace: list = field(default_factory=list)
    best_params: tuple = ()


# ---------------------------------------------------------------- vectorized closed forms
#
# Canonical placement: slow robot 0 at (0, -d1) with speed v <= 1, fast robot 1
# at (-d2, 0) with speed 1. Neither start is on the +x ray, so every case is
# covered. These mirror the scalar closed forms in strategies and are checked
# against them in the test suite.


def _grid_offline(d1, d2, v, D):
    return np.minimum(np.minimum((d1 + D) / v, d2 + D), (D - d2) + 2.0 * (d1 + d2) / (v + 1.0))


def _grid_oneaxis(d1, d2, v, D):
    t_s, t_f = d1 / v, d2
    alone = t_s + D / v
    with np.errstate(divide="ignore", invalid="ignore"):
        t_c = (t_f - v * t_s) / (1.0 - v)
        p = v * (t_c - t_s)
        catch = (v < 1.0) & (p < D)
        late = np.where(catch, t_c + (D - p), alone)
    return np.where(t_f <= t_s, t_f + D, late)


def _grid_visible(d1, d2, v, D):
    a0, a1 = d1 / v, d2
    first0 = a0 <= a1
    a_first = np.where(first0, a0, a1)
    a_other = np.where(first0, a1, a0)
    v_first = np.where(first0, v, 1.0)
    return np.where(a_other <= a_first + D / v_first, a_other + D, a_first + 2.0 * D / v_first)


def _grid_discoverable(d1, d2, v, D):
    a0, a1 = d1 / v, d2
    reach = D - EVENT_EPS * np.maximum(1.0, D)
    out0, out1 = d1 >= reach, d2 >= reach
    w0, w1 = a0 + D / v, a1 + D
    inf0 = out0 | (out1 & (a1 <= a0) & (a0 <= w1))
    inf1 = out1 | (out0 & (a0 <= a1) & (a1 <= w0))
    c0 = np.where(inf0, w0, a0 + 2.0 * D / v)
    c1 = np.where(inf1, w1, a1 + 2.0 * D)
    pick0 = (c0 < c1) | ((c0 == c1) & (inf0 <= inf1))
    return np.where(pick0, c0 + D / v, c1 + D)


def _grid_invisible(d1, d2, v, D, a=A_STAR):
    a0, a1 = d1 / v, d2
    first0 = a0 <= a1
    a_first = np.where(first0, a0, a1)
    a_other = np.where(first0, a1, a0)
    v_first = np.where(first0, v, 1.0)
    E = a_first + 2.0 / v_first
    reach = D - EVENT_EPS * np.maximum(1.0, D)
    result = np.where(a_other <= E, a_other + D, np.nan)
    partial = np.zeros_like(result)
    j = 0
    while np.isnan(result).any():
        x = a ** j
        pending = np.isnan(result)
        solo = pending & (x >= reach)
        result = np.where(solo, E + (2.0 * partial + D) / v_first, result)
        partial = partial + x
        R = E + 2.0 * partial / v_first
        met = np.isnan(result) & (R >= a_other)
        result = np.where(met, R + D, result)
        j += 1
    return result


_GRID_TIMES = {
    "offline": _grid_offline,
    "one-axis": _grid_oneaxis,
    "visible-wait": _grid_visible,
    "discoverable": _grid_discoverable,
    "invisible-zigzag": _grid_invisible,
}


def grid_ratios(alg: str, d1, d2, v, D, params: Optional[dict] = None) -> np.ndarray:
    """Closed-form competitive ratios for canonical instances (broadcast arrays)."""
    d1, d2, v, D = (np.asarray(x, dtype=float) for x in (d1, d2, v, D))
    params = params or {}
    fn = _GRID_TIMES.get(alg)
    if fn is None:
        out = np.empty(np.broadcast(d1, d2, v, D).shape)
        for idx in np.ndindex(out.shape):
            b = np.broadcast_arrays(d1, d2, v, D)
            out[idx] = competitive_ratio(canonical_instance(alg, *(float(x[idx]) for x in b)), alg, params)
        return out
    if alg == "invisible-zigzag":
        T = fn(d1, d2, v, D, params.get("a", A_STAR))
    else:
        T = fn(d1, d2, v, D)
    return T / _grid_offline(d1, d2, v, D)


def _eval_chunk(args):
    alg, axes, params = args
    mesh = np.meshgrid(*axes, indexing="ij")
    return grid_ratios(alg, *mesh, params=params).ravel()


def _evaluate(alg, axes, params, jobs) -> np.ndarray:
    if jobs <= 1 or len(axes[0]) < 2 * jobs:
        return _eval_chunk((alg, axes, params))
    chunks = np.array_split(axes[0], jobs)
    tasks = [(alg, [c] + list(axes[1:]), params) for c in chunks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_eval_chunk, tasks))
    return np.concatenate(parts)


def _level_axes(domain: SearchDomain, level: int, center: Optional[Sequence[float]]) -> list[np.ndarray]:
    n = domain.grid
    axes = []
    for k, (lo, hi) in enumerate(domain.ranges):
        if hi == lo:
            axes.append(np.array([lo]))
            continue
        if level == 0:
            pts = np.linspace(lo, hi, n)
        else:
            width = (hi - lo) * 0.2 ** level
            a = min(max(center[k] - width / 2, lo), hi - width)
            pts = np.linspace(a, a + width, n)
            pts = np.append(pts, center[k])
        if k == 0:
            pts = np.append(pts, lo)  # keep the d1 = lo face in every level
        axes.append(np.unique(pts))
    return axes


def adversarial_search(alg: str, domain: Optional[SearchDomain] = None, budget: Optional[int] = None,
                       jobs: int = 1, params: Optional[dict] = None) -> SearchResult:
    """Multiresolution grid search for the instance maximizing the competitive ratio.

    Level 0 is a uniform grid over the domain. Every further level places the
    same number of points per axis in a box 0.2 times the previous side,
    centred on the incumbent. Grid points are scored with closed forms; each
    level's argmax is re-scored by simulation and replaces the incumbent only if
    it is strictly better, so the incumbent ratio never decreases.
    """
    domain = domain or default_domain(alg)
    params = params or {}
    sizes0 = np.prod([len(x) for x in _level_axes(domain, 0, None)])
    if budget is None:
        budget = int(sizes0) * (domain.levels + 1) * 2
    if budget < sizes0:
        raise ConfigurationError(f"budget {budget} is smaller than one level-0 grid ({sizes0} points)")

    evaluations = 0
    best_params = None
    best_ratio = -math.inf
    trace = []
    for level in range(domain.levels + 1):
        axes = _level_axes(domain, level, best_params)
        size = int(np.prod([len(x) for x in axes]))
        if evaluations + size > budget:
            break
        ratios = _evaluate(alg, axes, params, jobs)
        evaluations += size
        ratios = np.where(np.isfinite(ratios), ratios, -math.inf)
        i = int(np.argmax(ratios))  # first maximum = lexicographically smallest parameters
        idx = np.unravel_index(i, [len(x) for x in axes])
        cand = tuple(float(axes[k][idx[k]]) for k in range(4))
        r = competitive_ratio(canonical_instance(alg, *cand), alg, params)
        evaluations += 1
        if r > best_ratio:
            best_ratio, best_params = r, cand
        trace.append((level, best_params, best_ratio))
    inst = canonical_instance(alg, *best_params)
    return SearchResult(inst, best_ratio, evaluations, trace, best_params)


# ---------------------------------------------------------------- one-dimensional optimizers


def ternary_search(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10,
                   maximize: bool = False) -> float:
    """Argmin (or argmax) of a unimodal function on [lo, hi]."""
    sign = -1.0 if maximize else 1.0
    while hi - lo > tol:
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if sign * f(m1) < sign * f(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def curve_maximum(f: Callable[[float], float], lo: float, hi: float, n: int = 2001,
                  tol: float = 1e-10) -> tuple[float, float]:
    """Global max on [lo, hi]: dense grid, then ternary search around the best cell."""
    xs = np.linspace(lo, hi, n)
    ys = [f(float(x)) for x in xs]
    k = int(np.argmax(ys))
    a, b = float(xs[max(k - 1, 0)]), float(xs[min(k + 1, n - 1)])
    x = ternary_search(f, a, b, tol, maximize=True)
    return x, f(x)


# ---------------------------------------------------------------- bound curves


def oneaxis_offline_curve(x: float) -> float:
    """Offline time with the slow robot at the source and the fast robot at distance x (worst slow speed)."""
    return (x * x + x + 2.0) / (x + 2.0)


def oneaxis_lower_curve(x: float) -> float:
    if x < 0:
        raise ValueError("x must be non-negative")
    return (x + 1.0 / math.sqrt(1.0 + 1.0 / (1.0 + x) ** 2)) / oneaxis_offline_curve(x)


def oneaxis_nocoop_curve(x: float) -> float:
    if x < 0:
        raise ValueError("x must be non-negative")
    return (1.0 + x) / oneaxis_offline_curve(x)


def visible_lower_family(t: float, epsilon: Optional[float] = None,
                         branch: Optional[str] = None) -> tuple[Instance, float]:
    """Adversarial instance against a robot that waits t at the source, then leaves alone.

    Robot 0 holds the bomb at the source with speed 1 and D = 1. For
    t > 1/sqrt(2) the other robot is placed so that it arrives just after the
    wait; the ratio is the lone delivery time t + 1 over the cooperative
    handoff time of the instance. For t <= 1/sqrt(2) a very fast robot arrives
    at t + epsilon/2 and could have finished by t + epsilon.
    """
    cut = 1.0 / SQRT2
    if branch is None:
        branch = "closed" if t > cut else "epsilon"
    if branch == "closed":
        if not t > cut:
            raise BranchError(f"closed-form branch needs t > 1/sqrt(2), got t={t}")
        v = ((2.0 + SQRT2) * t - SQRT2) / (2.0 * SQRT2 * t - 2.0)
        d2 = (-t * v * v - t * v - v * v + SQRT2 * v + SQRT2 + 1.0) / (-SQRT2 * v - v + SQRT2 + 1.0)
        handoff = (1.0 - d2) / v + 2.0 * d2 / (1.0 + v)
        ratio = (t + 1.0) / handoff
    elif branch == "epsilon":
        if epsilon is None or not epsilon > 0:
            raise BranchError("the small-t branch needs epsilon > 0")
        v = 2.0 / epsilon
        d2 = 1.0 + 2.0 * t / epsilon
        ratio = (t + 1.0) / (t + epsilon)
    else:
        raise BranchError(f"unknown branch {branch!r}")
    inst = Instance(1.0, (RobotSpec(Point2(0.0, 0.0), 1.0), RobotSpec(Point2(-d2, 0.0), v)),
                    KnowledgeConfig(Axis.NONE, Boundary.VISIBLE))
    return inst, ratio


def discoverable_family_formula(eps: float) -> float:
    return 3.0 + (9.0 - 18.0 * eps) / (12.0 - 10.0 * eps + 4.0 * eps * eps)


def discoverable_lower_family(eps: float) -> tuple[Instance, float]:
    """Slow robot at the source just fast enough to finish exploring before the fast one."""
    if not 0.0 < eps < 0.1:
        raise ValueError("epsilon must lie in (0, 0.1)")
    inst = Instance.from_distances(0.0, 1.0 - eps, 2.0 / (3.0 - 2.0 * eps), 1.0, 1.0,
                                   Axis.NONE, Boundary.DISCOVERABLE)
    return inst, competitive_ratio(inst, "discoverable")


def zigzag_cr(X: ZigzagStrategy, k_max: int = 60) -> float:
    """3 + 2 max_k (x_1 + ... + x_{k-1}) / x_k over k <= k_max; math.inf if it diverges."""
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    best = 0.0
    partial = 0.0
    history = []
    for k in range(1, k_max + 1):
        x = X.turning_distance(k)
        if x is None:
            break
        best = max(best, partial / x)
        history.append(best)
        partial += x
    if X.a is None and len(history) >= 4:
        tail = max(1, len(history) // 4)
        if history[-1] - history[-1 - tail] > 1e-9:
            return math.inf
    return 3.0 + 2.0 * best


def expansion_objective(a: float) -> float:
    return max(2.0 * a / (a - 1.0) + 1.0, 2.0 * a + 2.0)


def optimize_expansion_factor(a_lo: float = 1.01, a_hi: float = 10.0, tol: float = 1e-9) -> tuple[float, float]:
    if not 1.0 < a_lo < a_hi:
        raise ValueError("need 1 < a_lo < a_hi")
    a = ternary_search(expansion_objective, a_lo, a_hi, tol)
    return a, expansion_objective(a)


def invisible_lower_objective(alpha: float) -> float:
    return max(3.0 + 2.0 * alpha, 1.0 + 2.0 / alpha)


def invisible_lower_bound(alpha_grid: Optional[Sequence[float]] = None, tol: float = 1e-12) -> tuple[float, float]:
    """Minimize max(3 + 2a, 1 + 2/a) over a in (0, 1): grid, then bisection on the crossing."""
    grid = np.linspace(0.01, 0.99, 99) if alpha_grid is None else np.asarray(alpha_grid, dtype=float)
    if grid.size == 0 or grid.min() <= 0 or grid.max() >= 1:
        raise ValueError("alpha grid must lie inside (0, 1)")
    grid = np.sort(grid)
    vals = [invisible_lower_objective(float(a)) for a in grid]
    k = int(np.argmin(vals))
    lo = float(grid[k - 1]) if k > 0 else float(grid[0]) / 2
    hi = float(grid[k + 1]) if k + 1 < grid.size else (float(grid[-1]) + 1.0) / 2
    gap = lambda a: (3.0 + 2.0 * a) - (1.0 + 2.0 / a)  # increasing in a
    if gap(lo) > 0 or gap(hi) < 0:
        return float(grid[k]), vals[k]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    return a, invisible_lower_objective(a)


# ---------------------------------------------------------------- reference bounds


@dataclass(frozen=True)
class BoundRow:
    axis: str
    boundary: str
    kind: str
    computed: float
    reference: float
    exact: Optional[float]
    source: str

    @property
    def difference(self) -> float:
        return abs(self.computed - self.reference)


def bound_rows() -> list[BoundRow]:
    """Recompute every upper/lower bound from its evaluator."""
    rows = []
    _, up = curve_maximum(oneaxis_nocoop_curve, 0.0, 10.0)
    rows.append(BoundRow("one", "all", "upper", up, (5 + 4 * SQRT2) / 7, (5 + 4 * SQRT2) / 7,
                         "max of no-cooperation curve"))
    _, lo = curve_maximum(oneaxis_lower_curve, 0.0, 10.0)
    rows.append(BoundRow("one", "all", "lower", lo, 1.48102, None, "max of lower curve"))

    v1 = SQRT2 - 1.0
    # Arrive just outside the collocation tolerance after the wait ends.
    edge = Instance.from_distances(0.0, 1.0 / v1 + 1.5e-9, v1, 1.0, 1.0)
    rows.append(BoundRow("none", "visible", "upper", competitive_ratio(edge, "visible-wait"),
                         1 + SQRT2, 1 + SQRT2, "wait-at-source just past the window"))
    _, vl = visible_lower_family(1.2)
    rows.append(BoundRow("none", "visible", "lower", vl, 1 + SQRT2, 1 + SQRT2, "waiting-time family, t=1.2"))

    _, du = discoverable_lower_family(1e-10)
    rows.append(BoundRow("none", "discoverable", "upper", du, 15 / 4, 15 / 4, "exploration family, eps=1e-10"))
    lone = Instance(1.0, (RobotSpec(Point2(0.0, -1e6), 1e-6), RobotSpec(Point2(0.0, 0.0), 1.0)),
                    KnowledgeConfig(Axis.NONE, Boundary.DISCOVERABLE))
    rows.append(BoundRow("none", "discoverable", "lower", competitive_ratio(lone, "discoverable"), 3.0, 3.0,
                         "fast robot alone at the source"))

    _, iu = optimize_expansion_factor()
    rows.append(BoundRow("none", "invisible", "upper", iu, (7 + math.sqrt(17)) / 2, (7 + math.sqrt(17)) / 2,
                         "optimal expansion factor"))
    _, il = invisible_lower_bound()
    rows.append(BoundRow("none", "invisible", "lower", il, 2 + math.sqrt(5), 2 + math.sqrt(5),
                         "min over alpha of max(3+2a, 1+2/a)"))
    return rows


def default_jobs() -> int:
    return max(1, os.cpu_count() or 1)
