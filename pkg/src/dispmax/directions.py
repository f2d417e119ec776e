"""Compact direction sets in [-1, 1], exact box counting, and interval covers.

A direction set is one of: a finite point list, a disjoint union of closed
intervals, or a finite-depth iterated-function-system Cantor set (m pieces,
contraction ratio r, expanded to its depth-d interval generation).  All
counting and covering reduces to a greedy left-to-right sweep over the
component intervals, which is optimal for covering a union of intervals on
the line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class DirectionSet:
    variant: str  # "points", "intervals", "cantor"
    components: tuple  # sorted (a, b) closed intervals; points have a == b
    spec: str = ""  # CLI spec string this set was parsed from, if any
    cantor_params: tuple | None = None  # (m, r, depth, anchor)

    def sample(self, per_component: int = 1) -> np.ndarray:
        """Equispaced samples, per_component per interval (midpoint if 1)."""
        out = []
        for a, b in self.components:
            if b - a == 0.0 or per_component == 1:
                out.append([(a + b) / 2.0])
            else:
                out.append(np.linspace(a, b, per_component))
        return np.unique(np.concatenate(out))

    @property
    def lo(self) -> float:
        return self.components[0][0]

    @property
    def hi(self) -> float:
        return self.components[-1][1]


def _validate_components(comps) -> tuple:
    comps = tuple((float(a), float(b)) for a, b in comps)
    if not comps:
        raise ValueError("direction set must be nonempty")
    for a, b in comps:
        if b < a:
            raise ValueError(f"interval [{a}, {b}] is reversed")
        if a < -1.0 - 1e-12 or b > 1.0 + 1e-12:
            raise ValueError(f"interval [{a}, {b}] escapes [-1, 1]")
    for (a0, b0), (a1, b1) in zip(comps, comps[1:]):
        if a1 <= b0:
            raise ValueError("components must be sorted and disjoint")
    return comps


def make_points(points) -> DirectionSet:
    pts = sorted(set(float(p) for p in points))
    comps = _validate_components((p, p) for p in pts)
    return DirectionSet("points", comps)


def make_intervals(intervals) -> DirectionSet:
    comps = _validate_components(sorted(tuple(iv) for iv in intervals))
    return DirectionSet("intervals", comps)


def make_cantor(m: int, r: float, depth: int, anchor=(0.0, 1.0)) -> DirectionSet:
    """IFS Cantor set: m equally spaced affine copies at ratio r, depth d."""
    if m < 2:
        raise ValueError("need at least 2 pieces")
    if not 0.0 < r <= 1.0 / m:
        raise ValueError(f"ratio must satisfy 0 < r <= 1/m, got r={r}, m={m}")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    a0, b0 = float(anchor[0]), float(anchor[1])
    if b0 <= a0:
        raise ValueError("anchor interval is degenerate or reversed")
    comps = [(a0, b0)]
    gap = (1.0 - r) / (m - 1)  # relative offset between consecutive piece starts
    for _ in range(depth):
        nxt = []
        for a, b in comps:
            length = b - a
            for i in range(m):
                start = a + i * gap * length
                nxt.append((start, start + r * length))
        comps = nxt
    # r = 1/m makes adjacent pieces touch; merge so components stay disjoint
    merged = []
    for a, b in sorted(comps):
        if merged and a <= merged[-1][1] + 1e-15:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    comps = _validate_components(merged)
    return DirectionSet("cantor", comps, cantor_params=(m, r, depth, (a0, b0)))


def parse_direction_spec(spec: str) -> DirectionSet:
    """Parse CLI spec strings: point:0 | points:a,b,... | interval:a,b | cantor:m,r,depth."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "point":
            ds = make_points([float(rest)])
        elif kind == "points":
            ds = make_points(float(v) for v in rest.split(","))
        elif kind == "interval":
            a, b = (float(v) for v in rest.split(","))
            ds = make_intervals([(a, b)])
        elif kind == "cantor":
            m, r, depth = rest.split(",")
            ds = make_cantor(int(m), float(r), int(depth))
        else:
            raise ValueError(f"unknown direction-set kind {kind!r}")
    except ValueError:
        raise
    except Exception as exc:  # malformed numbers, wrong arity
        raise ValueError(f"cannot parse direction spec {spec!r}: {exc}") from exc
    return DirectionSet(ds.variant, ds.components, spec=spec, cantor_params=ds.cantor_params)


@dataclass(frozen=True)
class CoverResult:
    intervals: tuple  # closed (left, right) covering intervals, left to right
    width: float
    count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "count", len(self.intervals))


def _greedy_cover(comps, width: float) -> tuple:
    """Minimal cover of a union of intervals by closed width-`width` intervals.

    Each cover interval starts at the leftmost point not yet covered; on the
    line this greedy sweep is optimal.
    """
    tol = width * 1e-9
    cover = []
    cursor = -np.inf  # everything <= cursor is covered
    for a, b in comps:
        while b > cursor + tol:
            start = max(a, cursor)
            cover.append((start, start + width))
            cursor = start + width
    return tuple(cover)


def box_count(theta: DirectionSet, delta: float) -> int:
    """Exact minimal number of closed delta-intervals covering the set."""
    if not 0.0 < delta <= 2.0:
        raise ValueError(f"delta must lie in (0, 2], got {delta}")
    return len(_greedy_cover(theta.components, delta))


def cover_set(theta: DirectionSet, lam: float, sigma: float) -> CoverResult:
    """Greedy minimal cover by closed intervals of width lambda^(-sigma)."""
    if not lam >= 2.0:
        raise ValueError("lambda must be >= 2")
    if not 0.25 <= sigma <= 1.0:
        raise ValueError(f"sigma must lie in [1/4, 1], got {sigma}")
    width = lam ** (-sigma)
    return CoverResult(_greedy_cover(theta.components, width), width)


def estimate_minkowski_dim(
    theta: DirectionSet, delta_min: float, delta_max: float, n_scales: int = 12
) -> tuple[float, float]:
    """Least-squares box-dimension slope over log-spaced scales.

    Returns (beta, fit_residual) where beta is the OLS slope of log N
    against log(1/delta) and fit_residual the RMS residual of the fit.
    """
    if not 0.0 < delta_min < delta_max <= 1.0:
        raise ValueError("need 0 < delta_min < delta_max <= 1")
    if n_scales < 4:
        raise ValueError("need at least 4 scales")
    deltas = np.exp(np.linspace(np.log(delta_max), np.log(delta_min), n_scales))
    counts = np.array([box_count(theta, d) for d in deltas], dtype=float)
    x = np.log(1.0 / deltas)
    y = np.log(counts)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), resid


def dimension_table(theta: DirectionSet, delta_min: float, delta_max: float, n_scales: int = 12):
    """(delta, count) rows backing the dimension fit, for CSV emission."""
    deltas = np.exp(np.linspace(np.log(delta_max), np.log(delta_min), n_scales))
    return [(float(d), box_count(theta, d)) for d in deltas]
