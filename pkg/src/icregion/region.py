"""Union-of-rectangles rate regions and their time-sharing frontier."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .channel import ChannelParams
from .infodensity import DEFAULT_BLOCKS, DEFAULT_SECTIONS, estimate_mi_rate
from .quadrature import noise_model_mi
from .trellis import GeneratorMatrix, Trellis, build_conv_trellis, build_iud_trellis

AXIS1 = "axis1"
AXIS2 = "axis2"


@dataclass(frozen=True)
class Rectangle:
    """The rectangle ``[0, r1] x [0, r2]``, identified by its corner."""

    r1: float
    r2: float
    label: str = ""
    r1_stderr: float = 0.0
    r2_stderr: float = 0.0

    def __post_init__(self):
        for v in (self.r1, self.r2):
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"rectangle corner must be finite and nonnegative, got {v}")

    @property
    def corner(self) -> tuple[float, float]:
        return (self.r1, self.r2)


def _cross(o, a, b) -> Fraction:
    # exact: float products of tiny coordinates underflow to zero and would
    # make a genuine turn look collinear
    o, a, b = ([Fraction(v) for v in p] for p in (o, a, b))
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _dominated(p, q) -> bool:
    """True when corner ``p`` lies inside the rectangle of ``q``."""
    return p[0] <= q[0] and p[1] <= q[1]


@dataclass(frozen=True)
class RateRegion:
    rectangles: tuple[Rectangle, ...]
    frontier: tuple[Rectangle, ...]
    staircase: tuple[Rectangle, ...]

    def contains(self, q1: float, q2: float, tol: float = 1e-12) -> bool:
        """Membership in the time-sharing closure of the union."""
        if q1 < -tol or q2 < -tol:
            return False
        pts = self.frontier
        if q1 > pts[-1].r1 + tol:
            return False
        best = 0.0
        for a, b in zip(pts, pts[1:]):
            if a.r1 - tol <= q1 <= b.r1 + tol:
                if b.r1 - a.r1 <= 0:
                    best = max(best, a.r2, b.r2)
                else:
                    t = min(max((q1 - a.r1) / (b.r1 - a.r1), 0.0), 1.0)
                    best = max(best, a.r2 + t * (b.r2 - a.r2))
        if len(pts) == 1:
            best = pts[0].r2
        return q2 <= best + tol

    def in_union(self, q1: float, q2: float) -> bool:
        """Membership in the plain union of rectangles (no time sharing)."""
        return q1 >= 0 and q2 >= 0 and any(_dominated((q1, q2), r.corner) for r in self.rectangles)


def assemble(corners) -> RateRegion:
    """Union of the rectangles plus the convex frontier reachable by time sharing.

    The frontier runs from ``(0, max r2)`` to ``(max r1, 0)`` through the
    upper-right convex hull of the corners; collinear and dominated points
    are dropped. Vertices are sorted by r1; coincident corners keep the
    lexicographically smallest label.
    """
    rects = tuple(corners)
    if not rects:
        raise ValueError("at least one rectangle is required")
    r1max = max(r.r1 for r in rects)
    r2max = max(r.r2 for r in rects)

    by_point: dict[tuple[float, float], Rectangle] = {}
    for r in sorted(rects, key=lambda r: r.label):
        by_point.setdefault(r.corner, r)
    by_point.setdefault((0.0, r2max), Rectangle(0.0, r2max, AXIS2))
    by_point.setdefault((r1max, 0.0), Rectangle(r1max, 0.0, AXIS1))

    pts = sorted(by_point, key=lambda p: (p[0], -p[1]))
    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)
    frontier = tuple(by_point[p] for p in hull)

    stairs = [p for p in by_point
              if by_point[p].label not in (AXIS1, AXIS2)
              and not any(q != p and _dominated(p, q) for q in by_point)]
    staircase = tuple(by_point[p] for p in sorted(stairs))
    return RateRegion(rects, frontier, staircase)


def point_c(params: ChannelParams) -> Rectangle:
    """Both users treat the interference as i.u.d. BPSK noise."""
    return Rectangle(noise_model_mi(params, 1), noise_model_mi(params, 2), "C")


def _corner(label: str, t1: Trellis, t2: Trellis, params, n_sections, blocks, seed, workers):
    e1 = estimate_mi_rate(t1, t2, params, 1, n_sections, blocks, seed=seed, workers=workers)
    e2 = estimate_mi_rate(t1, t2, params, 2, n_sections, blocks, seed=seed, workers=workers)
    return Rectangle(max(e1.value, 0.0), max(e2.value, 0.0), label, e1.std_error, e2.std_error)


def point_a_b(params: ChannelParams, n_sections: int = DEFAULT_SECTIONS,
              blocks: int = DEFAULT_BLOCKS, *, seed: int, workers: int = 1,
              coded: Trellis | None = None, uncoded: Trellis | None = None):
    """Corners A (sender 1 coded, sender 2 uncoded) and B (mirrored).

    Defaults are the ``[1+D+D^2, 1+D^2]`` convolutional code and i.u.d. BPSK.
    A negative Monte Carlo estimate is clipped to 0; its standard error is kept.
    """
    coded = coded or build_conv_trellis(GeneratorMatrix.from_octal("7,5"))
    uncoded = uncoded or build_iud_trellis(1)
    a = _corner("A", coded, uncoded, params, n_sections, blocks, seed, workers)
    b = _corner("B", uncoded, coded, params, n_sections, blocks, seed, workers)
    return a, b
