"""Workspace, static obstacles and collision queries.

The workspace is [0, width] x [-band, height + band]: the core map carries
the obstacles, the two bands above and below are obstacle-free margins used
by benchmark layouts for start/goal rows.  All overlap tests are closed
(touching counts); leaving the workspace counts as a collision.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .model import footprint


@dataclass(frozen=True)
class CircleObstacle:
    cx: float
    cy: float
    radius: float

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError("circle obstacle needs a positive radius")

    def contains_point(self, x, y):
        dx = x - self.cx
        dy = y - self.cy
        return dx * dx + dy * dy <= self.radius * self.radius


@dataclass(frozen=True)
class RectObstacle:
    """Oriented rectangular obstacle given by its 4 corners (CCW convex)."""

    corners: tuple  # ((x, y) * 4)

    def __post_init__(self):
        if len(self.corners) != 4:
            raise ValueError("rectangle obstacle needs exactly 4 corners")

    def flat(self):
        (x0, y0), (x1, y1), (x2, y2), (x3, y3) = self.corners
        return (x0, y0, x1, y1, x2, y2, x3, y3)

    def contains_point(self, x, y):
        pts = self.corners
        sign = 0
        for k in range(4):
            ax, ay = pts[k]
            bx, by = pts[(k + 1) % 4]
            cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
            if cross > 0:
                if sign < 0:
                    return False
                sign = 1
            elif cross < 0:
                if sign > 0:
                    return False
                sign = -1
        return True


_EMPTY_RECTS = np.empty((0, 8), dtype=np.float64)


@dataclass
class World:
    """Static planning workspace."""

    width: float
    height: float
    obstacles: list = field(default_factory=list)
    band_expansion: float = 0.0

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("workspace dimensions must be positive")
        if self.band_expansion < 0:
            raise ValueError("band expansion cannot be negative")
        self._rebuild_arrays()
        self._heuristic_cache = {}

    def _rebuild_arrays(self):
        circles = [(o.cx, o.cy, o.radius) for o in self.obstacles if isinstance(o, CircleObstacle)]
        rects = [o.flat() for o in self.obstacles if isinstance(o, RectObstacle)]
        self.circles = np.array(circles, dtype=np.float64) if circles else np.empty((0, 3), dtype=np.float64)
        self.rects = np.array(rects, dtype=np.float64) if rects else _EMPTY_RECTS

    @property
    def bounds(self):
        """(xmin, xmax, ymin, ymax) of the workspace including the bands."""
        return (0.0, self.width, -self.band_expansion, self.height + self.band_expansion)

    def contains_obstacles(self):
        """True if every obstacle lies inside the core [0,w] x [0,h] map."""
        for o in self.obstacles:
            if isinstance(o, CircleObstacle):
                if not (0 <= o.cx - o.radius and o.cx + o.radius <= self.width):
                    return False
                if not (0 <= o.cy - o.radius and o.cy + o.radius <= self.height):
                    return False
            else:
                for x, y in o.corners:
                    if not (0 <= x <= self.width and 0 <= y <= self.height):
                        return False
        return True

    def point_in_obstacle(self, x, y):
        for o in self.obstacles:
            if o.contains_point(x, y):
                return True
        return False


def collides_static(fp, world):
    """True iff the footprint (corner array/tuple) hits an obstacle or exits
    the workspace bounds (bands included)."""
    corners = np.asarray(fp, dtype=float).reshape(-1)
    xmin, xmax, ymin, ymax = world.bounds
    for k in range(0, 8, 2):
        if corners[k] < xmin or corners[k] > xmax or corners[k + 1] < ymin or corners[k + 1] > ymax:
            return True
    flat = tuple(corners)
    for row in world.circles:
        if kernels.rect_circle_overlap(flat, row[0], row[1], row[2]):
            return True
    for i in range(world.rects.shape[0]):
        if kernels.rects_overlap(flat, tuple(world.rects[i])):
            return True
    return False


def bodies_overlap(s1, spec1, s2, spec2, inflation=0.0):
    """Closed overlap test between two agents' body rectangles."""
    return kernels.poses_overlap(
        s1.x,
        s1.y,
        s1.yaw,
        spec1.front_overhang + inflation,
        spec1.rear_overhang + inflation,
        spec1.half_width + inflation,
        s2.x,
        s2.y,
        s2.yaw,
        spec2.front_overhang + inflation,
        spec2.rear_overhang + inflation,
        spec2.half_width + inflation,
    )


@dataclass(frozen=True)
class BodyGeometry:
    """Collision geometry handed to the kernels (spec plus safety inflation)."""

    front: float
    rear: float
    half_w: float
    circ_r: float

    @classmethod
    def of(cls, spec, inflation=0.0):
        front = spec.front_overhang + inflation
        rear = spec.rear_overhang + inflation
        half_w = spec.half_width + inflation
        return cls(front, rear, half_w, math.hypot(max(front, rear), half_w))


def pose_blocked_static(state, geom, world):
    """Kernel-backed static check for a single pose."""
    xmin, xmax, ymin, ymax = world.bounds
    return kernels.pose_blocked(
        state.x,
        state.y,
        state.yaw,
        geom.front,
        geom.rear,
        geom.half_w,
        geom.circ_r,
        xmin,
        xmax,
        ymin,
        ymax,
        world.circles,
        world.rects,
        _EMPTY_RECTS,
    )


def state_collides(state, spec, world, inflation=0.0):
    """Convenience: footprint-vs-world collision for one state."""
    return collides_static(footprint(state, spec, inflation), world)
