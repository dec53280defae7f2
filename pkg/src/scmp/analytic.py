"""Minimum-turning-radius curve family between two poses.

Enumerates the classic forward/backward arc-and-segment solution words
(twelve base families and their time-flip/reflection symmetries), used for
analytic goal expansion in the searches and as the independent oracle for
the kernels' distance metric.

A word is a list of Segment(steering, gear, param): steering +1/0/-1 for
left/straight/right, gear +1/-1 for forward/backward, param >= 0 in
turning-radius units (arc angle for turns, scaled distance for straights).
"""

import math
from dataclasses import dataclass

from .model import ControlInput

_PI = math.pi
_HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class Segment:
    steering: int  # +1 left, 0 straight, -1 right
    gear: int  # +1 forward, -1 backward
    param: float  # >= 0, radius-1 units

    @classmethod
    def of(cls, param, steering, gear):
        """Normalize a signed parameter: driving a negative amount means the
        same steering with the gear reversed."""
        if param >= 0:
            return cls(steering, gear, param)
        return cls(steering, -gear, -param)


def _wrap(theta):
    theta = math.fmod(theta, 2.0 * _PI)
    if theta < -_PI:
        theta += 2.0 * _PI
    elif theta >= _PI:
        theta -= 2.0 * _PI
    return theta


def _polar(x, y):
    return math.hypot(x, y), math.atan2(y, x)


def _csc_same(x, y, phi):
    u, t = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    v = _wrap(phi - t)
    return [Segment.of(t, 1, 1), Segment.of(u, 0, 1), Segment.of(v, 1, 1)]


def _csc_opp(x, y, phi):
    rho, t1 = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho * rho < 4.0:
        return None
    u = math.sqrt(rho * rho - 4.0)
    t = _wrap(t1 + math.atan2(2.0, u))
    v = _wrap(t - phi)
    return [Segment.of(t, 1, 1), Segment.of(u, 0, 1), Segment.of(v, -1, 1)]


def _ccc(x, y, phi):
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho > 4.0:
        return None
    a = math.acos(rho / 4.0)
    t = _wrap(theta + _HALF_PI + a)
    u = _wrap(_PI - 2.0 * a)
    v = _wrap(phi - t - u)
    return [Segment.of(t, 1, 1), Segment.of(u, -1, -1), Segment.of(v, 1, 1)]


def _ccc_back(x, y, phi):
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho > 4.0:
        return None
    a = math.acos(rho / 4.0)
    t = _wrap(theta + _HALF_PI + a)
    u = _wrap(_PI - 2.0 * a)
    v = _wrap(t + u - phi)
    return [Segment.of(t, 1, 1), Segment.of(u, -1, -1), Segment.of(v, 1, -1)]


def _cc_c(x, y, phi):
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho > 4.0 or rho == 0.0:
        return None
    u = math.acos(1.0 - rho * rho / 8.0)
    arg = max(-1.0, min(1.0, 2.0 * math.sin(u) / rho))
    a = math.asin(arg)
    t = _wrap(theta + _HALF_PI - a)
    v = _wrap(t - u - phi)
    return [Segment.of(t, 1, 1), Segment.of(u, -1, 1), Segment.of(v, 1, -1)]


def _ccuc(x, y, phi):
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho > 4.0:
        return None
    if rho <= 2.0:
        a = math.acos((rho + 2.0) / 4.0)
        t = _wrap(theta + _HALF_PI + a)
        u = _wrap(a)
        v = _wrap(phi - t + 2.0 * u)
    else:
        a = math.acos((rho - 2.0) / 4.0)
        t = _wrap(theta + _HALF_PI - a)
        u = _wrap(_PI - a)
        v = _wrap(phi - t + 2.0 * u)
    return [Segment.of(t, 1, 1), Segment.of(u, -1, 1), Segment.of(u, 1, -1), Segment.of(v, -1, -1)]


def _c_cucu_c(x, y, phi):
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho > 6.0 or rho == 0.0:
        return None
    u1 = (20.0 - rho * rho) / 16.0
    if u1 < 0.0 or u1 > 1.0:
        return None
    u = math.acos(u1)
    arg = max(-1.0, min(1.0, 2.0 * math.sin(u) / rho))
    a = math.asin(arg)
    t = _wrap(theta + _HALF_PI + a)
    v = _wrap(t - phi)
    return [Segment.of(t, 1, 1), Segment.of(u, -1, -1), Segment.of(u, 1, -1), Segment.of(v, -1, 1)]


def _c_c90sc(x, y, phi):
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho < 2.0:
        return None
    u = math.sqrt(rho * rho - 4.0) - 2.0
    a = math.atan2(2.0, u + 2.0)
    t = _wrap(theta + _HALF_PI + a)
    v = _wrap(t - phi + _HALF_PI)
    return [
        Segment.of(t, 1, 1),
        Segment.of(_HALF_PI, -1, -1),
        Segment.of(u, 0, -1),
        Segment.of(v, 1, -1),
    ]


def _csc90_c(x, y, phi):
    rho, theta = _polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if rho < 2.0:
        return None
    u = math.sqrt(rho * rho - 4.0) - 2.0
    a = math.atan2(u + 2.0, 2.0)
    t = _wrap(theta + _HALF_PI - a)
    v = _wrap(t - phi - _HALF_PI)
    return [
        Segment.of(t, 1, 1),
        Segment.of(u, 0, 1),
        Segment.of(_HALF_PI, -1, 1),
        Segment.of(v, 1, -1),
    ]


def _c_c90sc_same(x, y, phi):
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho < 2.0:
        return None
    t = _wrap(theta + _HALF_PI)
    u = rho - 2.0
    v = _wrap(phi - t - _HALF_PI)
    return [
        Segment.of(t, 1, 1),
        Segment.of(_HALF_PI, -1, -1),
        Segment.of(u, 0, -1),
        Segment.of(v, -1, -1),
    ]


def _csc90_c_same(x, y, phi):
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho < 2.0:
        return None
    t = _wrap(theta)
    u = rho - 2.0
    v = _wrap(phi - t - _HALF_PI)
    return [
        Segment.of(t, 1, 1),
        Segment.of(u, 0, 1),
        Segment.of(_HALF_PI, 1, 1),
        Segment.of(v, -1, -1),
    ]


def _c_c90sc90_c(x, y, phi):
    rho, theta = _polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    if rho < 4.0:
        return None
    u = math.sqrt(rho * rho - 4.0) - 4.0
    a = math.atan2(2.0, u + 4.0)
    t = _wrap(theta + _HALF_PI + a)
    v = _wrap(t - phi)
    return [
        Segment.of(t, 1, 1),
        Segment.of(_HALF_PI, -1, -1),
        Segment.of(u, 0, -1),
        Segment.of(_HALF_PI, 1, -1),
        Segment.of(v, -1, 1),
    ]


_FAMILIES = (
    _csc_same,
    _csc_opp,
    _ccc,
    _ccc_back,
    _cc_c,
    _ccuc,
    _c_cucu_c,
    _c_c90sc,
    _csc90_c,
    _c_c90sc_same,
    _csc90_c_same,
    _c_c90sc90_c,
)


def _timeflip(word):
    return [Segment(s.steering, -s.gear, s.param) for s in word]


def _reflect(word):
    return [Segment(-s.steering, s.gear, s.param) for s in word]


def word_length(word):
    return sum(s.param for s in word)


def candidate_words(x, y, phi):
    """All solution words reaching (x, y, phi) in radius-1 units, shortest
    first.  Zero-length segments are dropped; the empty word is returned for
    a (near-)identity target."""
    if math.hypot(x, y) < 1e-12 and abs(_wrap(phi)) < 1e-12:
        return [[]]
    words = []
    for fam in _FAMILIES:
        for word in (
            fam(x, y, phi),
            _timeflip(fam(-x, y, -phi) or []) or None,
            _reflect(fam(x, -y, -phi) or []) or None,
            _reflect(_timeflip(fam(-x, -y, phi) or [])) or None,
        ):
            if word:
                trimmed = [s for s in word if s.param > 1e-12]
                if trimmed:
                    words.append(trimmed)
    words.sort(key=word_length)
    return words


def advance(pose, seg, radius):
    """Closed-form end pose of one segment starting at pose (x, y, yaw)."""
    x, y, yaw = pose
    s = seg.param * radius
    if seg.steering == 0:
        return (x + seg.gear * s * math.cos(yaw), y + seg.gear * s * math.sin(yaw), yaw)
    cx = x - seg.steering * radius * math.sin(yaw)
    cy = y + seg.steering * radius * math.cos(yaw)
    new_yaw = yaw + seg.steering * seg.gear * seg.param
    return (
        cx + seg.steering * radius * math.sin(new_yaw),
        cy - seg.steering * radius * math.cos(new_yaw),
        _wrap(new_yaw),
    )


def word_end_pose(start_pose, word, radius):
    pose = start_pose
    for seg in word:
        pose = advance(pose, seg, radius)
    return pose


def to_local(start_pose, goal_pose, radius):
    """Goal pose expressed in the start frame, scaled to radius-1 units."""
    sx, sy, syaw = start_pose
    gx, gy, gyaw = goal_pose
    dx = gx - sx
    dy = gy - sy
    c = math.cos(syaw)
    s = math.sin(syaw)
    return (
        (dx * c + dy * s) / radius,
        (-dx * s + dy * c) / radius,
        _wrap(gyaw - syaw),
    )


def paths_between(start_pose, goal_pose, radius):
    """Candidate words from start to goal, shortest first, with lengths in
    meters.  Returns [(length_m, word)]."""
    x, y, phi = to_local(start_pose, goal_pose, radius)
    return [(word_length(w) * radius, w) for w in candidate_words(x, y, phi)]


def shortest_length(start_pose, goal_pose, radius):
    """Length in meters of the shortest curve-family connection."""
    paths = paths_between(start_pose, goal_pose, radius)
    return paths[0][0] if paths else math.inf


def word_controls(word, spec, radius):
    """Per-tick controls realizing a word under the discrete model.

    Each segment is driven at the constant speed that completes it in a
    whole number of ticks without exceeding the segment direction's speed
    limit; turning segments command exactly the minimum turning radius.
    """
    dt = spec.sample_time
    controls = []
    for seg in word:
        s = seg.param * radius
        if s <= 0.0:
            continue
        v_cap = spec.v_forward_max if seg.gear > 0 else -spec.v_backward_max
        n = max(1, math.ceil(s / (v_cap * dt) - 1e-12))
        v = seg.gear * (s / (n * dt))
        omega = seg.steering * v / radius
        controls.extend([ControlInput(v, omega)] * n)
    return controls
