"""Discrete-time Ackermann kinematics, motion primitives and body geometry.

The search operates on a discrete clock: one tick lasts AgentSpec.sample_time
seconds and advances the state by a single Euler update

    z_t = z_{t-1} + T_s * [v cos(yaw), v sin(yaw), omega]

A motion primitive spans one search step (search_step_time seconds, i.e.
several ticks) at constant controls; trajectories store every tick so each
consecutive state pair is reproducible by step() exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels


class LimitViolation(ValueError):
    """A control input exceeds the agent's kinematic limits."""


FORWARD = "forward"
BACKWARD = "backward"
WAIT = "wait"


@dataclass(frozen=True)
class AgentState:
    """Rear-axle pose at a discrete time tick. yaw is kept in [-pi, pi)."""

    x: float
    y: float
    yaw: float
    t: int = 0

    def __post_init__(self):
        object.__setattr__(self, "yaw", kernels.normalize_angle(self.yaw))

    @property
    def pose(self):
        return (self.x, self.y, self.yaw)


@dataclass(frozen=True)
class ControlInput:
    """Signed speed [m/s] and yaw rate [rad/s] held for one tick."""

    v: float
    omega: float


STOP = ControlInput(0.0, 0.0)


@dataclass(frozen=True)
class AgentSpec:
    """Body geometry and kinematic limits.

    front_overhang/rear_overhang measure from the rear axle to the front/rear
    body edge, so body length = front_overhang + rear_overhang.
    """

    wheelbase: float = 2.0
    front_overhang: float = 2.0
    rear_overhang: float = 1.0
    width: float = 2.0
    v_forward_max: float = 2.5
    v_backward_max: float = -2.5
    steer_max: float = math.atan(2.0 / 3.5)
    sample_time: float = 0.25

    def __post_init__(self):
        if not (self.wheelbase > 0):
            raise ValueError("wheelbase must be positive")
        if not (self.sample_time > 0):
            raise ValueError("sample_time must be positive")
        if not (self.v_backward_max < 0 < self.v_forward_max):
            raise ValueError("need v_backward_max < 0 < v_forward_max")
        if not (0 < self.steer_max < math.pi / 2):
            raise ValueError("steer_max must lie in (0, pi/2)")

    @property
    def min_turn_radius(self):
        return self.wheelbase / math.tan(self.steer_max)

    @property
    def body_length(self):
        return self.front_overhang + self.rear_overhang

    @property
    def half_width(self):
        return self.width / 2.0

    @property
    def circumradius(self):
        """Radius of the smallest axle-centered circle covering the body."""
        reach = max(self.front_overhang, self.rear_overhang)
        return math.hypot(reach, self.half_width)


@dataclass(frozen=True)
class MotionPrimitive:
    """One search step at constant controls: a direction, a steering angle
    and the arc length covered (0 for wait)."""

    direction: str  # forward | backward | wait
    steering: float  # rad, in {-steer_max, 0, +steer_max}
    arc_length: float


def yaw_rate(v, phi, wheelbase):
    """Yaw rate of the bicycle model: (v / wheelbase) * tan(phi)."""
    if not (math.isfinite(v) and math.isfinite(phi) and math.isfinite(wheelbase)):
        raise ValueError("non-finite input")
    if not (wheelbase > 0):
        raise ValueError("wheelbase must be positive")
    if not (abs(phi) < math.pi / 2):
        raise ValueError("steering angle must satisfy |phi| < pi/2")
    return (v / wheelbase) * math.tan(phi)


def check_control(u, spec, tol=1e-9):
    """Raise LimitViolation unless u is within the spec's speed/yaw-rate bounds."""
    if not (math.isfinite(u.v) and math.isfinite(u.omega)):
        raise LimitViolation("non-finite control")
    if u.v < spec.v_backward_max - tol or u.v > spec.v_forward_max + tol:
        raise LimitViolation(f"speed {u.v} outside [{spec.v_backward_max}, {spec.v_forward_max}]")
    omega_max = abs(u.v) * math.tan(spec.steer_max) / spec.wheelbase
    if abs(u.omega) > omega_max + tol:
        raise LimitViolation(f"yaw rate {u.omega} exceeds |v|*tan(steer_max)/wheelbase = {omega_max}")


def step(state, u, spec):
    """One Euler update of the discrete model; increments the tick."""
    check_control(u, spec)
    x, y, yaw = kernels.integrate_steps(state.x, state.y, state.yaw, u.v, u.omega, spec.sample_time, 1)
    return AgentState(x, y, yaw, state.t + 1)


def motion_primitives(spec, step_time=1.0):
    """The 7 per-expansion primitives: {forward, backward} x {left, straight,
    right} plus one wait.  Arc length is |v_max| * step_time per direction."""
    fwd_arc = spec.v_forward_max * step_time
    back_arc = -spec.v_backward_max * step_time
    return (
        MotionPrimitive(FORWARD, spec.steer_max, fwd_arc),
        MotionPrimitive(FORWARD, 0.0, fwd_arc),
        MotionPrimitive(FORWARD, -spec.steer_max, fwd_arc),
        MotionPrimitive(BACKWARD, spec.steer_max, back_arc),
        MotionPrimitive(BACKWARD, 0.0, back_arc),
        MotionPrimitive(BACKWARD, -spec.steer_max, back_arc),
        MotionPrimitive(WAIT, 0.0, 0.0),
    )


def primitive_control(prim, spec):
    """Constant ControlInput realizing a primitive."""
    if prim.direction == WAIT:
        return STOP
    v = spec.v_forward_max if prim.direction == FORWARD else spec.v_backward_max
    return ControlInput(v, yaw_rate(v, prim.steering, spec.wheelbase))


def substeps_per_primitive(spec, step_time=1.0):
    """Number of ticks spanned by one primitive; step_time must be a multiple
    of the sample time."""
    n = step_time / spec.sample_time
    n_int = round(n)
    if n_int < 1 or abs(n - n_int) > 1e-9:
        raise ValueError(f"search step time {step_time} is not a positive multiple of sample time {spec.sample_time}")
    return n_int


def expand_primitives(state, spec, step_time=1.0):
    """All 7 successor states of one search step (no collision filtering).

    Arc primitives integrate the discrete model tick by tick at constant
    steering; wait repeats the pose.  Returns [(primitive, child_state)].
    """
    n = substeps_per_primitive(spec, step_time)
    out = []
    for prim in motion_primitives(spec, step_time):
        u = primitive_control(prim, spec)
        x, y, yaw = kernels.integrate_steps(state.x, state.y, state.yaw, u.v, u.omega, spec.sample_time, n)
        out.append((prim, AgentState(x, y, yaw, state.t + n)))
    return out


def footprint(state, spec, inflation=0.0):
    """Body rectangle corners at a pose, counterclockwise, as a (4, 2) array."""
    c = kernels.rect_corners(
        state.x,
        state.y,
        state.yaw,
        spec.front_overhang + inflation,
        spec.rear_overhang + inflation,
        spec.half_width + inflation,
    )
    return np.array([[c[0], c[1]], [c[2], c[3]], [c[4], c[5]], [c[6], c[7]]])


@dataclass
class Trajectory:
    """Per-agent motion: one state per tick plus the control applied from
    each tick to the next (len(controls) == len(states) - 1).  arrival_tick
    marks goal arrival; any later states are padding at the final pose."""

    states: list = field(default_factory=list)
    controls: list = field(default_factory=list)
    arrival_tick: int = 0

    def __post_init__(self):
        if len(self.controls) != max(len(self.states) - 1, 0):
            raise ValueError("need exactly one control per state transition")

    @property
    def horizon(self):
        return self.states[-1].t

    @property
    def final_state(self):
        return self.states[-1]

    def state_at(self, tick):
        """State at a tick; beyond the end the final pose is held (padding)."""
        first = self.states[0].t
        idx = tick - first
        if idx <= 0:
            return self.states[0]
        if idx >= len(self.states):
            last = self.states[-1]
            return AgentState(last.x, last.y, last.yaw, tick)
        return self.states[idx]

    def control_at(self, tick):
        """Control applied over [tick, tick+1); zero beyond the end."""
        first = self.states[0].t
        idx = tick - first
        if 0 <= idx < len(self.controls):
            return self.controls[idx]
        return STOP

    def padded_to(self, tick):
        """Copy padded with the final pose (stopped) up to the given tick."""
        states = list(self.states)
        controls = list(self.controls)
        last = states[-1]
        while states[-1].t < tick:
            nxt = AgentState(last.x, last.y, last.yaw, states[-1].t + 1)
            states.append(nxt)
            controls.append(STOP)
        return Trajectory(states, controls, self.arrival_tick)
