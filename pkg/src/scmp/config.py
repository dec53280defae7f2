"""Planner configuration.

Every knob the searches use lives here so runs are reproducible from the
scenario file alone; the values are echoed into emitted solutions.
"""

import math
from dataclasses import dataclass, field, fields, replace


@dataclass(frozen=True)
class CshaConfig:
    """Group-search knobs: shape-distance angle weight, the g-reward for the
    child closest to the ideal states, and the catch-up distance that makes
    the first agent wait."""

    angle_weight: float = 1.0
    closest_reward: float = 0.3
    remote_threshold: float = 5.0

    def __post_init__(self):
        if not (0.0 < self.closest_reward < 1.0):
            raise ValueError("closest_reward must lie in (0, 1)")
        if not (self.remote_threshold > 0.0):
            raise ValueError("remote_threshold must be positive")


@dataclass(frozen=True)
class PlannerConfig:
    search_step_time: float = 1.0  # s, one primitive per step
    angle_weight: float = 1.0
    closest_reward: float = 0.3
    remote_threshold: float = 5.0  # m, default 2x primitive arc length
    reverse_penalty: float = 2.0
    steer_change_penalty: float = 1.5
    wait_penalty: float = 1.0  # arc-length multiple charged per wait step
    goal_tol_xy: float = 0.5  # m
    goal_tol_yaw: float = math.radians(10.0)
    bin_xy: float = 0.7  # m, duplicate-detection resolution
    bin_yaw: float = 2.0 * math.pi / 36.0
    constraint_window: int = 1  # ticks on each side of a constraint's time
    node_budget: int = 200_000  # per low-level query
    analytic_gate: float = 15.0  # m, max curve-family distance to try a tail
    inflation: float = 0.0  # m, extra body margin
    heuristic_cell: float = 1.0  # m, obstacle-distance grid resolution
    seed: int = 0

    def csha(self):
        return CshaConfig(self.angle_weight, self.closest_reward, self.remote_threshold)

    def with_overrides(self, overrides):
        """Apply {field: value} overrides, coercing strings to field types."""
        kwargs = {}
        by_name = {f.name: f for f in fields(self)}
        for key, value in overrides.items():
            if key not in by_name:
                raise KeyError(f"unknown config field: {key}")
            if isinstance(value, str):
                value = int(value) if by_name[key].type is int or key in ("constraint_window", "node_budget", "seed") else float(value)
            kwargs[key] = value
        return replace(self, **kwargs)
